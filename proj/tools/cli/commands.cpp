#include "commands.hpp"

#include "config.hpp"

#include "roving/analysis.hpp"
#include "roving/error.hpp"
#include "roving/sim.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>

#ifndef ROVING_VERSION
#define ROVING_VERSION "unknown"
#endif

namespace roving::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
    std::string command;
    std::string config;
    std::optional<double> rho;
    std::vector<std::string> params;
    int jet_order = 4;
    std::string omega_grid = "default";
    std::uint64_t seed = 1;
    std::string out_dir = "roving-out";
    std::size_t replications = 10;
    std::size_t cycles = 100000;
    std::size_t warmup = 1000;
    double perturb_sigmas = 0.0;
};

void configure_logging()
{
    static std::once_flag once;
    std::call_once(once, [] {
        auto logger = std::make_shared<spdlog::logger>("roving", std::make_shared<spdlog::sinks::stderr_sink_mt>());
        spdlog::set_default_logger(logger);
        const char* level = std::getenv("ROVING_LOG");
        spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
    });
}

std::string num(double v) { return fmt::format("{:.12g}", v); }

/// Value rounded to 12 significant digits, for JSON results.
double round12(double v) { return std::isfinite(v) ? std::stod(num(v)) : v; }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

void write_atomically(const fs::path& path, const std::string& text)
{
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw Error(ErrorCode::InvalidConfig, "cannot write '" + tmp.string() + "'");
        f << text;
    }
    fs::rename(tmp, path);
}

json traffic_json(const TrafficSolution& t)
{
    json gamma = json::array(), rho_i = json::array();
    for (double g : t.gamma) gamma.push_back(round12(g));
    for (double r : t.rho_i) rho_i.push_back(round12(r));
    return {{"gamma", gamma},         {"rho_i", rho_i},           {"rho", round12(t.rho)},
            {"r", round12(t.r)},      {"r2", round12(t.r2)},      {"mean_cycle", round12(t.mean_cycle)},
            {"stable", t.stable()}};
}

json moments_json(const ClassMoments& c)
{
    json raw = json::array();
    for (double m : c.moments.raw) raw.push_back(round12(m));
    return {{"mean", round12(c.moments.mean)}, {"sd", round12(c.moments.sd)}, {"raw", raw}};
}

json report_json(const WaitReport& rep)
{
    json queues = json::array();
    for (const auto& q : rep.queues) {
        json entry = {{"queue", q.queue + 1},
                      {"internal_weight", round12(q.internal_weight)},
                      {"external_weight", round12(q.external_weight)},
                      {"cycle", moments_json(q.cycle)}};
        if (q.internal) entry["internal"] = moments_json(*q.internal);
        if (q.external) entry["external"] = moments_json(*q.external);
        if (q.arbitrary) entry["arbitrary"] = moments_json(*q.arbitrary);
        if (q.little_delta) entry["little_max_delta"] = round12(*q.little_delta);
        queues.push_back(std::move(entry));
    }
    return {{"jet_order", rep.jet_order}, {"queues", queues}};
}

json metric_json(const Metric& m)
{
    return {{"value", round12(m.value)}, {"se", round12(m.se)}, {"ci_half", round12(m.ci_half)}, {"batches", m.batches}};
}

json class_json(const ClassEstimate& c)
{
    return {{"mean", metric_json(c.mean)}, {"sd", metric_json(c.sd)}, {"m2", metric_json(c.m2)}, {"count", c.count}};
}

json metrics_json(const std::vector<Metric>& ms)
{
    json out = json::array();
    for (const auto& m : ms) out.push_back(metric_json(m));
    return out;
}

json estimate_json(const SimEstimate& est)
{
    json queues = json::array();
    for (std::size_t i = 0; i < est.queues.size(); ++i) {
        const auto& q = est.queues[i];
        queues.push_back({{"queue", i + 1},
                          {"internal", class_json(q.internal)},
                          {"external", class_json(q.external)},
                          {"arbitrary", class_json(q.arbitrary)},
                          {"cycle", class_json(q.cycle)},
                          {"external_by_visit", metrics_json(q.external_by_visit)},
                          {"external_by_switch", metrics_json(q.external_by_switch)},
                          {"internal_by_source", metrics_json(q.internal_by_source)},
                          {"length_at_visit_begin", metrics_json(q.length_at_visit_begin)},
                          {"length_at_completion", metrics_json(q.length_at_completion)},
                          {"time_average_length", metric_json(q.time_average_length)}});
    }
    return {{"queues", queues}, {"throughput", metric_json(est.throughput)}, {"diverged", est.diverged}};
}

json comparison_json(const Comparison& cmp)
{
    json rows = json::array();
    for (const auto& r : cmp.rows) {
        rows.push_back({{"queue", r.queue + 1},
                        {"class", r.cls},
                        {"metric", r.metric},
                        {"analytic", round12(r.analytic)},
                        {"simulated", round12(r.simulated)},
                        {"ci_half", round12(r.ci_half)},
                        {"z", round12(r.z)},
                        {"relative_gap", round12(r.relative_gap)},
                        {"pass", r.pass}});
    }
    return {{"pass", cmp.pass}, {"rows", rows}};
}

std::vector<std::pair<std::string, const ClassMoments*>> classes(const QueueReport& q)
{
    std::vector<std::pair<std::string, const ClassMoments*>> out;
    if (q.internal) out.emplace_back("internal", &*q.internal);
    if (q.external) out.emplace_back("external", &*q.external);
    if (q.arbitrary) out.emplace_back("arbitrary", &*q.arbitrary);
    out.emplace_back("cycle", &q.cycle);
    return out;
}

std::string moment_cells(const ClassMoments& c)
{
    const auto& raw = c.moments.raw;
    return fmt::format("{},{},{},{}", num(c.moments.mean), num(c.moments.sd), raw.size() > 1 ? num(raw[1]) : "",
                       raw.size() > 2 ? num(raw[2]) : "");
}

std::string moments_csv(const WaitReport& rep)
{
    std::string s = "queue,class,mean,sd,m2,m3\n";
    for (const auto& q : rep.queues) {
        for (const auto& [name, c] : classes(q)) s += fmt::format("{},{},{}\n", q.queue + 1, name, moment_cells(*c));
    }
    return s;
}

std::string lst_csv(const WaitReport& rep)
{
    std::string s = "omega,queue,arbitrary,internal,external,cycle,cycle_little\n";
    for (const auto& q : rep.queues) {
        for (const auto& p : q.samples) {
            s += fmt::format("{},{},{},{},{},{},{}\n", num(p.omega), q.queue + 1, opt_num(p.arbitrary),
                             opt_num(p.internal), opt_num(p.external), opt_num(p.cycle), opt_num(p.cycle_little));
        }
    }
    return s;
}

const ClassEstimate& estimate_class(const QueueEstimate& q, const std::string& name)
{
    if (name == "internal") return q.internal;
    if (name == "external") return q.external;
    if (name == "arbitrary") return q.arbitrary;
    return q.cycle;
}

std::string sim_csv(const SimEstimate& est)
{
    std::string s = "queue,class,mean,sd,m2,ci_half,sd_ci_half,count\n";
    for (std::size_t i = 0; i < est.queues.size(); ++i) {
        for (const char* name : {"internal", "external", "arbitrary", "cycle"}) {
            const ClassEstimate& c = estimate_class(est.queues[i], name);
            if (c.count == 0) continue;
            s += fmt::format("{},{},{},{},{},{},{},{}\n", i + 1, name, num(c.mean.value), num(c.sd.value),
                             num(c.m2.value), num(c.mean.ci_half), num(c.sd.ci_half), c.count);
        }
    }
    return s;
}

std::string compare_csv(const WaitReport& rep, const SimEstimate& est, const Comparison& cmp)
{
    std::string s = "queue,class,mean,sd,m2,m3,sim_mean,ci_half,z,sim_sd,sd_ci_half,z_sd,pass\n";
    auto find = [&](std::size_t queue, const std::string& cls, const char* metric) -> const ComparisonRow* {
        for (const auto& r : cmp.rows) {
            if (r.queue == queue && r.cls == cls && r.metric == metric) return &r;
        }
        return nullptr;
    };
    for (const auto& q : rep.queues) {
        for (const auto& [name, c] : classes(q)) {
            const ComparisonRow* mean = find(q.queue, name, "mean");
            if (!mean) continue;
            const ComparisonRow* sd = find(q.queue, name, "sd");
            const ClassEstimate& e = estimate_class(est.queues[q.queue], name);
            const bool pass = mean->pass && (!sd || sd->pass);
            s += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", q.queue + 1, name, moment_cells(*c),
                             num(mean->simulated), num(mean->ci_half), num(mean->z), num(e.sd.value),
                             sd ? num(sd->ci_half) : "", sd ? num(sd->z) : "", pass ? "true" : "false");
        }
    }
    return s;
}

int execute(const Options& opt, std::ostream& out)
{
    Overrides overrides;
    for (const auto& p : opt.params) add_override(overrides, p);
    NetworkSpec spec = load_network(opt.config, overrides);
    if (opt.rho) spec = scale_to_load(std::move(spec), *opt.rho);
    const NetworkModel model = validate(spec);
    const TrafficSolution traffic = solve_traffic(model);
    const std::uint64_t hash = model_hash(model);
    spdlog::info("{} queues, rho = {}, E[C] = {}, model {:016x}", model.size(), num(traffic.rho),
                 num(traffic.mean_cycle), hash);

    const bool analytic = opt.command != "simulate";
    if (!traffic.stable()) {
        if (analytic) throw Error(ErrorCode::UnstableSystem, "rho = " + num(traffic.rho) + " >= 1");
        spdlog::warn("rho = {} >= 1; the simulation will diverge", num(traffic.rho));
    }

    const SolverOptions solver;
    json artifact = {{"metadata",
                      {{"tool", "roving"},
                       {"version", ROVING_VERSION},
                       {"command", opt.command},
                       {"config", opt.config},
                       {"busy_tolerance", solver.busy_tolerance},
                       {"cycle_tolerance", solver.cycle_tolerance}}},
                     {"model", network_to_json(spec)},
                     {"model_hash", fmt::format("{:016x}", hash)},
                     {"traffic", traffic_json(traffic)}};

    fs::create_directories(opt.out_dir);
    const fs::path dir(opt.out_dir);

    std::optional<WaitReport> rep;
    if (analytic) {
        ReportConfig cfg;
        cfg.jet_order = opt.jet_order;
        cfg.omega_grid = opt.command == "analyze" ? parse_omega_grid(opt.omega_grid) : std::vector<double>{};
        cfg.solver = solver;
        rep = report(model, cfg);
        artifact["metadata"]["jet_order"] = opt.jet_order;
        artifact["analysis"] = report_json(*rep);
    }

    std::optional<SimEstimate> est;
    if (opt.command != "analyze") {
        SimConfig cfg;
        cfg.seed = opt.seed;
        cfg.warmup_cycles = opt.warmup;
        cfg.measured_cycles = opt.cycles;
        cfg.replications = opt.replications;
        est = simulate(model, cfg);
        artifact["metadata"]["seed"] = opt.seed;
        artifact["metadata"]["warmup_cycles"] = opt.warmup;
        artifact["metadata"]["measured_cycles"] = opt.cycles;
        artifact["metadata"]["replications"] = opt.replications;
        artifact["simulation"] = estimate_json(*est);
        if (est->diverged) spdlog::warn("simulation diverged");
    }

    int code = kOk;
    if (opt.command == "analyze") {
        const std::string table = moments_csv(*rep);
        write_atomically(dir / "moments.csv", table);
        if (!rep->queues.empty() && !rep->queues.front().samples.empty()) write_atomically(dir / "lst.csv", lst_csv(*rep));
        out << table;
    } else if (opt.command == "simulate") {
        const std::string table = sim_csv(*est);
        write_atomically(dir / "sim.csv", table);
        out << table;
    } else {
        CompareOptions copt;
        copt.perturb_sigmas = opt.perturb_sigmas;
        const Comparison cmp = compare(*rep, *est, copt);
        artifact["comparison"] = comparison_json(cmp);
        const std::string table = compare_csv(*rep, *est, cmp);
        write_atomically(dir / "compare.csv", table);
        out << table;
        out << fmt::format("comparison {}: max |z| = {}, max relative gap = {}\n", cmp.pass ? "passed" : "FAILED",
                           num(cmp.max_abs_z()), num(cmp.max_relative_gap()));
        if (!cmp.pass) code = kComparisonFailed;
    }
    write_atomically(dir / "report.json", artifact.dump(2) + "\n");
    return code;
}

}  // namespace

std::vector<double> parse_omega_grid(const std::string& spec)
{
    if (spec == "default") return default_omega_grid();
    if (spec == "none" || spec.empty()) return {};
    auto bad = [&]() { return Error(ErrorCode::InvalidConfig, "bad --omega-grid '" + spec + "'"); };
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, spec.find(':') != std::string::npos ? ':' : ',');) parts.push_back(item);
    auto number = [&](const std::string& t) {
        try {
            std::size_t used = 0;
            const double v = std::stod(t, &used);
            if (used != t.size()) throw bad();
            return v;
        } catch (const std::invalid_argument&) {
            throw bad();
        } catch (const std::out_of_range&) {
            throw bad();
        }
    };
    std::vector<double> grid;
    if (parts.front() == "log" || parts.front() == "lin") {
        if (parts.size() != 4) throw bad();
        const double a = number(parts[1]), b = number(parts[2]);
        const int n = static_cast<int>(number(parts[3]));
        if (n < 1 || a < 0.0 || b < a || (parts.front() == "log" && a <= 0.0)) throw bad();
        for (int k = 0; k < n; ++k) {
            const double t = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
            grid.push_back(parts.front() == "log" ? a * std::pow(b / a, t) : a + (b - a) * t);
        }
    } else {
        for (const auto& p : parts) grid.push_back(number(p));
    }
    for (double w : grid) {
        if (w < 0.0) throw bad();
    }
    return grid;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    configure_logging();
    Options opt;
    CLI::App app{"Waiting-time analysis and simulation of cyclic single-server networks with routing", "roving"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", ROVING_VERSION);

    auto add_common = [&opt](CLI::App* sub) {
        sub->add_option("config", opt.config, "JSON network config")->required();
        sub->add_option("--rho", opt.rho, "scale external arrival rates to this total load");
        sub->add_option("--param", opt.params, "override a config param, key=value (repeatable)");
        sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    };
    auto add_analysis = [&opt](CLI::App* sub) {
        sub->add_option("--jet-order", opt.jet_order, "number of moments carried")->capture_default_str();
    };
    auto add_sim = [&opt](CLI::App* sub) {
        sub->add_option("--seed", opt.seed, "base RNG seed; replication r uses seed + r")->capture_default_str();
        sub->add_option("--reps", opt.replications, "replications")->capture_default_str();
        sub->add_option("--cycles", opt.cycles, "measured cycles per replication")->capture_default_str();
        sub->add_option("--warmup", opt.warmup, "discarded warm-up cycles")->capture_default_str();
    };

    CLI::App* analyze = app.add_subcommand("analyze", "moments and LST samples of all waiting times");
    add_common(analyze);
    add_analysis(analyze);
    analyze->add_option("--omega-grid", opt.omega_grid, "default | none | log:a:b:n | lin:a:b:n | x1,x2,...")
        ->capture_default_str();

    CLI::App* sim = app.add_subcommand("simulate", "discrete-event estimates of the same quantities");
    add_common(sim);
    add_sim(sim);

    CLI::App* cmp = app.add_subcommand("compare", "analysis against simulation, z-score per moment");
    add_common(cmp);
    add_analysis(cmp);
    add_sim(cmp);
    cmp->add_option("--perturb-sigmas", opt.perturb_sigmas,
                    "negative control: shift analytic values by this many standard errors");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }
    opt.command = app.get_subcommands().front()->get_name();

    try {
        return execute(opt, out);
    } catch (const Error& e) {
        err << "roving: " << e.what() << '\n';
        return e.code() == ErrorCode::UnstableSystem ? kUnstable : kConfigError;
    } catch (const std::exception& e) {
        err << "roving: " << e.what() << '\n';
        return kConfigError;
    }
}

}  // namespace roving::cli
