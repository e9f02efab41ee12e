#include "roving/analysis.hpp"

#include "roving/error.hpp"
#include "roving/pgf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace roving {

namespace {

/// Extra jet orders carried so that 0/0 cancellations still leave `jet_order` coefficients.
constexpr int kOrderSlack = 2;
constexpr double kClassTolerance = 1e-12;

void require_k(bool ok, std::size_t i, std::size_t k)
{
    if (!ok) {
        throw Error(ErrorCode::ImpossibleCondition,
                    "source offset k = " + std::to_string(k) + " is not used for queue " + std::to_string(i + 1));
    }
}

double internal_rate(const TrafficSolution& traffic, const NetworkModel& model, std::size_t i)
{
    const double rate = traffic.gamma[i] - model.lambda(i);
    return rate > kClassTolerance * std::max(1.0, traffic.gamma[i]) ? rate : 0.0;
}

/// Σ_{l=1}^{k-1} λ_{i-l} (1 - B_{l-1,i-1}(ω)): arrivals in the queues between
/// the source and the target, each weighted by its extended service.
Jet backlog_rate(const AnalysisContext& ctx, std::size_t i, std::size_t k)
{
    const NetworkModel& model = ctx.model();
    const KernelTable& prev = ctx.previous(i);
    Jet a(ctx.omega().order(), 0.0);
    for (std::size_t l = 1; l < k; ++l) a += model.lambda(model.back(i, l)) * (1.0 - prev.btilde[l - 1]);
    return a;
}

/// λ_i (1 - B_i(ω)): own arrivals, which queue ahead of nobody but are served after the tagged customer.
Jet own_rate(const AnalysisContext& ctx, std::size_t i)
{
    return ctx.model().lambda(i) * (1.0 - lst(ctx.model().queue(i).service, ctx.omega()));
}

Jet switch_product(const AnalysisContext& ctx, std::size_t i, std::size_t count)
{
    Jet p(ctx.omega().order(), 1.0);
    for (std::size_t l = 0; l < count; ++l) p *= ctx.previous(i).rtilde[l];
    return p;
}

Jet fit_order(const Jet& j, int order)
{
    if (j.order() < order) {
        throw Error(ErrorCode::PoleDetected, "transform kept only " + std::to_string(j.order()) +
                                                 " coefficients after cancellation; raise the working order");
    }
    return j.truncated(order);
}

ClassMoments class_moments(const Jet& lst_jet, int order)
{
    Jet j = fit_order(lst_jet, order);
    return {moments_from_jet(j, order), j};
}

}  // namespace

AnalysisContext::AnalysisContext(const NetworkModel& model, const Jet& omega, const SolverOptions& options)
    : model_(model), traffic_(solve_traffic(model)), options_(options), omega_(omega)
{
    if (!traffic_.stable()) throw Error(ErrorCode::UnstableSystem, "rho = " + std::to_string(traffic_.rho) + " >= 1");
    if (!(traffic_.r > 0.0)) throw Error(ErrorCode::ZeroSwitchover, "total switch-over time is zero; E[C] = 0");
    if (omega[0] < 0.0) throw Error(ErrorCode::NegativeArgument, "omega < 0");
    const std::size_t n = model_.size();
    tables_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) tables_.push_back(kernel_table(model_, traffic_, i, omega_, options_));
    vectors_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) vectors_.push_back(u_vectors(model_, tables_[i], previous(i)));
}

std::vector<InternalSource> internal_sources(const NetworkModel& model, const TrafficSolution& traffic, std::size_t i)
{
    std::vector<InternalSource> out;
    const double rate = internal_rate(traffic, model, i);
    if (rate == 0.0) return out;
    const std::size_t n = model.size();
    const std::size_t first = model.exhaustive(i) ? 0 : 1;
    for (std::size_t k = first; k < first + n; ++k) {
        const std::size_t j = model.back(i, k);
        out.push_back({k, traffic.gamma[j] * model.route(j, i) / rate});
    }
    return out;
}

std::vector<ExternalPeriod> external_periods(const NetworkModel& model, const TrafficSolution& traffic, std::size_t i)
{
    std::vector<ExternalPeriod> out;
    const std::size_t n = model.size();
    const std::size_t first_visit = model.exhaustive(i) ? 0 : 1;
    for (std::size_t k = first_visit; k < first_visit + n; ++k) {
        out.push_back({true, k, traffic.rho_i[model.back(i, k)]});
    }
    for (std::size_t k = 1; k <= n; ++k) {
        out.push_back({false, k, mean(model.queue(model.back(i, k)).switchover) / traffic.mean_cycle});
    }
    return out;
}

Jet cycle_time(const AnalysisContext& ctx, std::size_t i)
{
    const NetworkModel& model = ctx.model();
    const KernelTable& prev = ctx.previous(i);
    const Jet begin = lb_visit(model, i, cycle_argument(model, prev), ctx.options()).value;
    return begin * switch_product(ctx, i, model.size());
}

Jet cycle_time_little(const NetworkModel& model, std::size_t i, const Jet& omega, const SolverOptions& options)
{
    const double lambda = model.lambda(i);
    if (!(lambda > 0.0)) {
        throw Error(ErrorCode::NoExternalArrivals, "queue " + std::to_string(i + 1) + " has no external arrivals");
    }
    if (omega[0] < 0.0) throw Error(ErrorCode::NegativeArgument, "omega < 0");
    // Marking at z = 1 - omega/lambda adds lambda (1 - z) = omega to every arrival term.
    const CycleStep step = cycle_map(model, i, ones(model.size(), omega.order()), omega, options);
    return step.factor * lb_visit(model, i, step.z, options).value;
}

double cycle_time_little(const NetworkModel& model, std::size_t i, double omega, const SolverOptions& options)
{
    return cycle_time_little(model, i, Jet(0, omega), options).value();
}

Jet wait_internal_cond(const AnalysisContext& ctx, std::size_t i, std::size_t k)
{
    const NetworkModel& model = ctx.model();
    const std::size_t n = model.size();
    require_k(model.exhaustive(i) ? k < n : (k >= 1 && k <= n), i, k);
    const std::size_t j = model.back(i, k);
    if (!(ctx.traffic().gamma[j] * model.route(j, i) > 0.0)) {
        throw Error(ErrorCode::ImpossibleCondition,
                    "no customers move from queue " + std::to_string(j + 1) + " to queue " + std::to_string(i + 1));
    }
    const Jet completion = lc_service(model, ctx.traffic(), j, ctx.vectors(i).gate[k], ctx.options()).value;
    return completion * switch_product(ctx, i, k);
}

Jet wait_internal(const AnalysisContext& ctx, std::size_t i)
{
    const auto sources = internal_sources(ctx.model(), ctx.traffic(), i);
    if (sources.empty()) {
        throw Error(ErrorCode::NoInternalArrivals, "queue " + std::to_string(i + 1) + " receives no routed customers");
    }
    Jet total(ctx.omega().order(), 0.0);
    for (const auto& s : sources) {
        if (s.weight > 0.0) total += s.weight * wait_internal_cond(ctx, i, s.k);
    }
    return total;
}

Jet wait_switch(const AnalysisContext& ctx, std::size_t i, std::size_t k)
{
    const NetworkModel& model = ctx.model();
    require_k(k >= 1 && k <= model.size(), i, k);
    const std::size_t j = model.back(i, k);
    const DistributionSpec& switchover = model.queue(j).switchover;
    if (!(mean(switchover) > 0.0)) {
        throw Error(ErrorCode::ZeroSwitchover, "switch-over after queue " + std::to_string(j + 1) + " has zero length");
    }
    const Jet backlog = backlog_rate(ctx, i, k);
    const Jet split = past_residual(switchover, backlog + own_rate(ctx, i), ctx.omega() + backlog);
    const Jet begin = boundary_pgf(model, ctx.traffic(), {Boundary::Kind::SwitchBegin, j}, ctx.vectors(i).gate[k - 1],
                                   ctx.options())
                          .value;
    return split * begin * switch_product(ctx, i, k - 1);
}

Jet wait_visit(const AnalysisContext& ctx, std::size_t i, std::size_t k)
{
    const NetworkModel& model = ctx.model();
    const std::size_t n = model.size();
    require_k(model.exhaustive(i) ? k < n : (k >= 1 && k <= n), i, k);
    const std::size_t j = model.back(i, k);
    const DistributionSpec& service = model.queue(j).service;
    if (!(ctx.traffic().rho_i[j] > 0.0)) {
        throw Error(ErrorCode::ImpossibleCondition, "visits to queue " + std::to_string(j + 1) + " have zero length");
    }
    const UVectors& v = ctx.vectors(i);
    const Jet& omega = ctx.omega();

    if (k == 0) {
        // Exhaustive target, arrival during its own visit: only the customers ahead in line count.
        const Jet bare = lst(service, omega);
        const Jet split = past_residual(service, own_rate(ctx, i), omega);
        return split * lb_service(model, ctx.traffic(), i, v.u_exh0, ctx.options()).value / bare;
    }

    const KernelTable& prev = ctx.previous(i);
    const Jet backlog = backlog_rate(ctx, i, k);
    const Jet own = own_rate(ctx, i);
    Jet split;
    Jet routing;
    if (!model.exhaustive(j)) {
        split = past_residual(service, backlog + own, omega + backlog);
        routing = prev.ptilde[k - 1];
    } else {
        // Arrivals to the exhaustive source during the current service are served in this visit.
        const Jet same_visit = model.lambda(j) * (1.0 - prev.btilde[k - 1]);
        split = past_residual(service, backlog + own + same_visit, omega + backlog + same_visit);
        routing = Jet(omega.order(), 1.0);
        for (std::size_t l = 0; l < k; ++l) {
            routing -= model.route(j, model.back(i, l + 1)) * (1.0 - prev.btilde[l]);
        }
    }
    const Jet begin = lb_service(model, ctx.traffic(), j, v.gate[k], ctx.options()).value;
    return split * begin * switch_product(ctx, i, k) * routing / prev.btilde[k - 1];
}

Jet wait_external(const AnalysisContext& ctx, std::size_t i)
{
    if (!(ctx.model().lambda(i) > 0.0)) {
        throw Error(ErrorCode::NoExternalArrivals, "queue " + std::to_string(i + 1) + " has no external arrivals");
    }
    Jet total(ctx.omega().order(), 0.0);
    for (const auto& p : external_periods(ctx.model(), ctx.traffic(), i)) {
        if (p.weight <= 0.0) continue;
        total += p.weight * (p.visit ? wait_visit(ctx, i, p.k) : wait_switch(ctx, i, p.k));
    }
    return total;
}

Jet wait_arbitrary(const AnalysisContext& ctx, std::size_t i)
{
    const double gamma = ctx.traffic().gamma[i];
    if (!(gamma > 0.0)) throw Error(ErrorCode::DeadQueue, "queue " + std::to_string(i + 1) + " has no arrivals");
    const double internal = internal_rate(ctx.traffic(), ctx.model(), i) / gamma;
    const double external = ctx.model().lambda(i) / gamma;
    Jet total(ctx.omega().order(), 0.0);
    if (internal > 0.0) total += internal * wait_internal(ctx, i);
    if (external > 0.0) total += external * wait_external(ctx, i);
    return total;
}

std::vector<double> default_omega_grid()
{
    std::vector<double> grid;
    constexpr int kPoints = 32;
    for (int p = 0; p < kPoints; ++p) grid.push_back(std::pow(10.0, -3.0 + 4.0 * p / (kPoints - 1)));
    return grid;
}

WaitReport report(const NetworkModel& model, const ReportConfig& config)
{
    if (config.jet_order < 1 || config.jet_order + kOrderSlack > Jet::kMaxOrder) {
        throw Error(ErrorCode::InvalidConfig, "jet order must lie in [1, " + std::to_string(Jet::kMaxOrder - kOrderSlack) + "]");
    }
    const AnalysisContext ctx(model, Jet::variable(0.0, config.jet_order + kOrderSlack), config.solver);
    const TrafficSolution& traffic = ctx.traffic();
    const std::size_t n = model.size();

    WaitReport out;
    out.model_hash = model_hash(model);
    out.traffic = traffic;
    out.jet_order = config.jet_order;
    for (std::size_t i = 0; i < n; ++i) {
        QueueReport q;
        q.queue = i;
        const double gamma = traffic.gamma[i];
        q.internal_weight = gamma > 0.0 ? internal_rate(traffic, model, i) / gamma : 0.0;
        q.external_weight = gamma > 0.0 ? model.lambda(i) / gamma : 0.0;
        // The arbitrary-customer transform is the class mixture; build each class once.
        Jet mixed(ctx.omega().order(), 0.0);
        if (q.internal_weight > 0.0) {
            const Jet w = wait_internal(ctx, i);
            q.internal = class_moments(w, config.jet_order);
            mixed += q.internal_weight * w;
        }
        if (q.external_weight > 0.0) {
            const Jet w = wait_external(ctx, i);
            q.external = class_moments(w, config.jet_order);
            mixed += q.external_weight * w;
        }
        if (gamma > 0.0) q.arbitrary = class_moments(mixed, config.jet_order);
        q.cycle = class_moments(cycle_time(ctx, i), config.jet_order);
        out.queues.push_back(std::move(q));
    }

    for (double omega : config.omega_grid) {
        const AnalysisContext point(model, Jet(0, omega), config.solver);
        for (std::size_t i = 0; i < n; ++i) {
            QueueReport& q = out.queues[i];
            LstSample s{omega, {}, {}, {}, {}, {}};
            if (q.internal) s.internal = static_cast<double>(wait_internal(point, i).value());
            if (q.external) s.external = static_cast<double>(wait_external(point, i).value());
            if (q.arbitrary) {
                s.arbitrary = q.internal_weight * s.internal.value_or(0.0) + q.external_weight * s.external.value_or(0.0);
            }
            s.cycle = cycle_time(point, i).value();
            if (model.lambda(i) > 0.0) {
                s.cycle_little = cycle_time_little(model, i, omega, config.solver);
                const double delta = std::abs(*s.cycle - *s.cycle_little);
                q.little_delta = std::max(q.little_delta.value_or(0.0), delta);
            }
            q.samples.push_back(s);
        }
    }
    return out;
}

}  // namespace roving
