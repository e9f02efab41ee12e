#include "roving/sim.hpp"

#include "roving/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <random>
#include <type_traits>

namespace roving {

namespace {

constexpr std::size_t kSingleRunBatches = 10;
constexpr std::size_t kNone = static_cast<std::size_t>(-1);
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t& x) noexcept
{
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

double draw(const DistributionSpec& dist, Xoshiro256& rng)
{
    return std::visit(
        [&rng](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Deterministic>) {
                return d.value;
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return std::exponential_distribution<double>(d.rate)(rng);
            } else if constexpr (std::is_same_v<T, Erlang>) {
                return std::gamma_distribution<double>(d.phases, 1.0 / d.rate)(rng);
            } else if constexpr (std::is_same_v<T, Gamma>) {
                return std::gamma_distribution<double>(d.shape, 1.0 / d.rate)(rng);
            } else {
                const std::size_t branch =
                    std::discrete_distribution<std::size_t>(d.weights.begin(), d.weights.end())(rng);
                return std::exponential_distribution<double>(d.rates[branch])(rng);
            }
        },
        dist);
}

struct Customer {
    double arrival;
    std::size_t batch;  ///< measurement batch at arrival, kNone outside the window
    bool internal;
    bool in_visit;       ///< external: arrived during a visit (else during a switch-over)
    std::size_t origin;  ///< internal: source queue; external: queue of the period in progress
};

struct Sums {
    std::uint64_t n = 0;
    double s1 = 0.0;
    double s2 = 0.0;
    void add(double x) noexcept
    {
        ++n;
        s1 += x;
        s2 += x * x;
    }
    void merge(const Sums& o) noexcept
    {
        n += o.n;
        s1 += o.s1;
        s2 += o.s2;
    }
};

struct QueueSums {
    Sums internal, external, cycle;
    std::vector<Sums> by_visit, by_switch, by_source, visit_length, completion_length;
    double area = 0.0;
    explicit QueueSums(std::size_t n)
        : by_visit(n), by_switch(n), by_source(n), visit_length(n), completion_length(n)
    {
    }
};

struct Batch {
    std::vector<QueueSums> queues;
    double duration = 0.0;
    std::uint64_t departures = 0;
    explicit Batch(std::size_t n) : queues(n, QueueSums(n)) {}
};

class Replication {
public:
    Replication(const NetworkModel& model, const SimConfig& config, std::uint64_t seed, std::size_t batches,
                bool unstable)
        : model_(model), config_(config), rng_(seed), n_(model.size()), queue_(n_), next_arrival_(n_, kInf),
          batches_(batches, Batch(n_)), batch_start_(batches, kInf), per_batch_(config.measured_cycles / batches),
          last_visit_(n_, 0.0), last_batch_(n_, kNone), diverged_(unstable)
    {
        for (std::size_t j = 0; j < n_; ++j) {
            if (model.lambda(j) > 0.0) next_arrival_[j] = interarrival(j);
        }
    }

    void run()
    {
        std::size_t i = 0;
        while (true) {
            admit(now_);
            if (i == 0 && advance_phase()) break;
            visit_start(i);
            in_visit_ = true;
            period_queue_ = i;
            if (model_.exhaustive(i)) {
                while (!queue_[i].empty() && !stopped_) serve(i);
            } else {
                for (std::size_t s = queue_[i].size(); s > 0 && !stopped_; --s) serve(i);
            }
            if (stopped_) break;
            in_visit_ = false;
            now_ += draw(model_.queue(i).switchover, rng_);
            i = (i + 1) % n_;
        }
        for (std::size_t b = 0; b + 1 < batches_.size(); ++b) {
            if (batch_start_[b + 1] < kInf) batches_[b].duration = batch_start_[b + 1] - batch_start_[b];
        }
        if (end_ < kInf) batches_.back().duration = end_ - batch_start_.back();
    }

    [[nodiscard]] std::vector<Batch>& batches() noexcept { return batches_; }
    [[nodiscard]] bool diverged() const noexcept { return diverged_; }

private:
    enum class Phase { Warmup, Measure, Drain };

    double interarrival(std::size_t j) { return std::exponential_distribution<double>(model_.lambda(j))(rng_); }

    void admit(double t)
    {
        for (std::size_t j = 0; j < n_; ++j) {
            while (next_arrival_[j] <= t) {
                queue_[j].push_back({next_arrival_[j], batch_, false, in_visit_, period_queue_});
                next_arrival_[j] += interarrival(j);
            }
            check_cap(j);
        }
    }

    void check_cap(std::size_t j)
    {
        if (queue_[j].size() >= config_.queue_cap) {
            diverged_ = true;
            stopped_ = true;
        }
    }

    /// Called at every visit beginning of queue 0; returns true when the run is complete.
    bool advance_phase()
    {
        const std::size_t k = visits0_++;
        const std::size_t warmup = config_.warmup_cycles;
        const std::size_t last = warmup + config_.measured_cycles;
        if (k == warmup) {
            phase_ = Phase::Measure;
            batch_ = 0;
            batch_start_[0] = now_;
        } else if (phase_ == Phase::Measure && k < last && (k - warmup) % per_batch_ == 0 &&
                   batch_ + 1 < batches_.size()) {
            ++batch_;
            batch_start_[batch_] = now_;
        }
        if (k == last) {
            phase_ = Phase::Drain;
            batch_ = kNone;
            end_ = now_;
            outstanding_ = 0;
            for (const auto& q : queue_) {
                outstanding_ += static_cast<std::size_t>(
                    std::count_if(q.begin(), q.end(), [this](const Customer& c) { return c.arrival < end_; }));
            }
            if (diverged_) return true;
        }
        return phase_ == Phase::Drain && k > last && outstanding_ == 0;
    }

    void visit_start(std::size_t i)
    {
        if (last_batch_[i] != kNone) batches_[last_batch_[i]].queues[i].cycle.add(now_ - last_visit_[i]);
        last_visit_[i] = now_;
        last_batch_[i] = batch_;
        if (batch_ != kNone) {
            auto& lengths = batches_[batch_].queues[i].visit_length;
            for (std::size_t j = 0; j < n_; ++j) lengths[j].add(static_cast<double>(queue_[j].size()));
        }
    }

    void serve(std::size_t i)
    {
        const Customer c = queue_[i].front();
        queue_[i].pop_front();
        if (phase_ == Phase::Drain && c.arrival < end_) --outstanding_;
        if (c.batch != kNone) {
            QueueSums& q = batches_[c.batch].queues[i];
            const double wait = now_ - c.arrival;
            if (c.internal) {
                q.internal.add(wait);
                q.by_source[c.origin].add(wait);
            } else {
                q.external.add(wait);
                (c.in_visit ? q.by_visit : q.by_switch)[c.origin].add(wait);
            }
        }

        now_ += draw(model_.queue(i).service, rng_);
        admit(now_);
        add_presence(i, c.arrival, now_);
        if (batch_ != kNone) {
            auto& lengths = batches_[batch_].queues[i].completion_length;
            for (std::size_t j = 0; j < n_; ++j) lengths[j].add(static_cast<double>(queue_[j].size()));
        }

        const std::size_t dest = route(i);
        if (dest != kNone) {
            queue_[dest].push_back({now_, batch_, true, true, i});
            check_cap(dest);
        } else if (batch_ != kNone) {
            ++batches_[batch_].departures;
        }
    }

    /// Destination after a service at i, kNone for leaving the network.
    std::size_t route(std::size_t i)
    {
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
        double acc = model_.exit_probability(i);
        if (u < acc) return kNone;
        std::size_t last = kNone;
        for (std::size_t j = 0; j < n_; ++j) {
            const double p = model_.route(i, j);
            if (p <= 0.0) continue;
            acc += p;
            last = j;
            if (u < acc) return j;
        }
        return last;  // rounding in the cumulative sum
    }

    /// Adds the part of [a, c] that falls inside each measurement batch to the queue's area.
    void add_presence(std::size_t j, double a, double c)
    {
        for (std::size_t b = 0; b < batches_.size(); ++b) {
            const double s = batch_start_[b];
            if (!(s < c)) break;
            const double e = b + 1 < batches_.size() ? batch_start_[b + 1] : end_;
            const double overlap = std::min(c, e) - std::max(a, s);
            if (overlap > 0.0) batches_[b].queues[j].area += overlap;
        }
    }

    const NetworkModel& model_;
    SimConfig config_;
    Xoshiro256 rng_;
    std::size_t n_;
    std::vector<std::deque<Customer>> queue_;
    std::vector<double> next_arrival_;
    std::vector<Batch> batches_;
    std::vector<double> batch_start_;
    std::size_t per_batch_;
    std::vector<double> last_visit_;
    std::vector<std::size_t> last_batch_;

    double now_ = 0.0;
    double end_ = kInf;
    Phase phase_ = Phase::Warmup;
    std::size_t batch_ = kNone;
    std::size_t visits0_ = 0;
    std::size_t outstanding_ = 0;
    bool in_visit_ = false;
    std::size_t period_queue_ = 0;
    bool diverged_;
    bool stopped_ = false;
};

Metric summarize(const std::vector<double>& values)
{
    Metric m;
    m.batches = values.size();
    if (values.empty()) return m;
    double sum = 0.0;
    for (double v : values) sum += v;
    m.value = sum / static_cast<double>(values.size());
    if (values.size() >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - m.value) * (v - m.value);
        const double df = static_cast<double>(values.size() - 1);
        m.se = std::sqrt(ss / df / static_cast<double>(values.size()));
        const boost::math::students_t t(df);
        m.ci_half = boost::math::quantile(boost::math::complement(t, 0.025)) * m.se;
    }
    return m;
}

template <typename F>
Metric over_batches(const std::vector<Batch>& batches, F&& value)
{
    std::vector<double> values;
    for (const Batch& b : batches) {
        if (auto v = value(b)) values.push_back(*v);
    }
    return summarize(values);
}

ClassEstimate class_estimate(const std::vector<Batch>& batches, std::size_t i, Sums (*pick)(const QueueSums&))
{
    ClassEstimate out;
    out.mean = over_batches(batches, [&](const Batch& b) -> std::optional<double> {
        const Sums s = pick(b.queues[i]);
        if (s.n == 0) return std::nullopt;
        return s.s1 / static_cast<double>(s.n);
    });
    out.sd = over_batches(batches, [&](const Batch& b) -> std::optional<double> {
        const Sums s = pick(b.queues[i]);
        if (s.n < 2) return std::nullopt;
        const double n = static_cast<double>(s.n);
        const double mean = s.s1 / n;
        return std::sqrt(std::max(0.0, (s.s2 - n * mean * mean) / (n - 1.0)));
    });
    out.m2 = over_batches(batches, [&](const Batch& b) -> std::optional<double> {
        const Sums s = pick(b.queues[i]);
        if (s.n == 0) return std::nullopt;
        return s.s2 / static_cast<double>(s.n);
    });
    for (const Batch& b : batches) out.count += pick(b.queues[i]).n;
    return out;
}

std::vector<Metric> mean_per_queue(const std::vector<Batch>& batches, std::size_t i,
                                   const std::vector<Sums> QueueSums::*member)
{
    const std::size_t n = batches.front().queues.size();
    std::vector<Metric> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = over_batches(batches, [&](const Batch& b) -> std::optional<double> {
            const Sums& s = (b.queues[i].*member)[j];
            if (s.n == 0) return std::nullopt;
            return s.s1 / static_cast<double>(s.n);
        });
    }
    return out;
}

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) noexcept
{
    for (auto& s : s_) s = splitmix64(seed);
}

Xoshiro256::result_type Xoshiro256::operator()() noexcept
{
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

SimEstimate simulate(const NetworkModel& model, const SimConfig& config)
{
    if (config.measured_cycles < 100) throw Error(ErrorCode::InvalidConfig, "measured_cycles must be at least 100");
    if (config.replications < 1) throw Error(ErrorCode::InvalidConfig, "replications must be at least 1");

    const TrafficSolution traffic = solve_traffic(model);
    const std::size_t per_run = config.replications == 1 ? kSingleRunBatches : 1;
    SimEstimate est;
    est.model_hash = model_hash(model);
    est.config = config;
    est.diverged = !traffic.stable();

    std::vector<Batch> batches;
    for (std::size_t r = 0; r < config.replications; ++r) {
        Replication rep(model, config, config.seed + r, per_run, !traffic.stable());
        rep.run();
        est.diverged = est.diverged || rep.diverged();
        for (Batch& b : rep.batches()) batches.push_back(std::move(b));
    }

    const std::size_t n = model.size();
    for (std::size_t i = 0; i < n; ++i) {
        QueueEstimate q;
        q.internal = class_estimate(batches, i, [](const QueueSums& s) { return s.internal; });
        q.external = class_estimate(batches, i, [](const QueueSums& s) { return s.external; });
        q.arbitrary = class_estimate(batches, i, [](const QueueSums& s) {
            Sums all = s.internal;
            all.merge(s.external);
            return all;
        });
        q.cycle = class_estimate(batches, i, [](const QueueSums& s) { return s.cycle; });
        q.external_by_visit = mean_per_queue(batches, i, &QueueSums::by_visit);
        q.external_by_switch = mean_per_queue(batches, i, &QueueSums::by_switch);
        q.internal_by_source = mean_per_queue(batches, i, &QueueSums::by_source);
        q.length_at_visit_begin = mean_per_queue(batches, i, &QueueSums::visit_length);
        q.length_at_completion = mean_per_queue(batches, i, &QueueSums::completion_length);
        q.time_average_length = over_batches(batches, [&](const Batch& b) -> std::optional<double> {
            if (!(b.duration > 0.0)) return std::nullopt;
            return b.queues[i].area / b.duration;
        });
        est.queues.push_back(std::move(q));
    }
    est.throughput = over_batches(batches, [](const Batch& b) -> std::optional<double> {
        if (!(b.duration > 0.0)) return std::nullopt;
        return static_cast<double>(b.departures) / b.duration;
    });
    return est;
}

double Comparison::max_abs_z() const
{
    double z = 0.0;
    for (const auto& r : rows) z = std::max(z, std::abs(r.z));
    return z;
}

double Comparison::max_relative_gap() const
{
    double g = 0.0;
    for (const auto& r : rows) g = std::max(g, r.relative_gap);
    return g;
}

Comparison compare(const WaitReport& report, const SimEstimate& estimate, const CompareOptions& options)
{
    if (report.model_hash != estimate.model_hash || report.queues.size() != estimate.queues.size()) {
        throw Error(ErrorCode::ModelMismatch, "analysis and simulation were run on different models");
    }
    Comparison out;
    auto add = [&](std::size_t queue, const char* cls, const char* metric, double analytic, const Metric& sim) {
        ComparisonRow row{queue, cls, metric, analytic + options.perturb_sigmas * sim.se, sim.value, sim.ci_half,
                          sim.se, 0.0, 0.0, true};
        const double diff = row.analytic - row.simulated;
        row.z = sim.se > 0.0 ? diff / sim.se : (diff == 0.0 ? 0.0 : std::copysign(kInf, diff));
        row.relative_gap = std::abs(diff) / (row.analytic != 0.0 ? std::abs(row.analytic) : 1.0);
        row.pass = std::abs(row.z) <= options.z_limit;
        out.pass = out.pass && row.pass;
        out.rows.push_back(std::move(row));
    };
    for (std::size_t i = 0; i < report.queues.size(); ++i) {
        const QueueReport& a = report.queues[i];
        const QueueEstimate& s = estimate.queues[i];
        const std::pair<const std::optional<ClassMoments>*, const ClassEstimate*> classes[] = {
            {&a.internal, &s.internal}, {&a.external, &s.external}, {&a.arbitrary, &s.arbitrary}};
        const char* names[] = {"internal", "external", "arbitrary"};
        for (std::size_t c = 0; c < 3; ++c) {
            const auto& [analytic, sim] = classes[c];
            if (!analytic->has_value() || sim->count == 0) continue;
            add(i, names[c], "mean", (*analytic)->moments.mean, sim->mean);
            add(i, names[c], "sd", (*analytic)->moments.sd, sim->sd);
        }
        add(i, "cycle", "mean", a.cycle.moments.mean, s.cycle.mean);
    }
    return out;
}

}  // namespace roving
