#include "fixtures.hpp"

#include "roving/sim.hpp"

#include <random>

namespace roving::testing {

NetworkModel takacs(int overhead, double mu, double lambda)
{
    NetworkSpec spec;
    spec.queues = {
        {lambda, Deterministic{0.0}, Erlang{overhead, mu}, Discipline::Gated},
        {0.0, Exponential{mu}, Deterministic{0.0}, Discipline::Gated},
    };
    spec.routing = {{0.0, 0.0, 1.0}, {2.0 / 3.0, 1.0 / 3.0, 0.0}};
    return validate(spec);
}

NetworkModel katayama(double rho)
{
    const double x = rho / 66.0;
    NetworkSpec spec;
    spec.queues = {
        {x, Deterministic{1.0}, Deterministic{0.0}, Discipline::Exhaustive},
        {10.0 * x, Deterministic{1.0}, Deterministic{2.0}, Discipline::Exhaustive},
        {0.0, Deterministic{5.0}, Deterministic{2.0}, Discipline::Exhaustive},
    };
    spec.routing = {{0.0, 0.0, 0.0, 1.0}, {0.0, 0.0, 0.0, 1.0}, {1.0, 0.0, 0.0, 0.0}};
    return validate(spec);
}

NetworkModel vacation(double lambda)
{
    NetworkSpec spec;
    spec.queues = {{lambda, Exponential{1.0}, Deterministic{1.0}, Discipline::Exhaustive}};
    spec.routing = {{1.0, 0.0}};
    return validate(spec);
}

namespace {

DistributionSpec random_law(Xoshiro256& rng, double mean)
{
    std::uniform_int_distribution<int> family(0, 4);
    switch (family(rng)) {
    case 0: return Deterministic{mean};
    case 1: return Exponential{1.0 / mean};
    case 2: {
        const int k = std::uniform_int_distribution<int>(2, 4)(rng);
        return Erlang{k, k / mean};
    }
    case 3: {
        const double p = std::uniform_real_distribution<double>(0.2, 0.8)(rng);
        const double m1 = mean * std::uniform_real_distribution<double>(0.3, 0.9)(rng);
        const double m2 = (mean - p * m1) / (1.0 - p);
        return HyperExponential{{p, 1.0 - p}, {1.0 / m1, 1.0 / m2}};
    }
    default: {
        const double shape = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
        return Gamma{shape, shape / mean};
    }
    }
}

}  // namespace

NetworkModel fuzz_model(std::uint64_t seed, const FuzzOptions& options)
{
    Xoshiro256 rng(seed * 7919 + 17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, options.max_queues)(rng);

    NetworkSpec spec;
    spec.queues.resize(n);
    spec.routing.assign(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        // Queue 0 always has external arrivals; others may be fed by routing only.
        const bool external = i == 0 || unit(rng) < 0.75;
        spec.queues[i].arrival_rate = external ? 0.2 + unit(rng) : 0.0;
        spec.queues[i].discipline = unit(rng) < 0.5 ? Discipline::Gated : Discipline::Exhaustive;
        spec.queues[i].switchover = random_law(rng, 0.1 + unit(rng));

        const double exit = options.min_exit + (1.0 - options.min_exit) * unit(rng);
        spec.routing[i][0] = exit;
        std::vector<double> w(n);
        double total = 0.0;
        for (auto& v : w) total += (v = unit(rng) < 0.6 ? unit(rng) : 0.0);
        if (total == 0.0) {
            spec.routing[i][0] = 1.0;
        } else {
            for (std::size_t j = 0; j < n; ++j) spec.routing[i][j + 1] = (1.0 - exit) * w[j] / total;
        }
    }
    // Make sure every queue without external arrivals is reachable from queue 0.
    for (std::size_t i = 1; i < n; ++i) {
        if (spec.queues[i].arrival_rate == 0.0 && spec.routing[0][i + 1] == 0.0) {
            const double move = 0.5 * spec.routing[0][0] * unit(rng) + 0.05 * spec.routing[0][0];
            spec.routing[0][0] -= move;
            spec.routing[0][i + 1] += move;
        }
    }
    for (auto& q : spec.queues) q.service = Deterministic{1.0};
    const NetworkModel unit_model = validate(spec);
    const TrafficSolution traffic = solve_traffic(unit_model);

    // Pick per-queue service means, then scale them to hit a random total load.
    const double rho = options.min_rho + (options.max_rho - options.min_rho) * unit(rng);
    std::vector<double> means(n);
    double raw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        means[i] = 0.2 + unit(rng);
        raw += traffic.gamma[i] * means[i];
    }
    for (std::size_t i = 0; i < n; ++i) spec.queues[i].service = random_law(rng, means[i] * rho / raw);
    return validate(spec);
}

}  // namespace roving::testing
