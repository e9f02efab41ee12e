#include "fixtures.hpp"

#include "roving/analysis.hpp"
#include "roving/error.hpp"
#include "roving/pgf.hpp"
#include "roving/sim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace roving {
namespace {

ArgVector random_point(std::size_t n, std::uint64_t seed)
{
    Xoshiro256 rng(seed);
    std::uniform_real_distribution<double> u(0.3, 1.0);
    ArgVector z = ones(n, 0);
    for (std::size_t j = 0; j < n; ++j) z[j] = Jet(0, u(rng));
    return z;
}

/// z with 1 - x at `queue` and ones elsewhere: the jet of the PGF gives -E[X_queue] at order 1.
ArgVector count_probe(std::size_t n, std::size_t queue, int order)
{
    ArgVector z = ones(n, order);
    z[queue] = 1.0 - Jet::variable(0.0, order);
    return z;
}

TEST(Routing, TakacsRoutingPgf)
{
    const NetworkModel m = testing::takacs(2);
    ArgVector z = ones(2, 0);
    z[0] = Jet(0, 0.4);
    z[1] = Jet(0, 0.7);
    z[2] = Jet(0, 0.2);
    EXPECT_DOUBLE_EQ(p_i(m, 1, z).value(), 2.0 / 3.0 + 0.4 / 3.0);
    EXPECT_DOUBLE_EQ(p_i(m, 0, z).value(), 0.7);
    // Exhaustive view drops self-routing and renormalizes: Q2 has no self-loop here.
    EXPECT_DOUBLE_EQ(p_exh_i(m, 1, z).value(), 2.0 / 3.0 + 0.4 / 3.0);
}

TEST(Routing, RoutingPgfsAreExactlyOneAtOne)
{
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const NetworkModel m = testing::fuzz_model(seed);
        const ArgVector z = ones(m.size(), 0);
        for (std::size_t i = 0; i < m.size(); ++i) {
            EXPECT_EQ(p_i(m, i, z).value(), 1.0L) << seed << " " << i;
            if (m.exhaustive(i)) EXPECT_EQ(p_exh_i(m, i, z).value(), 1.0L) << seed << " " << i;
        }
    }
}

TEST(Routing, GatedSelfLoopLandsBehindTheGate)
{
    NetworkSpec spec;
    spec.queues = {{0.3, Exponential{2.0}, Deterministic{1.0}, Discipline::Gated}};
    spec.routing = {{0.75, 0.25}};
    const NetworkModel m = validate(spec);
    ArgVector z = {Jet(0, 0.5), Jet(0, 0.1)};
    EXPECT_DOUBLE_EQ(p_i(m, 0, z).value(), 0.75 + 0.25 * 0.1);
    EXPECT_DOUBLE_EQ(sigma_i(m, 0, z).value(), 0.3 * 0.9);
    EXPECT_DOUBLE_EQ(sigma(m, z).value(), 0.3 * 0.5);
}

TEST(VisitBegin, NormalizedAtOne)
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const NetworkModel m = testing::fuzz_model(seed);
        for (std::size_t i = 0; i < m.size(); ++i) {
            EXPECT_NEAR(lb_visit(m, i, ones(m.size(), 0)).value.value(), 1.0, 1e-12);
        }
    }
}

TEST(VisitBegin, ProbabilityGeneratingBounds)
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const NetworkModel m = testing::fuzz_model(seed);
        const ArgVector z = random_point(m.size(), seed);
        for (std::size_t i = 0; i < m.size(); ++i) {
            const double v = lb_visit(m, i, z).value.value();
            EXPECT_GT(v, 0.0);
            EXPECT_LT(v, 1.0);
        }
    }
}

TEST(VisitBegin, CycleMapContracts)
{
    const NetworkModel m = testing::fuzz_model(5);
    ArgVector z = random_point(m.size(), 99);
    double previous = 1.0;
    for (int c = 0; c < 5; ++c) {
        const CycleStep step = cycle_map(m, 0, z);
        EXPECT_LE(step.factor.value(), 1.0);
        double distance = 0.0;
        for (std::size_t j = 0; j < m.size(); ++j) distance = std::max(distance, step.z[j].distance_to_constant(1.0));
        EXPECT_LT(distance, previous);
        previous = distance;
        z = step.z;
    }
}

TEST(Boundaries, ChainAroundTheCycle)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const NetworkModel m = testing::fuzz_model(seed);
        const TrafficSolution t = solve_traffic(m);
        const std::size_t n = m.size();
        ArgVector z = random_point(n, seed + 1);
        z[n] = Jet(0, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double begin = boundary_pgf(m, t, {Boundary::Kind::SwitchBegin, i}, z).value.value();
            const double end = boundary_pgf(m, t, {Boundary::Kind::SwitchEnd, i}, z).value.value();
            EXPECT_NEAR(end, begin * lst(m.queue(i).switchover, sigma(m, z).value()), 1e-12);
            const double next = boundary_pgf(m, t, {Boundary::Kind::VisitBegin, (i + 1) % n}, z).value.value();
            EXPECT_NEAR(next, end, 1e-11) << "seed " << seed << " queue " << i;
        }
    }
}

TEST(Boundaries, ServiceEpochsAreNormalized)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const NetworkModel m = testing::fuzz_model(seed);
        const TrafficSolution t = solve_traffic(m);
        for (std::size_t i = 0; i < m.size(); ++i) {
            const ArgVector z = count_probe(m.size(), i, 3);
            EXPECT_NEAR(lb_service(m, t, i, z).value[0], 1.0, 1e-10);
            EXPECT_NEAR(lc_service(m, t, i, z).value[0], 1.0, 1e-10);
            EXPECT_NEAR(arbitrary_epoch_pgf(m, t, z)[0], 1.0, 1e-10);
        }
    }
}

TEST(Boundaries, ServiceBeginLeavesOneCustomerInService)
{
    // A service departure leaves one fewer customer at the serving queue than the service start saw, plus arrivals.
    const NetworkModel m = testing::vacation(0.5);
    const TrafficSolution t = solve_traffic(m);
    const ArgVector z = count_probe(1, 0, 3);
    const double begin = -lb_service(m, t, 0, z).value[1];
    const double end = -lc_service(m, t, 0, z).value[1];
    EXPECT_NEAR(end - begin, 0.5 * 1.0 - 1.0, 1e-10);
}

TEST(Boundaries, DeadQueueHasNoServiceEpochs)
{
    NetworkSpec spec;
    spec.queues = {{0.5, Exponential{2.0}, Deterministic{1.0}, Discipline::Gated},
                   {0.0, Exponential{2.0}, Deterministic{1.0}, Discipline::Gated}};
    spec.routing = {{1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
    const NetworkModel m = validate(spec);
    try {
        (void)lb_service(m, solve_traffic(m), 1, count_probe(2, 1, 2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DeadQueue);
    }
}

TEST(ArbitraryEpoch, LittleLawOnFuzzModels)
{
    // Time-average number present equals gamma_i (E[W_i] + E[B_i]).
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const NetworkModel m = testing::fuzz_model(seed);
        const TrafficSolution t = solve_traffic(m);
        const WaitReport r = report(m, {.jet_order = 2, .omega_grid = {}, .solver = {}});
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (!(t.gamma[i] > 0.0)) continue;
            const double present = -arbitrary_epoch_pgf(m, t, count_probe(m.size(), i, 3))[1];
            const double expected = t.gamma[i] * (r.queues[i].arbitrary->moments.mean + mean(m.queue(i).service));
            EXPECT_NEAR(present, expected, 1e-8 * std::max(1.0, expected)) << "seed " << seed << " queue " << i;
        }
    }
}

TEST(VisitBegin, MeanLengthsMatchSimulation)
{
    const NetworkModel m = testing::katayama(0.3);
    const SimEstimate sim = simulate(m, {.seed = 11, .warmup_cycles = 1000, .measured_cycles = 40000,
                                         .replications = 10, .queue_cap = 1000000});
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            const double analytic = -lb_visit(m, i, count_probe(3, j, 2)).value[1];
            const Metric& s = sim.queues[i].length_at_visit_begin[j];
            EXPECT_LE(std::abs(analytic - s.value), 4.0 * s.se + 1e-12) << "visit " << i << " queue " << j;
        }
    }
}

TEST(ArbitraryEpoch, TimeAverageLengthMatchesSimulation)
{
    const NetworkModel m = testing::takacs(2);
    const TrafficSolution t = solve_traffic(m);
    const SimEstimate sim = simulate(m, {.seed = 12, .warmup_cycles = 1000, .measured_cycles = 40000,
                                         .replications = 10, .queue_cap = 1000000});
    for (std::size_t i = 0; i < 2; ++i) {
        const double analytic = -arbitrary_epoch_pgf(m, t, count_probe(2, i, 2))[1];
        const Metric& s = sim.queues[i].time_average_length;
        EXPECT_LE(std::abs(analytic - s.value), 4.0 * s.se) << "queue " << i;
    }
}

}  // namespace
}  // namespace roving
