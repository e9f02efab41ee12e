#include "fixtures.hpp"

#include "roving/analysis.hpp"
#include "roving/error.hpp"
#include "roving/sim.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace roving {
namespace {

// Per-row limit for checks that run many rows against one fixed seed: with ten
// replications z is Student-t with 9 degrees of freedom, whose 4.5 quantile is
// exceeded with probability about 0.0015.
constexpr double kRowZ = 4.5;

SimConfig config(std::uint64_t seed, std::size_t cycles, std::size_t reps = 10)
{
    return {.seed = seed, .warmup_cycles = 500, .measured_cycles = cycles, .replications = reps, .queue_cap = 1000000};
}

void expect_within(double analytic, const Metric& m, const std::string& what)
{
    ASSERT_GT(m.batches, 1u) << what;
    EXPECT_LE(std::abs(analytic - m.value), kRowZ * m.se) << what << ": analytic " << analytic << " sim " << m.value
                                                          << " se " << m.se;
}

/// Every conditional external and internal mean against the simulation's period tags.
void check_conditionals(const NetworkModel& m, std::uint64_t seed, std::size_t cycles)
{
    const TrafficSolution t = solve_traffic(m);
    const SimEstimate sim = simulate(m, config(seed, cycles));
    const AnalysisContext ctx(m, Jet::variable(0.0, 3));
    for (std::size_t i = 0; i < m.size(); ++i) {
        const QueueEstimate& q = sim.queues[i];
        for (const ExternalPeriod& p : external_periods(m, t, i)) {
            if (m.lambda(i) == 0.0 || p.weight <= 1e-3) continue;
            const std::size_t j = m.back(i, p.k);
            const Jet w = p.visit ? wait_visit(ctx, i, p.k) : wait_switch(ctx, i, p.k);
            const Metric& s = p.visit ? q.external_by_visit[j] : q.external_by_switch[j];
            expect_within(moments_from_jet(w, 1).mean, s,
                          "queue " + std::to_string(i) + (p.visit ? " visit " : " switch ") + std::to_string(j));
        }
        if (t.gamma[i] - m.lambda(i) <= 1e-9) continue;
        for (const InternalSource& s : internal_sources(m, t, i)) {
            if (s.weight <= 1e-3) continue;
            const std::size_t j = m.back(i, s.k);
            expect_within(moments_from_jet(wait_internal_cond(ctx, i, s.k), 1).mean, q.internal_by_source[j],
                          "queue " + std::to_string(i) + " internal from " + std::to_string(j));
        }
    }
}

TEST(Rng, DeterministicAndSeedSensitive)
{
    Xoshiro256 a(5), b(5), c(6);
    for (int k = 0; k < 100; ++k) {
        const auto x = a();
        EXPECT_EQ(x, b());
        EXPECT_NE(x, c());
    }
}

TEST(Simulate, SameSeedSameEstimate)
{
    const NetworkModel m = testing::fuzz_model(4);
    const SimEstimate a = simulate(m, config(7, 2000, 3));
    const SimEstimate b = simulate(m, config(7, 2000, 3));
    const SimEstimate c = simulate(m, config(8, 2000, 3));
    for (std::size_t i = 0; i < m.size(); ++i) {
        EXPECT_EQ(a.queues[i].arbitrary.mean.value, b.queues[i].arbitrary.mean.value);
        EXPECT_EQ(a.queues[i].arbitrary.count, b.queues[i].arbitrary.count);
        EXPECT_EQ(a.queues[i].cycle.mean.value, b.queues[i].cycle.mean.value);
    }
    EXPECT_NE(a.queues[0].cycle.mean.value, c.queues[0].cycle.mean.value);
    EXPECT_EQ(a.model_hash, model_hash(m));
}

TEST(Simulate, EmptyNetworkCyclesThroughSwitchovers)
{
    NetworkSpec spec;
    spec.queues = {{0.0, Exponential{1.0}, Deterministic{1.5}, Discipline::Gated},
                   {0.0, Exponential{1.0}, Deterministic{0.5}, Discipline::Exhaustive}};
    spec.routing = {{1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
    const SimEstimate s = simulate(validate(spec), config(1, 200, 2));
    for (const QueueEstimate& q : s.queues) {
        EXPECT_NEAR(q.cycle.mean.value, 2.0, 1e-12);
        EXPECT_NEAR(q.cycle.sd.value, 0.0, 1e-9);
        EXPECT_EQ(q.arbitrary.count, 0u);
    }
}

TEST(Simulate, VacationMean)
{
    const SimEstimate s = simulate(testing::vacation(0.5), config(3, 20000));
    expect_within(1.5, s.queues[0].external.mean, "vacation wait");
    expect_within(2.0, s.queues[0].cycle.mean, "vacation cycle");
    EXPECT_EQ(s.queues[0].internal.count, 0u);
}

TEST(Simulate, TakacsMeans)
{
    const SimEstimate s = simulate(testing::takacs(1), config(4, 20000));
    expect_within(1.0, s.queues[0].arbitrary.mean, "W1");
    expect_within(4.0 / 3.0, s.queues[1].arbitrary.mean, "W2");
    EXPECT_EQ(s.queues[1].external.count, 0u);
    EXPECT_EQ(s.queues[1].internal.count, s.queues[1].arbitrary.count);
}

TEST(Simulate, CountsThroughputAndCycle)
{
    const NetworkModel m = testing::fuzz_model(9);
    const TrafficSolution t = solve_traffic(m);
    const SimEstimate s = simulate(m, config(5, 20000));
    double lambda = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        lambda += m.lambda(i);
        const QueueEstimate& q = s.queues[i];
        EXPECT_EQ(q.arbitrary.count, q.internal.count + q.external.count);
        expect_within(t.mean_cycle, q.cycle.mean, "cycle " + std::to_string(i));
        // Little's law inside the simulation, the customer in service included.
        const double present = t.gamma[i] * (q.arbitrary.mean.value + mean(m.queue(i).service));
        EXPECT_NEAR(q.time_average_length.value, present, 0.02 * present + 3.0 * q.time_average_length.se);
    }
    expect_within(lambda, s.throughput, "throughput");
}

TEST(Simulate, SingleReplicationUsesBatches)
{
    const SimEstimate s = simulate(testing::vacation(0.5), config(2, 5000, 1));
    EXPECT_EQ(s.queues[0].external.mean.batches, 10u);
    EXPECT_GT(s.queues[0].external.mean.ci_half, 0.0);
    EXPECT_TRUE(std::isfinite(s.queues[0].external.mean.ci_half));
}

TEST(Simulate, InvalidConfigAndDivergence)
{
    const NetworkModel m = testing::vacation(0.5);
    try {
        (void)simulate(m, config(1, 10));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
    }
    try {
        (void)simulate(m, config(1, 1000, 0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
    }
    SimConfig c = config(1, 1000, 2);
    c.queue_cap = 500;
    EXPECT_TRUE(simulate(testing::vacation(1.5), c).diverged);
    EXPECT_FALSE(simulate(m, config(1, 1000, 2)).diverged);
}

TEST(Conditionals, TakacsRoutedQueue) { check_conditionals(testing::takacs(2), 21, 20000); }

TEST(Conditionals, ExhaustivePair)
{
    NetworkSpec spec;
    spec.queues = {{0.15, Exponential{1.0}, Deterministic{0.5}, Discipline::Exhaustive},
                   {0.1, Erlang{2, 2.0}, Exponential{2.0}, Discipline::Exhaustive}};
    spec.routing = {{0.6, 0.1, 0.3}, {0.7, 0.2, 0.1}};
    check_conditionals(validate(scale_to_load(spec, 0.4)), 22, 20000);
}

TEST(Conditionals, GatedSelfLoop)
{
    NetworkSpec spec;
    spec.queues = {{0.3, Exponential{2.0}, Gamma{2.0, 2.0}, Discipline::Gated}};
    spec.routing = {{0.7, 0.3}};
    check_conditionals(validate(spec), 23, 20000);
}

TEST(Conditionals, FuzzModels)
{
    for (std::uint64_t seed : {2u, 6u, 13u}) {
        SCOPED_TRACE("fuzz seed " + std::to_string(seed));
        check_conditionals(testing::fuzz_model(seed), 100 + seed, 10000);
    }
}

TEST(Compare, PassesOnMatchingModel)
{
    const NetworkModel m = testing::katayama(0.5);
    const WaitReport r = report(m, {.jet_order = 2, .omega_grid = {}, .solver = {}});
    const SimEstimate s = simulate(m, config(31, 20000));
    const Comparison c = compare(r, s);
    EXPECT_FALSE(c.rows.empty());
    EXPECT_LE(c.max_abs_z(), kRowZ);
    for (const ComparisonRow& row : c.rows) EXPECT_EQ(row.pass, std::abs(row.z) <= 3.0);

    const Comparison shifted = compare(r, s, {.z_limit = 3.0, .perturb_sigmas = 10.0});
    EXPECT_FALSE(shifted.pass);
    EXPECT_GE(shifted.max_abs_z(), 10.0 - kRowZ);
}

TEST(Compare, RejectsForeignEstimates)
{
    const WaitReport r = report(testing::katayama(0.5), {.jet_order = 2, .omega_grid = {}, .solver = {}});
    const SimEstimate s = simulate(testing::katayama(0.4), config(1, 200, 2));
    try {
        (void)compare(r, s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ModelMismatch);
    }
}

}  // namespace
}  // namespace roving
