#pragma once

#include "roving/analysis.hpp"
#include "roving/model.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace roving {

/// xoshiro256** seeded through splitmix64. Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;
    explicit Xoshiro256(std::uint64_t seed) noexcept;
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
    result_type operator()() noexcept;

private:
    std::uint64_t s_[4];
};

struct SimConfig {
    std::uint64_t seed = 1;
    std::size_t warmup_cycles = 1000;
    std::size_t measured_cycles = 100000;
    std::size_t replications = 10;
    /// A replication stops and flags divergence once any queue holds this many customers.
    std::size_t queue_cap = 1000000;
};

/// Across-batch estimate. With two or more replications each replication is
/// one batch; a single replication is cut into ten batches of cycles.
struct Metric {
    double value = 0.0;
    double se = 0.0;       ///< standard error of `value`
    double ci_half = 0.0;  ///< 95% Student-t half-width
    std::size_t batches = 0;
};

struct ClassEstimate {
    Metric mean;
    Metric sd;
    Metric m2;
    std::uint64_t count = 0;
};

struct QueueEstimate {
    ClassEstimate internal;
    ClassEstimate external;
    ClassEstimate arbitrary;
    /// Time between successive visit beginnings of this queue.
    ClassEstimate cycle;
    /// Mean waits of external customers by the period they arrive in, indexed by the period's queue.
    std::vector<Metric> external_by_visit;
    std::vector<Metric> external_by_switch;
    /// Mean waits of routed customers by the queue that served them last.
    std::vector<Metric> internal_by_source;
    /// Mean length of every queue at this queue's visit beginnings.
    std::vector<Metric> length_at_visit_begin;
    /// Mean length of every queue right after a service here, before routing.
    std::vector<Metric> length_at_completion;
    /// Time-average number present, the customer in service included.
    Metric time_average_length;
};

struct SimEstimate {
    std::uint64_t model_hash = 0;
    SimConfig config;
    std::vector<QueueEstimate> queues;
    /// Departures from the network per unit time.
    Metric throughput;
    bool diverged = false;
};

/// Runs `config.replications` independent replications. Throws InvalidConfig
/// when measured_cycles < 100 or replications < 1.
[[nodiscard]] SimEstimate simulate(const NetworkModel& model, const SimConfig& config = {});

struct CompareOptions {
    double z_limit = 3.0;
    /// Negative control: shift every analytic value by this many standard errors.
    double perturb_sigmas = 0.0;
};

struct ComparisonRow {
    std::size_t queue;
    std::string cls;     ///< internal, external, arbitrary or cycle
    std::string metric;  ///< mean or sd
    double analytic;
    double simulated;
    double ci_half;
    double se;
    double z;
    double relative_gap;
    bool pass;
};

struct Comparison {
    std::vector<ComparisonRow> rows;
    bool pass = true;
    [[nodiscard]] double max_abs_z() const;
    [[nodiscard]] double max_relative_gap() const;
};

/// Row per queue, class and metric (mean, sd) present on both sides.
/// Throws ModelMismatch when the two inputs come from different models.
[[nodiscard]] Comparison compare(const WaitReport& report, const SimEstimate& estimate,
                                 const CompareOptions& options = {});

}  // namespace roving
