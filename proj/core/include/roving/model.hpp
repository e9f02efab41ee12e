#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace roving {

struct Deterministic {
    double value = 0.0;
};
struct Exponential {
    double rate = 1.0;
};
struct Erlang {
    int phases = 1;
    double rate = 1.0;
};
struct HyperExponential {
    std::vector<double> weights;
    std::vector<double> rates;
};
struct Gamma {
    double shape = 1.0;
    double rate = 1.0;
};

/// Service and switch-over time laws. Every family has a closed-form LST.
using DistributionSpec = std::variant<Deterministic, Exponential, Erlang, HyperExponential, Gamma>;

/// Throws NegativeParameter or InvalidConfig when the family parameters are out of range.
void check_distribution(const DistributionSpec& dist);
/// Raw moment E[X^k], k >= 1.
[[nodiscard]] double moment(const DistributionSpec& dist, int k);
[[nodiscard]] inline double mean(const DistributionSpec& dist) { return moment(dist, 1); }

enum class Discipline { Gated, Exhaustive };

struct QueueSpec {
    double arrival_rate = 0.0;
    DistributionSpec service = Deterministic{0.0};
    /// Switch-over R_i incurred when leaving this queue for the next one.
    DistributionSpec switchover = Deterministic{0.0};
    Discipline discipline = Discipline::Gated;
};

/// Unvalidated network description as read from a config.
///
/// `routing[i]` has n+1 entries: the exit probability first, then the
/// probabilities of moving to queue 1..n.
struct NetworkSpec {
    std::vector<QueueSpec> queues;
    std::vector<std::vector<double>> routing;
};

class NetworkModel;

/// Checks every invariant of a network and returns the immutable model.
/// Throws RowSumError, SingularRouting, NegativeParameter or InvalidConfig.
[[nodiscard]] NetworkModel validate(NetworkSpec raw);

/// A validated network. Queue indices are 0-based and cyclic.
class NetworkModel {
public:
    [[nodiscard]] std::size_t size() const noexcept { return spec_.queues.size(); }
    [[nodiscard]] const QueueSpec& queue(std::size_t i) const { return spec_.queues[i]; }
    [[nodiscard]] std::span<const QueueSpec> queues() const noexcept { return spec_.queues; }
    [[nodiscard]] const NetworkSpec& spec() const noexcept { return spec_; }

    [[nodiscard]] double lambda(std::size_t i) const { return spec_.queues[i].arrival_rate; }
    [[nodiscard]] bool exhaustive(std::size_t i) const
    {
        return spec_.queues[i].discipline == Discipline::Exhaustive;
    }
    /// p_{i,0}
    [[nodiscard]] double exit_probability(std::size_t i) const { return spec_.routing[i][0]; }
    /// p_{i,j} between queues.
    [[nodiscard]] double route(std::size_t from, std::size_t to) const { return spec_.routing[from][to + 1]; }

    /// Queue reached by stepping `k` positions backward from `i` in the cyclic order.
    [[nodiscard]] std::size_t back(std::size_t i, std::size_t k) const noexcept
    {
        const std::size_t n = size();
        return (i + n - k % n) % n;
    }

private:
    friend NetworkModel validate(NetworkSpec raw);
    explicit NetworkModel(NetworkSpec spec) : spec_(std::move(spec)) {}

    NetworkSpec spec_;
};

struct TrafficSolution {
    std::vector<double> gamma;  ///< total arrival rate per queue
    std::vector<double> rho_i;  ///< per-queue load gamma_i * b_i
    double rho = 0.0;
    double r = 0.0;   ///< mean total switch-over time per cycle
    double r2 = 0.0;  ///< second moment of the total switch-over time
    double mean_cycle = 0.0;
    [[nodiscard]] bool stable() const noexcept { return rho < 1.0; }
};

/// Solves gamma = lambda + P^T gamma directly. Stability is reported, not enforced.
[[nodiscard]] TrafficSolution solve_traffic(const NetworkModel& model);

/// Copy of `raw` with every external arrival rate scaled so the total load equals `rho`.
/// Throws NoExternalArrivals when all rates are zero.
[[nodiscard]] NetworkSpec scale_to_load(NetworkSpec raw, double rho);

/// Stable 64-bit fingerprint of the model parameters (FNV-1a).
[[nodiscard]] std::uint64_t model_hash(const NetworkModel& model);

}  // namespace roving
