#pragma once

#include "roving/jet.hpp"
#include "roving/kernels.hpp"
#include "roving/model.hpp"
#include "roving/options.hpp"
#include "roving/transforms.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace roving {

/// Kernel tables and argument vectors of every queue for one omega.
///
/// Every waiting-time transform below is evaluated against a context. Build
/// it with a jet omega = Jet::variable(0, m) for moments, or an order-0 jet
/// for pointwise LST values (omega > 0).
class AnalysisContext {
public:
    /// Throws UnstableSystem (rho >= 1) or ZeroSwitchover (no switch-over time at all).
    AnalysisContext(const NetworkModel& model, const Jet& omega, const SolverOptions& options = {});

    [[nodiscard]] const NetworkModel& model() const noexcept { return model_; }
    [[nodiscard]] const TrafficSolution& traffic() const noexcept { return traffic_; }
    [[nodiscard]] const SolverOptions& options() const noexcept { return options_; }
    [[nodiscard]] const Jet& omega() const noexcept { return omega_; }
    [[nodiscard]] const KernelTable& table(std::size_t i) const { return tables_[i]; }
    [[nodiscard]] const UVectors& vectors(std::size_t i) const { return vectors_[i]; }
    /// Table of the queue preceding i, whose kernels all waiting formulas of i use.
    [[nodiscard]] const KernelTable& previous(std::size_t i) const { return tables_[model_.back(i, 1)]; }

private:
    NetworkModel model_;
    TrafficSolution traffic_;
    SolverOptions options_;
    Jet omega_;
    std::vector<KernelTable> tables_;
    std::vector<UVectors> vectors_;
};

/// Internal arrival source of a target queue, k steps back, with its mixing weight.
struct InternalSource {
    std::size_t k;
    double weight;
};

/// Cycle period in which an external customer may arrive, k steps back from the target.
struct ExternalPeriod {
    bool visit;
    std::size_t k;
    double weight;
};

/// Index sets of the waiting-time mixtures. Gated targets: internal k = 1..N,
/// visits and switch-overs k = 1..N. Exhaustive targets: internal k = 0..N-1,
/// visits k = 0..N-1, switch-overs k = 1..N.
[[nodiscard]] std::vector<InternalSource> internal_sources(const NetworkModel& model, const TrafficSolution& traffic,
                                                           std::size_t i);
[[nodiscard]] std::vector<ExternalPeriod> external_periods(const NetworkModel& model, const TrafficSolution& traffic,
                                                           std::size_t i);

/// LST of the cycle time C_i via the branching kernels.
[[nodiscard]] Jet cycle_time(const AnalysisContext& ctx, std::size_t i);

/// LST of C_i from the visit-beginning PGF with marked external arrivals of
/// queue i evaluated at 1 - omega/lambda_i (distributional Little's law).
/// Uses only the laws of motion, not the kernel tables. Any omega >= 0 is
/// allowed: a marked argument below 0 still keeps every LST argument >= 0.
/// Throws NoExternalArrivals (lambda_i = 0) or NegativeArgument (omega < 0).
[[nodiscard]] Jet cycle_time_little(const NetworkModel& model, std::size_t i, const Jet& omega,
                                    const SolverOptions& options = {});
[[nodiscard]] double cycle_time_little(const NetworkModel& model, std::size_t i, double omega,
                                       const SolverOptions& options = {});

/// Waiting time of an internal customer routed to i after a service at i-k.
[[nodiscard]] Jet wait_internal_cond(const AnalysisContext& ctx, std::size_t i, std::size_t k);
[[nodiscard]] Jet wait_internal(const AnalysisContext& ctx, std::size_t i);
/// External customer of queue i arriving during the switch-over R_{i-k}.
[[nodiscard]] Jet wait_switch(const AnalysisContext& ctx, std::size_t i, std::size_t k);
/// External customer of queue i arriving during the visit V_{i-k}.
[[nodiscard]] Jet wait_visit(const AnalysisContext& ctx, std::size_t i, std::size_t k);
[[nodiscard]] Jet wait_external(const AnalysisContext& ctx, std::size_t i);
[[nodiscard]] Jet wait_arbitrary(const AnalysisContext& ctx, std::size_t i);

struct ReportConfig {
    int jet_order = 4;            ///< number of moments carried (raw moments 1..jet_order)
    std::vector<double> omega_grid;  ///< pointwise LST samples; empty for none
    SolverOptions solver;
};

/// 32 log-spaced points in [1e-3, 1e1].
[[nodiscard]] std::vector<double> default_omega_grid();

struct ClassMoments {
    Moments moments;
    Jet lst;  ///< LST jet at omega = 0
};

struct LstSample {
    double omega;
    std::optional<double> arbitrary;
    std::optional<double> internal;
    std::optional<double> external;
    std::optional<double> cycle;
    std::optional<double> cycle_little;
};

struct QueueReport {
    std::size_t queue;
    double internal_weight;  ///< (gamma_i - lambda_i) / gamma_i
    double external_weight;  ///< lambda_i / gamma_i
    std::optional<ClassMoments> internal;
    std::optional<ClassMoments> external;
    std::optional<ClassMoments> arbitrary;
    ClassMoments cycle;
    std::vector<LstSample> samples;
    /// max over grid points of |C_i - C_i (Little)|, when any point qualifies.
    std::optional<double> little_delta;
};

struct WaitReport {
    std::uint64_t model_hash = 0;
    TrafficSolution traffic;
    int jet_order = 4;
    std::vector<QueueReport> queues;
};

/// Full moment table at omega = 0 plus optional LST samples. Requires rho < 1.
[[nodiscard]] WaitReport report(const NetworkModel& model, const ReportConfig& config = {});

}  // namespace roving
