#pragma once

#include "roving/arg_vector.hpp"
#include "roving/jet.hpp"
#include "roving/model.hpp"
#include "roving/options.hpp"

#include <cstddef>

namespace roving {

/// Σ(z) = Σ_j λ_j (1 - z_j)
[[nodiscard]] Jet sigma(const NetworkModel& model, const ArgVector& z);
/// Arrival term during a visit to queue i. Gated: own arrivals are marked by
/// z_G; exhaustive: own arrivals are left out (they join the busy period).
[[nodiscard]] Jet sigma_i(const NetworkModel& model, std::size_t i, const ArgVector& z);
/// Routing PGF after a service at queue i. Gated: returns to i are marked by z_G.
[[nodiscard]] Jet p_i(const NetworkModel& model, std::size_t i, const ArgVector& z);
/// Routing PGF of a customer leaving an exhaustive visit (self-returns removed).
[[nodiscard]] Jet p_exh_i(const NetworkModel& model, std::size_t i, const ArgVector& z);

struct CycleStep {
    ArgVector z;
    Jet factor;
};

/// One cycle of the laws of motion, walked backward from the beginning of
/// V_i to the beginning of the previous V_i:
///     PGF_Vi(z) = PGF_Vi(step.z) * step.factor.
/// `marker` is added to every arrival term; it accounts for a Poisson stream
/// of marked customers counted from the previous visit beginning.
[[nodiscard]] CycleStep cycle_map(const NetworkModel& model, std::size_t i, const ArgVector& z,
                                  const SolverOptions& options = {});
[[nodiscard]] CycleStep cycle_map(const NetworkModel& model, std::size_t i, const ArgVector& z, const Jet& marker,
                                  const SolverOptions& options = {});

struct Boundary {
    enum class Kind { VisitBegin, VisitEnd, SwitchBegin, SwitchEnd, ServiceBegin, ServiceEnd };
    Kind kind;
    std::size_t queue;
};

struct BoundaryPGFValue {
    Jet value;
    Boundary boundary;
};

/// Joint queue-length PGF at the beginning of V_i, as the infinite product of
/// cycle_map factors. Requires rho < 1; throws NoConvergence at the cycle cap.
[[nodiscard]] BoundaryPGFValue lb_visit(const NetworkModel& model, std::size_t i, const ArgVector& z,
                                        const SolverOptions& options = {});

/// PGF at any period or service boundary of queue i.
[[nodiscard]] BoundaryPGFValue boundary_pgf(const NetworkModel& model, const TrafficSolution& traffic,
                                            Boundary boundary, const ArgVector& z, const SolverOptions& options = {});

/// PGF at service beginnings of queue i, from the visit-boundary balance.
/// The quotient is 0/0 at z = 1; on jets the common zero is cancelled, on
/// scalars IndeterminateScalar is raised. DeadQueue when gamma_i = 0.
/// When the quotient vanishes identically along the jet path it is recovered
/// by tilting z_i and interpolating back.
[[nodiscard]] BoundaryPGFValue lb_service(const NetworkModel& model, const TrafficSolution& traffic, std::size_t i,
                                          const ArgVector& z, const SolverOptions& options = {});
/// PGF right after a service at queue i, before the customer is routed.
[[nodiscard]] BoundaryPGFValue lc_service(const NetworkModel& model, const TrafficSolution& traffic, std::size_t i,
                                          const ArgVector& z, const SolverOptions& options = {});

struct Period {
    enum class Kind { Visit, Switch };
    Kind kind;
    std::size_t queue;
};

/// Joint PGF of the queue lengths at an arbitrary instant of `period` and
/// LST of the residual part of the service (visit) or switch-over in progress.
/// omega = 0 gives the plain queue-length PGF during the period.
[[nodiscard]] Jet period_pgf(const NetworkModel& model, const TrafficSolution& traffic, Period period,
                             const ArgVector& z, const Jet& omega, const SolverOptions& options = {});

/// Joint queue-length PGF at an arbitrary instant: period PGFs mixed with
/// weights E[V_j]/E[C] and r_j/E[C]. Zero-weight periods are skipped. The
/// gate entry of `z` is ignored: customers behind a gate count for their queue.
[[nodiscard]] Jet arbitrary_epoch_pgf(const NetworkModel& model, const TrafficSolution& traffic, const ArgVector& z,
                                      const SolverOptions& options = {});

}  // namespace roving
