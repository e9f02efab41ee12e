#pragma once

#include "roving/arg_vector.hpp"
#include "roving/jet.hpp"
#include "roving/model.hpp"
#include "roving/options.hpp"

#include <cstddef>
#include <vector>

namespace roving {

/// Joint PGF-LST BP(z, w) of an exhaustive busy period started by one customer:
/// the fixed point of x = z * Bexh(w + lambda (1 - x)), where Bexh is the
/// geometric(p_self) sum of service times.
///
/// Iterates on full jets from x = 1. Throws NoConvergence when the queue is
/// overloaded on its own (lambda E[B] / (1 - p_self) >= 1) or the iteration
/// cap is reached.
[[nodiscard]] Jet busy_period(const DistributionSpec& service, double lambda, double p_self, const Jet& z,
                              const Jet& omega, const SolverOptions& options = {});

/// Branching kernels relative to a target queue i, k steps backward in the cycle.
///
/// btilde[k]: LST of the service of a customer in queue i-k plus all his
/// descendants served before the next visit to queue i (k = 0..N).
/// ptilde[k]: the routing part of btilde[k] (k = 0..N).
/// rtilde[k]: switch-over R_{i-k} extended the same way (k = 0..N-1).
/// load[k]: omega + sum_{j<k} lambda_{i-j} (1 - btilde[j]), the argument at step k.
struct KernelTable {
    std::size_t target = 0;
    Jet omega;
    std::vector<Jet> btilde;
    std::vector<Jet> ptilde;
    std::vector<Jet> rtilde;
    std::vector<Jet> load;
};

/// Requires rho < 1 (UnstableSystem otherwise).
[[nodiscard]] KernelTable kernel_table(const NetworkModel& model, const TrafficSolution& traffic, std::size_t target,
                                       const Jet& omega, const SolverOptions& options = {});

/// Argument vectors for the transforms of a target queue i.
///
/// u[k], k < N: btilde_{k,i} at queue i-k, ones elsewhere.
/// u[N]: btilde_{0,i} at the gate position.
/// u_exh0: the bare service LST of queue i at position i.
/// gate[k]: head ⊗ u_{0,i-1} ⊗ ... ⊗ u_{k-1,i-1}, with head = u[0] for a
/// gated target and u_exh0 for an exhaustive one; for a gated target
/// gate[N] uses u[N] as head (an arrival during its own visit waits behind
/// the gate). Exhaustive targets only carry gate[0..N-1].
struct UVectors {
    std::size_t target = 0;
    std::vector<ArgVector> u;
    ArgVector u_exh0;
    std::vector<ArgVector> gate;
};

/// `previous` must be the table of the queue preceding `table.target`.
[[nodiscard]] UVectors u_vectors(const NetworkModel& model, const KernelTable& table, const KernelTable& previous);

/// ⊗_{k<N} u_{k,j} for the table of queue j: the cycle-time argument of queue j+1.
[[nodiscard]] ArgVector cycle_argument(const NetworkModel& model, const KernelTable& table);

}  // namespace roving
