#pragma once

namespace roving {

/// Iteration limits shared by the fixed-point and infinite-product solvers.
struct SolverOptions {
    double busy_tolerance = 1e-13;  ///< sup-norm between busy-period iterates
    long busy_max_iterations = 100000;
    double cycle_tolerance = 1e-13;  ///< distance of the PGF argument to all-ones
    long max_cycles = 1000000;
    double removable_tolerance = 1e-12;  ///< leading coefficients treated as zero in 0/0 cancellation
};

}  // namespace roving
