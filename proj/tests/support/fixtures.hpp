#pragma once

#include "roving/model.hpp"

#include <cstdint>

namespace roving::testing {

/// Waiting room feeding a service room with M overhead customers per transfer.
[[nodiscard]] NetworkModel takacs(int overhead, double mu = 1.0, double lambda = 1.0 / 6.0);

/// Two parallel first-stage queues feeding a tandem third queue, all exhaustive.
[[nodiscard]] NetworkModel katayama(double rho);

/// Single exhaustive queue with Exp(1) service and a Det(1) vacation.
[[nodiscard]] NetworkModel vacation(double lambda = 0.5);

struct FuzzOptions {
    std::size_t max_queues = 4;
    double min_rho = 0.05;
    double max_rho = 0.8;
    double min_exit = 0.2;
};

/// Random stable model: mixed disciplines and service families, every queue
/// reachable, every switch-over positive.
[[nodiscard]] NetworkModel fuzz_model(std::uint64_t seed, const FuzzOptions& options = {});

}  // namespace roving::testing
