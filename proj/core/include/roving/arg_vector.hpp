#pragma once

#include "roving/jet.hpp"

#include <cstddef>
#include <vector>

namespace roving {

/// PGF argument (z_1, ..., z_N, z_G); the last entry marks customers behind the gate.
using ArgVector = std::vector<Jet>;

[[nodiscard]] inline ArgVector ones(std::size_t queues, int order)
{
    return ArgVector(queues + 1, Jet(order, 1.0));
}

[[nodiscard]] inline std::size_t gate_position(const ArgVector& z) noexcept { return z.size() - 1; }

/// Element-wise product.
[[nodiscard]] inline ArgVector hadamard(ArgVector a, const ArgVector& b)
{
    for (std::size_t k = 0; k < a.size(); ++k) a[k] *= b[k];
    return a;
}

}  // namespace roving
