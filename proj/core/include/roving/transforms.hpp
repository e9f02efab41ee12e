#pragma once

#include "roving/jet.hpp"
#include "roving/model.hpp"

#include <vector>

namespace roving {

/// LST E[exp(-s X)] of `dist`, evaluated on a jet (or order-0 scalar).
/// Throws NegativeArgument when the constant term of `s` is negative.
[[nodiscard]] Jet lst(const DistributionSpec& dist, const Jet& s);
[[nodiscard]] double lst(const DistributionSpec& dist, double s);

/// d/ds of the LST, composed with `s`.
[[nodiscard]] Jet lst_derivative(const DistributionSpec& dist, const Jet& s);

/// LST of a geometric(p_self) sum of copies of X: (1-p) X(s) / (1 - p X(s)).
[[nodiscard]] Jet lst_geometric(const DistributionSpec& dist, double p_self, const Jet& s);

/// Joint LST of the past and residual part of an interval of law `dist`
/// observed at a random time:
///     (X(wp) - X(wr)) / ((wr - wp) E[X]).
/// Throws ZeroMeanDistribution when E[X] = 0.
[[nodiscard]] Jet past_residual(const DistributionSpec& dist, const Jet& wp, const Jet& wr);
[[nodiscard]] double past_residual(const DistributionSpec& dist, double wp, double wr);

struct Moments {
    std::vector<double> raw;  ///< raw[k-1] = E[X^k]
    double mean = 0.0;
    double variance = 0.0;
    double sd = 0.0;
};

/// Raw moments m_k = (-1)^k k! c_k of an LST jet at 0, k = 1..upto.
/// Throws NotNormalized unless |c_0 - 1| <= 1e-9.
[[nodiscard]] Moments moments_from_jet(const Jet& lst_jet, int upto);

}  // namespace roving
