#include "roving/transforms.hpp"

#include "roving/error.hpp"

#include <cmath>
#include <string>
#include <type_traits>

namespace roving {

namespace {

constexpr double kArgumentSlack = 1e-12;
constexpr double kRemovableTolerance = 1e-12;
constexpr double kNormalizationTolerance = 1e-9;

void check_argument(const Jet& s)
{
    if (s[0] < -kArgumentSlack) {
        throw Error(ErrorCode::NegativeArgument, "transform argument " + std::to_string(s[0]) + " < 0");
    }
}

}  // namespace

Jet lst(const DistributionSpec& dist, const Jet& s)
{
    check_argument(s);
    return std::visit(
        [&s](const auto& d) -> Jet {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Deterministic>) {
                return exp(-d.value * s);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return 1.0 / (1.0 + s / d.rate);
            } else if constexpr (std::is_same_v<T, Erlang>) {
                return pow(1.0 + s / d.rate, -static_cast<double>(d.phases));
            } else if constexpr (std::is_same_v<T, HyperExponential>) {
                // 1 - sum w_j s/(r_j + s): exactly one at s = 0 even if the weights sum to one only up to rounding.
                Jet total(s.order(), 1.0);
                for (std::size_t j = 0; j < d.weights.size(); ++j) {
                    const Jet scaled = s / d.rates[j];
                    total -= d.weights[j] * (scaled / (1.0 + scaled));
                }
                return total;
            } else {
                return pow(1.0 + s / d.rate, -d.shape);
            }
        },
        dist);
}

double lst(const DistributionSpec& dist, double s)
{
    return lst(dist, Jet(0, s)).value();
}

Jet lst_derivative(const DistributionSpec& dist, const Jet& s)
{
    check_argument(s);
    return std::visit(
        [&s](const auto& d) -> Jet {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Deterministic>) {
                return -d.value * exp(-d.value * s);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return -pow(1.0 + s / d.rate, -2.0) / d.rate;
            } else if constexpr (std::is_same_v<T, Erlang>) {
                return -pow(1.0 + s / d.rate, -static_cast<double>(d.phases) - 1.0) * (d.phases / d.rate);
            } else if constexpr (std::is_same_v<T, HyperExponential>) {
                Jet total(s.order(), 0.0);
                for (std::size_t j = 0; j < d.weights.size(); ++j) {
                    total -= pow(1.0 + s / d.rates[j], -2.0) * (d.weights[j] / d.rates[j]);
                }
                return total;
            } else {
                return -pow(1.0 + s / d.rate, -d.shape - 1.0) * (d.shape / d.rate);
            }
        },
        dist);
}

Jet lst_geometric(const DistributionSpec& dist, double p_self, const Jet& s)
{
    const Jet x = lst(dist, s);
    if (p_self == 0.0) return x;
    const Real keep = 1.0L - p_self;
    return keep * x / (1.0L - p_self * x);
}

Jet past_residual(const DistributionSpec& dist, const Jet& wp, const Jet& wr)
{
    const double m = mean(dist);
    if (!(m > 0.0)) throw Error(ErrorCode::ZeroMeanDistribution, "past/residual split of a zero-length interval");
    const Jet diff = wr - wp;
    if (diff.leading_zeros(kRemovableTolerance) > diff.order()) {
        // wp == wr: the divided difference degenerates to -X'(w) / E[X].
        return -lst_derivative(dist, wp) / m;
    }
    return jet_div(lst(dist, wp) - lst(dist, wr), diff * m, kRemovableTolerance);
}

double past_residual(const DistributionSpec& dist, double wp, double wr)
{
    return past_residual(dist, Jet(0, wp), Jet(0, wr)).value();
}

Moments moments_from_jet(const Jet& lst_jet, int upto)
{
    if (std::abs(lst_jet[0] - 1.0) > kNormalizationTolerance) {
        throw Error(ErrorCode::NotNormalized, "LST jet has constant term " + std::to_string(lst_jet[0]));
    }
    if (upto > lst_jet.order()) {
        throw Error(ErrorCode::InvalidConfig, "jet of order " + std::to_string(lst_jet.order()) +
                                                  " cannot give moment " + std::to_string(upto));
    }
    Moments m;
    double factorial = 1.0;
    for (int k = 1; k <= upto; ++k) {
        factorial *= k;
        m.raw.push_back((k % 2 ? -1.0 : 1.0) * factorial * lst_jet[k]);
    }
    if (upto >= 1) m.mean = m.raw[0];
    if (upto >= 2) {
        m.variance = m.raw[1] - m.mean * m.mean;
        m.sd = std::sqrt(std::max(m.variance, 0.0));
    }
    return m;
}

}  // namespace roving
