#include "roving/jet.hpp"

#include "roving/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace roving {

namespace {

void check_order(int order)
{
    if (order < 0 || order > Jet::kMaxOrder) {
        throw Error(ErrorCode::InvalidConfig, "jet order " + std::to_string(order) + " outside [0, " +
                                                  std::to_string(Jet::kMaxOrder) + "]");
    }
}

}  // namespace

Jet::Jet(int order, Real value) : order_(order)
{
    check_order(order);
    c_[0] = value;
}

Jet::Jet(int order, std::initializer_list<Real> coeffs) : order_(order)
{
    check_order(order);
    std::size_t k = 0;
    for (Real v : coeffs) {
        if (k > static_cast<std::size_t>(order)) break;
        c_[k++] = v;
    }
}

Jet Jet::variable(Real x0, int order)
{
    Jet j(order, x0);
    if (order >= 1) j.c_[1] = 1.0;
    return j;
}

Jet Jet::truncated(int order) const
{
    Jet j(std::min(order, order_));
    std::copy_n(c_.begin(), j.order_ + 1, j.c_.begin());
    return j;
}

int Jet::leading_zeros(double tol) const noexcept
{
    int k = 0;
    while (k <= order_ && std::abs(c_[static_cast<std::size_t>(k)]) <= tol) ++k;
    return k;
}

double Jet::distance(const Jet& other) const noexcept
{
    const int n = std::min(order_, other.order_);
    Real d = 0.0L;
    for (int k = 0; k <= n; ++k) d = std::max(d, std::abs((*this)[k] - other[k]));
    return d;
}

double Jet::distance_to_constant(double v) const noexcept
{
    Real d = std::abs(c_[0] - v);
    for (int k = 1; k <= order_; ++k) d = std::max(d, std::abs((*this)[k]));
    return d;
}

Jet& Jet::operator+=(const Jet& o)
{
    order_ = std::min(order_, o.order_);
    for (int k = 0; k <= order_; ++k) (*this)[k] += o[k];
    return *this;
}

Jet& Jet::operator-=(const Jet& o)
{
    order_ = std::min(order_, o.order_);
    for (int k = 0; k <= order_; ++k) (*this)[k] -= o[k];
    return *this;
}

Jet& Jet::operator*=(const Jet& o)
{
    const int n = std::min(order_, o.order_);
    // Highest coefficient first, so every product still reads the old low coefficients.
    for (int k = n; k >= 0; --k) {
        Real s = 0.0L;
        for (int j = 0; j <= k; ++j) s += (*this)[j] * o[k - j];
        (*this)[k] = s;
    }
    for (int k = n + 1; k <= order_; ++k) (*this)[k] = 0.0L;
    order_ = n;
    return *this;
}

Jet& Jet::operator/=(const Jet& o)
{
    if (&o == this) {
        const int n = order_;
        *this = Jet(n, 1.0L);
        return *this;
    }
    const int n = std::min(order_, o.order_);
    const Real d0 = o[0];
    // In place: q[k] only needs q[0..k-1], already stored below k.
    for (int k = 0; k <= n; ++k) {
        Real s = (*this)[k];
        for (int j = 1; j <= k; ++j) s -= o[j] * (*this)[k - j];
        (*this)[k] = s / d0;
    }
    for (int k = n + 1; k <= order_; ++k) (*this)[k] = 0.0L;
    order_ = n;
    return *this;
}

Jet& Jet::operator+=(Real v) noexcept
{
    c_[0] += v;
    return *this;
}

Jet& Jet::operator-=(Real v) noexcept
{
    c_[0] -= v;
    return *this;
}

Jet& Jet::operator*=(Real v) noexcept
{
    for (int k = 0; k <= order_; ++k) (*this)[k] *= v;
    return *this;
}

Jet& Jet::operator/=(Real v) noexcept
{
    for (int k = 0; k <= order_; ++k) (*this)[k] /= v;
    return *this;
}

Jet operator/(Real v, const Jet& a)
{
    return Jet(a.order(), v) / a;
}

Jet exp(const Jet& a)
{
    Jet e(a.order(), std::exp(a[0]));
    for (int k = 1; k <= a.order(); ++k) {
        Real s = 0.0;
        for (int j = 1; j <= k; ++j) s += j * a[j] * e[k - j];
        e[k] = s / k;
    }
    return e;
}

Jet pow(const Jet& a, Real alpha)
{
    if (!(a[0] > 0.0)) throw Error(ErrorCode::NegativeArgument, "pow of a jet needs a positive constant term");
    Jet p(a.order(), std::pow(a[0], alpha));
    for (int k = 1; k <= a.order(); ++k) {
        Real s = 0.0;
        for (int j = 1; j <= k; ++j) s += ((alpha + 1.0) * j - k) * a[j] * p[k - j];
        p[k] = s / (k * a[0]);
    }
    return p;
}

Jet jet_div(const Jet& num, const Jet& den, double tol)
{
    const int zd = den.leading_zeros(tol);
    if (zd == 0) return num / den;
    if (zd > den.order()) {
        if (num.order() == 0 && den.order() == 0 && std::abs(num[0]) <= tol) {
            throw Error(ErrorCode::IndeterminateScalar, "0/0 at scalar precision; evaluate on jets");
        }
        throw Error(ErrorCode::PoleDetected, "denominator vanishes to working order");
    }
    const int zn = num.leading_zeros(tol);
    if (zn < zd) throw Error(ErrorCode::PoleDetected, "denominator has more leading zeros than numerator");
    const int order = std::min(num.order(), den.order()) - zd;
    Jet n(order), d(order);
    for (int k = 0; k <= order; ++k) {
        n[k] = num[k + zd];
        d[k] = den[k + zd];
    }
    return n / d;
}

std::ostream& operator<<(std::ostream& os, const Jet& j)
{
    os << '[';
    for (int k = 0; k <= j.order(); ++k) os << (k ? ", " : "") << j[k];
    return os << ']';
}

}  // namespace roving
