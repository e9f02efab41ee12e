#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>

namespace roving {

/// Coefficient type of jets. Extended precision keeps the rounding floor of
/// long products and 0/0 cancellations well below double resolution.
using Real = long double;

/// Truncated Taylor series f(x) = sum_k c[k] x^k, k = 0..order.
///
/// Coefficients are plain Taylor coefficients (not scaled by k!). An order-0
/// jet is an ordinary scalar, so the same code paths serve both pointwise
/// transform evaluation and moment extraction. Binary operations between
/// jets of different order yield the smaller order.
class Jet {
public:
    static constexpr int kMaxOrder = 15;

    Jet() = default;
    explicit Jet(int order, Real value = 0.0L);
    Jet(int order, std::initializer_list<Real> coeffs);

    /// The identity series x0 + x, i.e. the independent variable expanded at x0.
    [[nodiscard]] static Jet variable(Real x0, int order);
    [[nodiscard]] static Jet constant(Real value, int order) { return Jet(order, value); }

    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] Real value() const noexcept { return c_[0]; }
    [[nodiscard]] Real operator[](int k) const noexcept { return c_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] Real& operator[](int k) noexcept { return c_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] std::span<const Real> coeffs() const noexcept
    {
        return {c_.data(), static_cast<std::size_t>(order_) + 1};
    }

    /// Copy truncated to a lower order.
    [[nodiscard]] Jet truncated(int order) const;
    /// Number of leading coefficients with |c| <= tol (order+1 if all vanish).
    [[nodiscard]] int leading_zeros(double tol) const noexcept;
    /// max_k |c[k] - other[k]| over the common order.
    [[nodiscard]] double distance(const Jet& other) const noexcept;
    /// max_k |c[k] - (k == 0 ? v : 0)|.
    [[nodiscard]] double distance_to_constant(double v) const noexcept;

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(const Jet& o);
    Jet& operator/=(const Jet& o);
    Jet& operator+=(Real v) noexcept;
    Jet& operator-=(Real v) noexcept;
    Jet& operator*=(Real v) noexcept;
    Jet& operator/=(Real v) noexcept;

    friend Jet operator-(Jet a) noexcept
    {
        for (int k = 0; k <= a.order_; ++k) a.c_[static_cast<std::size_t>(k)] = -a.c_[static_cast<std::size_t>(k)];
        return a;
    }

private:
    std::array<Real, kMaxOrder + 1> c_{};
    int order_ = 0;
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(Jet a, const Jet& b) { return a *= b; }
inline Jet operator/(Jet a, const Jet& b) { return a /= b; }
inline Jet operator+(Jet a, Real v) { return a += v; }
inline Jet operator-(Jet a, Real v) { return a -= v; }
inline Jet operator*(Jet a, Real v) { return a *= v; }
inline Jet operator/(Jet a, Real v) { return a /= v; }
inline Jet operator+(Real v, Jet a) { return a += v; }
inline Jet operator-(Real v, const Jet& a) { return -a + v; }
inline Jet operator*(Real v, Jet a) { return a *= v; }
Jet operator/(Real v, const Jet& a);

[[nodiscard]] Jet exp(const Jet& a);
/// a^alpha for a[0] > 0.
[[nodiscard]] Jet pow(const Jet& a, Real alpha);

/// Series quotient that cancels common leading zeros of `num` and `den`.
///
/// Coefficients with magnitude <= tol count as zero. Each cancelled zero
/// lowers the result order by one. Throws PoleDetected when `den` has more
/// leading zeros than `num`, and IndeterminateScalar when an order-0 input
/// is 0/0.
[[nodiscard]] Jet jet_div(const Jet& num, const Jet& den, double tol = 1e-12);

std::ostream& operator<<(std::ostream& os, const Jet& j);

}  // namespace roving
