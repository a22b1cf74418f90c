#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "crgeo/expr.hpp"

namespace crgeo {

/// Thrown when a derivative is requested beyond the truncation order a jet carries.
class InsufficientOrder : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kMaxJetOrder = 10;
inline constexpr int kDefaultJetOrder = 6;

using MultiIndex = std::array<int, 3>;

/// Number of monomials of total degree <= order in three variables: C(order+3, 3).
constexpr std::size_t jet_size(int order) {
    const auto n = static_cast<std::size_t>(order);
    return (n + 1) * (n + 2) * (n + 3) / 6;
}

/// Truncated multivariate Taylor polynomial in three variables about a base point.
///
/// Coefficients are stored as Taylor coefficients (partial derivative divided
/// by the multi-index factorial) in graded order, so the coefficients of an
/// order-n jet are a prefix of those of the same function at any higher order.
/// Binary operations truncate to the smaller order of their operands.
class Jet {
public:
    Jet() : Jet(0, 0.0) {}
    Jet(int order, double value);

    static Jet constant(const Point& base, int order, double value);
    /// The coordinate function x_axis expanded about base.
    static Jet variable(const Point& base, int order, int axis);

    int order() const noexcept { return order_; }
    const Point& base() const noexcept { return base_; }
    double value() const noexcept { return c_[0]; }

    double coeff(const MultiIndex& m) const;
    double& coeff(const MultiIndex& m);
    /// Partial derivative d^|m| f / dx^m at the base point.
    double derivative(const MultiIndex& m) const;
    std::size_t size() const noexcept { return c_.size(); }
    const std::vector<double>& coefficients() const noexcept { return c_; }

    /// d/dx_axis as a jet of order one less.
    Jet partial(int axis) const;
    Jet truncated(int order) const;

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(double s);
    Jet& operator+=(double s) {
        c_[0] += s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator-(Jet a) {
        for (auto& v : a.c_) v = -v;
        return a;
    }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator+(double s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, double s) { return a += -s; }
    friend Jet operator-(double s, const Jet& a) { return (-a) + s; }
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }
    friend Jet operator/(double s, const Jet& a);

private:
    Point base_{};
    int order_ = 0;
    std::vector<double> c_;
};

/// Univariate Taylor coefficients a_0..a_n of a function about a scalar point.
using Series = std::vector<double>;

/// Substitute jet u into the univariate series f(u0 + s) = sum a_k s^k, u0 = u.value().
Jet compose(const Series& a, const Jet& u);

/// Univariate Taylor coefficients of f about x, up to degree n. Throws DomainError
/// when x is outside the function's domain.
Series func_series(Func f, double x, int n);
/// Taylor coefficients of s -> (x + s)^r.
Series power_series(double x, double r, int n);

Jet sin(const Jet& u);
Jet cos(const Jet& u);
Jet exp(const Jet& u);
Jet log(const Jet& u);
Jet sqrt(const Jet& u);
Jet apply(Func f, const Jet& u);
/// u^r; integer r uses repeated multiplication, other r require u > 0.
Jet pow(const Jet& u, double r);

/// Complex-valued jet, stored as real and imaginary parts.
struct CJet {
    Jet re;
    Jet im;

    CJet() = default;
    CJet(Jet r) : re(std::move(r)), im(re.order(), 0.0) {}
    CJet(Jet r, Jet i) : re(std::move(r)), im(std::move(i)) {}

    int order() const { return re.order() < im.order() ? re.order() : im.order(); }
    CJet conj() const { return {re, -im}; }
    /// |z|^2 as a real jet.
    Jet norm2() const { return re * re + im * im; }
    CJet partial(int axis) const { return {re.partial(axis), im.partial(axis)}; }
    CJet truncated(int order) const { return {re.truncated(order), im.truncated(order)}; }

    CJet& operator+=(const CJet& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    CJet& operator-=(const CJet& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }

    friend CJet operator+(CJet a, const CJet& b) { return a += b; }
    friend CJet operator-(CJet a, const CJet& b) { return a -= b; }
    friend CJet operator-(const CJet& a) { return {-a.re, -a.im}; }
    friend CJet operator*(const CJet& a, const CJet& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend CJet operator*(const CJet& a, const Jet& b) { return {a.re * b, a.im * b}; }
    friend CJet operator*(const Jet& b, const CJet& a) { return {a.re * b, a.im * b}; }
    friend CJet operator*(const CJet& a, double s) { return {a.re * s, a.im * s}; }
    friend CJet operator*(double s, const CJet& a) { return {a.re * s, a.im * s}; }
    friend CJet operator/(const CJet& a, const CJet& b) {
        const Jet d = b.norm2();
        const CJet n = a * b.conj();
        return {n.re / d, n.im / d};
    }
};

/// Multiply by i.
inline CJet times_i(const CJet& a) { return {-a.im, a.re}; }

/// Expand an expression in a truncated Taylor jet about p.
Jet eval_jet(const Expr& e, const Point& p, const ParamTable& params, int order);

/// Maximum over coefficients of total order <= k (k <= 2) of
/// |jet - central difference| / (1 + |jet|), step h = 1e-5.
double fd_check(const Expr& e, const Point& p, const ParamTable& params, int k);

}  // namespace crgeo
