#pragma once

// Coordinate-basis vector fields, one-forms and two-forms with jet-valued
// components. A one-form is stored as its components against (dx, dy, dt) and
// a vector field against (d/dx, d/dy, d/dt); both are arrays of three jets.

#include <array>
#include <stdexcept>

#include "crgeo/jet.hpp"

namespace crgeo {

template <class S>
using Vec3 = std::array<S, 3>;

using JetVec = Vec3<Jet>;
using CJetVec = Vec3<CJet>;

/// Antisymmetric component table c[i][j] = omega(d_i, d_j).
template <class S>
struct TwoForm {
    std::array<std::array<S, 3>, 3> c;

    /// omega(X, Y).
    template <class V, class W>
    auto operator()(const Vec3<V>& x, const Vec3<W>& y) const {
        auto r = c[0][1] * (x[0] * y[1] - x[1] * y[0]);
        r = r + c[0][2] * (x[0] * y[2] - x[2] * y[0]);
        r = r + c[1][2] * (x[1] * y[2] - x[2] * y[1]);
        return r;
    }
};

/// alpha(X) for a one-form alpha and vector X.
template <class A, class V>
auto contract(const Vec3<A>& alpha, const Vec3<V>& x) {
    auto r = alpha[0] * x[0];
    r = r + alpha[1] * x[1];
    r = r + alpha[2] * x[2];
    return r;
}

/// X(f) = sum_i X^i d_i f.
template <class V, class F>
auto directional(const Vec3<V>& x, const F& f) {
    auto r = x[0] * f.partial(0);
    r = r + x[1] * f.partial(1);
    r = r + x[2] * f.partial(2);
    return r;
}

/// Exterior derivative of a one-form: (d alpha)_ij = d_i alpha_j - d_j alpha_i.
template <class S>
TwoForm<S> exterior(const Vec3<S>& alpha) {
    TwoForm<S> w;
    for (int i = 0; i < 3; ++i) {
        w.c[i][i] = alpha[0].partial(0) * 0.0;
        for (int j = i + 1; j < 3; ++j) {
            w.c[i][j] = alpha[j].partial(i) - alpha[i].partial(j);
            w.c[j][i] = -w.c[i][j];
        }
    }
    return w;
}

/// (alpha ^ beta)_ij = alpha_i beta_j - alpha_j beta_i.
template <class A, class B>
auto wedge(const Vec3<A>& a, const Vec3<B>& b) {
    using R = decltype(a[0] * b[0]);
    TwoForm<R> w;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) w.c[i][j] = a[i] * b[j] - a[j] * b[i];
    return w;
}

/// Interior product X _| omega as a one-form: (X _| omega)_j = sum_i X^i omega_ij.
template <class V, class S>
auto interior(const Vec3<V>& x, const TwoForm<S>& w) {
    using R = decltype(x[0] * w.c[0][0]);
    Vec3<R> r;
    for (int j = 0; j < 3; ++j) r[j] = x[0] * w.c[0][j] + x[1] * w.c[1][j] + x[2] * w.c[2][j];
    return r;
}

/// Gradient of a scalar jet as a one-form.
template <class F>
Vec3<F> gradient(const F& f) {
    return {f.partial(0), f.partial(1), f.partial(2)};
}

template <class S>
Vec3<S> operator+(const Vec3<S>& a, const Vec3<S>& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
template <class S>
Vec3<S> operator-(const Vec3<S>& a, const Vec3<S>& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
template <class S, class K>
auto scale(const K& k, const Vec3<S>& a) {
    using R = decltype(k * a[0]);
    return Vec3<R>{k * a[0], k * a[1], k * a[2]};
}

inline CJetVec complexify(const JetVec& re, const JetVec& im) {
    return {CJet(re[0], im[0]), CJet(re[1], im[1]), CJet(re[2], im[2])};
}
inline CJetVec conj(const CJetVec& v) { return {v[0].conj(), v[1].conj(), v[2].conj()}; }
inline JetVec real_part(const CJetVec& v) { return {v[0].re, v[1].re, v[2].re}; }
inline JetVec imag_part(const CJetVec& v) { return {v[0].im, v[1].im, v[2].im}; }

/// 3x3 matrix of jets, m[row][col].
using JetMat = std::array<std::array<Jet, 3>, 3>;

/// Thrown when a jet matrix is singular at the base point.
class SingularMatrix : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inverse via the adjugate. Singular (relative to the entry scale) at the base
/// point throws SingularMatrix.
JetMat inverse(const JetMat& m);
Jet determinant(const JetMat& m);

}  // namespace crgeo
