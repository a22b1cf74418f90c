// Finite-difference cross-oracle for eval_jet.
//
// The stencil samples are evaluated in binary128 so that the h = 1e-5
// second-order stencils are limited by truncation rather than by cancellation.
// Nothing here touches the jet arithmetic.

#include <quadmath.h>

#include <algorithm>
#include <cmath>

#include "crgeo/jet.hpp"

namespace crgeo {

namespace {

using quad = __float128;

quad apply_quad(Func f, quad x) {
    switch (f) {
        case Func::sin: return sinq(x);
        case Func::cos: return cosq(x);
        case Func::tan: return tanq(x);
        case Func::exp: return expq(x);
        case Func::log: return logq(x);
        case Func::sqrt: return sqrtq(x);
        case Func::sinh: return sinhq(x);
        case Func::cosh: return coshq(x);
        case Func::tanh: return tanhq(x);
        case Func::atan: return atanq(x);
    }
    return 0;
}

quad eval_quad(const Expr::Node& n, const std::array<quad, 3>& p, const ParamTable& params) {
    switch (n.kind) {
        case Expr::Kind::number: return n.number;
        case Expr::Kind::variable: return p[static_cast<std::size_t>(n.axis)];
        case Expr::Kind::parameter: return params.at(n.name);
        case Expr::Kind::neg: return -eval_quad(*n.lhs, p, params);
        case Expr::Kind::add: return eval_quad(*n.lhs, p, params) + eval_quad(*n.rhs, p, params);
        case Expr::Kind::sub: return eval_quad(*n.lhs, p, params) - eval_quad(*n.rhs, p, params);
        case Expr::Kind::mul: return eval_quad(*n.lhs, p, params) * eval_quad(*n.rhs, p, params);
        case Expr::Kind::div: return eval_quad(*n.lhs, p, params) / eval_quad(*n.rhs, p, params);
        case Expr::Kind::pow: {
            const quad b = eval_quad(*n.lhs, p, params);
            const quad e = eval_quad(*n.rhs, p, params);
            if (e == floorq(e) && fabsq(e) <= 64) {
                quad r = 1;
                for (int k = 0; k < static_cast<int>(fabsq(e)); ++k) r *= b;
                return e < 0 ? 1 / r : r;
            }
            return powq(b, e);
        }
        case Expr::Kind::call: return apply_quad(n.func, eval_quad(*n.lhs, p, params));
    }
    return 0;
}

}  // namespace

double fd_check(const Expr& e, const Point& p, const ParamTable& params, int k) {
    if (k < 0 || k > 2) throw std::invalid_argument("fd_check supports orders 0..2");
    constexpr double h = 1e-5;
    const quad hq = h;
    const Jet jet = eval_jet(e, p, params, k);

    auto f = [&](std::array<quad, 3> q) { return eval_quad(e.node(), q, params); };
    auto shifted = [&](std::initializer_list<std::pair<int, int>> steps) {
        std::array<quad, 3> q{p[0], p[1], p[2]};
        for (auto [axis, m] : steps) q[static_cast<std::size_t>(axis)] += m * hq;
        return f(q);
    };

    double worst = 0.0;
    auto record = [&](const MultiIndex& m, quad fd) {
        const double j = jet.derivative(m);
        worst = std::max(worst, std::abs(j - static_cast<double>(fd)) / (1.0 + std::abs(j)));
    };

    record({0, 0, 0}, f({p[0], p[1], p[2]}));
    if (k >= 1) {
        for (int a = 0; a < 3; ++a) {
            MultiIndex m{0, 0, 0};
            m[static_cast<std::size_t>(a)] = 1;
            record(m, (shifted({{a, 1}}) - shifted({{a, -1}})) / (2 * hq));
        }
    }
    if (k >= 2) {
        const quad f0 = f({p[0], p[1], p[2]});
        for (int a = 0; a < 3; ++a) {
            MultiIndex m{0, 0, 0};
            m[static_cast<std::size_t>(a)] = 2;
            const quad v = (-shifted({{a, 2}}) + 16 * shifted({{a, 1}}) - 30 * f0 + 16 * shifted({{a, -1}}) -
                            shifted({{a, -2}})) /
                           (12 * hq * hq);
            record(m, v);
            for (int b = a + 1; b < 3; ++b) {
                MultiIndex mm{0, 0, 0};
                mm[static_cast<std::size_t>(a)] = 1;
                mm[static_cast<std::size_t>(b)] = 1;
                const quad v2 = (shifted({{a, 1}, {b, 1}}) - shifted({{a, 1}, {b, -1}}) -
                                 shifted({{a, -1}, {b, 1}}) + shifted({{a, -1}, {b, -1}})) /
                                (4 * hq * hq);
                record(mm, v2);
            }
        }
    }
    return worst;
}

}  // namespace crgeo
