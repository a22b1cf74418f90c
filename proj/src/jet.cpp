#include "crgeo/jet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace crgeo {

namespace {

/// Graded monomial ordering shared by every jet order, plus the product
/// table: for each output monomial, the (lhs, rhs) pairs whose exponents sum
/// to it. Pairs are grouped by output, and outputs appear in graded order, so
/// an order-n product uses a prefix of the table.
struct Tables {
    std::vector<MultiIndex> exps;
    int index[kMaxJetOrder + 1][kMaxJetOrder + 1][kMaxJetOrder + 1];
    std::vector<std::array<std::uint32_t, 3>> pairs;  // (out, a, b)
    std::array<std::size_t, kMaxJetOrder + 2> pair_end{};

    Tables() {
        for (auto& a : index)
            for (auto& b : a)
                for (auto& c : b) c = -1;
        for (int d = 0; d <= kMaxJetOrder; ++d) {
            for (int a = d; a >= 0; --a) {
                for (int b = d - a; b >= 0; --b) {
                    const int c = d - a - b;
                    index[a][b][c] = static_cast<int>(exps.size());
                    exps.push_back({a, b, c});
                }
            }
        }
        for (int d = 0; d <= kMaxJetOrder; ++d) {
            const std::size_t first = d == 0 ? 0 : jet_size(d - 1);
            for (std::size_t k = first; k < jet_size(d); ++k) {
                const auto& e = exps[k];
                for (int a0 = 0; a0 <= e[0]; ++a0)
                    for (int a1 = 0; a1 <= e[1]; ++a1)
                        for (int a2 = 0; a2 <= e[2]; ++a2) {
                            const int i = index[a0][a1][a2];
                            const int j = index[e[0] - a0][e[1] - a1][e[2] - a2];
                            pairs.push_back({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(i),
                                             static_cast<std::uint32_t>(j)});
                        }
            }
            pair_end[static_cast<std::size_t>(d)] = pairs.size();
        }
    }

    int at(const MultiIndex& m) const { return index[m[0]][m[1]][m[2]]; }
};

const Tables& tables() {
    static const Tables t;
    return t;
}

void check_order(int order) {
    if (order < 0 || order > kMaxJetOrder) {
        throw std::invalid_argument("jet order must be in [0, " + std::to_string(kMaxJetOrder) + "]");
    }
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// Univariate series helpers.
Series series_mul(const Series& a, const Series& b) {
    Series r(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; i + j < r.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

Series series_div(const Series& a, const Series& b) {
    Series r(a.size(), 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) {
        double s = a[k];
        for (std::size_t j = 1; j <= k; ++j) s -= b[j] * r[k - j];
        r[k] = s / b[0];
    }
    return r;
}

}  // namespace

Jet::Jet(int order, double value) : order_(order) {
    check_order(order);
    c_.assign(jet_size(order), 0.0);
    c_[0] = value;
}

Jet Jet::constant(const Point& base, int order, double value) {
    Jet j(order, value);
    j.base_ = base;
    return j;
}

Jet Jet::variable(const Point& base, int order, int axis) {
    Jet j = constant(base, order, base[static_cast<std::size_t>(axis)]);
    if (order >= 1) j.c_[static_cast<std::size_t>(1 + axis)] = 1.0;
    return j;
}

double Jet::coeff(const MultiIndex& m) const {
    if (m[0] + m[1] + m[2] > order_) return 0.0;
    return c_[static_cast<std::size_t>(tables().at(m))];
}

double& Jet::coeff(const MultiIndex& m) {
    if (m[0] + m[1] + m[2] > order_) throw InsufficientOrder("coefficient beyond jet order");
    return c_[static_cast<std::size_t>(tables().at(m))];
}

double Jet::derivative(const MultiIndex& m) const {
    if (m[0] + m[1] + m[2] > order_) {
        throw InsufficientOrder("derivative of order " + std::to_string(m[0] + m[1] + m[2]) +
                                " requested from a jet of order " + std::to_string(order_));
    }
    return coeff(m) * factorial(m[0]) * factorial(m[1]) * factorial(m[2]);
}

Jet Jet::partial(int axis) const {
    if (order_ == 0) throw InsufficientOrder("insufficient jet order for differentiation");
    const auto& t = tables();
    Jet r = constant(base_, order_ - 1, 0.0);
    for (std::size_t k = 0; k < r.c_.size(); ++k) {
        MultiIndex e = t.exps[k];
        e[static_cast<std::size_t>(axis)] += 1;
        r.c_[k] = e[static_cast<std::size_t>(axis)] * c_[static_cast<std::size_t>(t.at(e))];
    }
    return r;
}

Jet Jet::truncated(int order) const {
    if (order >= order_) return *this;
    Jet r = *this;
    r.order_ = order;
    r.c_.resize(jet_size(order));
    return r;
}

Jet& Jet::operator+=(const Jet& o) {
    if (o.order_ < order_) {
        order_ = o.order_;
        c_.resize(o.c_.size());
    }
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    if (o.order_ < order_) {
        order_ = o.order_;
        c_.resize(o.c_.size());
    }
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
    const int order = std::min(a.order_, b.order_);
    const auto& t = tables();
    Jet r = Jet::constant(a.base_, order, 0.0);
    const double* pa = a.c_.data();
    const double* pb = b.c_.data();
    double* pr = r.c_.data();
    const std::size_t end = t.pair_end[static_cast<std::size_t>(order)];
    for (std::size_t q = 0; q < end; ++q) {
        const auto& p = t.pairs[q];
        pr[p[0]] += pa[p[1]] * pb[p[2]];
    }
    return r;
}

Jet operator/(const Jet& a, const Jet& b) { return a * pow(b, -1.0); }

Jet operator/(double s, const Jet& a) { return pow(a, -1.0) * s; }

Jet compose(const Series& a, const Jet& u) {
    const Jet du = u - u.value();
    const int n = std::min(u.order(), static_cast<int>(a.size()) - 1);
    Jet r = Jet::constant(u.base(), u.order(), a[static_cast<std::size_t>(n)]);
    for (int k = n - 1; k >= 0; --k) {
        r = r * du;
        r += a[static_cast<std::size_t>(k)];
    }
    return r;
}

Series power_series(double x, double r, int n) {
    Series a(static_cast<std::size_t>(n) + 1, 0.0);
    double binom = 1.0;
    for (int k = 0; k <= n; ++k) {
        a[static_cast<std::size_t>(k)] = binom * std::pow(x, r - k);
        binom *= (r - k) / (k + 1);
    }
    return a;
}

Series func_series(Func f, double x, int n) {
    const auto size = static_cast<std::size_t>(n) + 1;
    Series a(size, 0.0);
    auto fill = [&](auto&& kth) {
        double fact = 1.0;
        for (int k = 0; k <= n; ++k) {
            if (k > 0) fact *= k;
            a[static_cast<std::size_t>(k)] = kth(k) / fact;
        }
    };
    switch (f) {
        case Func::exp: {
            const double e = std::exp(x);
            fill([&](int) { return e; });
            break;
        }
        case Func::sin:
            for (int k = 0; k <= n; ++k) {
                const double s = std::sin(x), c = std::cos(x);
                const double v = (k % 4 == 0) ? s : (k % 4 == 1) ? c : (k % 4 == 2) ? -s : -c;
                a[static_cast<std::size_t>(k)] = v / factorial(k);
            }
            break;
        case Func::cos:
            for (int k = 0; k <= n; ++k) {
                const double s = std::sin(x), c = std::cos(x);
                const double v = (k % 4 == 0) ? c : (k % 4 == 1) ? -s : (k % 4 == 2) ? -c : s;
                a[static_cast<std::size_t>(k)] = v / factorial(k);
            }
            break;
        case Func::sinh:
        case Func::cosh: {
            const double sh = std::sinh(x), ch = std::cosh(x);
            const bool odd_is_cosh = f == Func::sinh;
            for (int k = 0; k <= n; ++k) {
                const bool use_cosh = (k % 2 == 1) == odd_is_cosh;
                a[static_cast<std::size_t>(k)] = (use_cosh ? ch : sh) / factorial(k);
            }
            break;
        }
        case Func::log:
            if (!(x > 0.0)) throw DomainError("log", "log of nonpositive value");
            a[0] = std::log(x);
            for (int k = 1; k <= n; ++k) {
                a[static_cast<std::size_t>(k)] = ((k % 2 == 1) ? 1.0 : -1.0) / (k * std::pow(x, k));
            }
            break;
        case Func::sqrt:
            if (!(x > 0.0)) {
                if (x == 0.0 && n == 0) return {0.0};
                throw DomainError("sqrt", "sqrt needs a positive argument to be differentiable");
            }
            return power_series(x, 0.5, n);
        case Func::tan:
            return series_div(func_series(Func::sin, x, n), func_series(Func::cos, x, n));
        case Func::tanh:
            return series_div(func_series(Func::sinh, x, n), func_series(Func::cosh, x, n));
        case Func::atan: {
            // atan' = 1/(1+s^2) with s = x + t; integrate termwise.
            Series s(size, 0.0);
            s[0] = x;
            if (size > 1) s[1] = 1.0;
            Series q = series_mul(s, s);
            q[0] += 1.0;
            Series one(size, 0.0);
            one[0] = 1.0;
            const Series d = series_div(one, q);
            a[0] = std::atan(x);
            for (std::size_t k = 1; k < size; ++k) a[k] = d[k - 1] / static_cast<double>(k);
            break;
        }
    }
    return a;
}

Jet apply(Func f, const Jet& u) { return compose(func_series(f, u.value(), u.order()), u); }

Jet sin(const Jet& u) { return apply(Func::sin, u); }
Jet cos(const Jet& u) { return apply(Func::cos, u); }
Jet exp(const Jet& u) { return apply(Func::exp, u); }
Jet log(const Jet& u) { return apply(Func::log, u); }
Jet sqrt(const Jet& u) { return apply(Func::sqrt, u); }

Jet pow(const Jet& u, double r) {
    if (r == std::floor(r) && std::abs(r) <= 64.0) {
        const int n = static_cast<int>(std::abs(r));
        Jet result = Jet::constant(u.base(), u.order(), 1.0);
        Jet base = u;
        for (int m = n; m > 0; m >>= 1) {
            if (m & 1) result = result * base;
            if (m > 1) base = base * base;
        }
        if (r < 0) {
            if (u.value() == 0.0) throw DomainError("pow", "negative power of zero");
            return compose(power_series(result.value(), -1.0, result.order()), result);
        }
        return result;
    }
    if (!(u.value() > 0.0)) throw DomainError("pow", "non-integer power of nonpositive base");
    return compose(power_series(u.value(), r, u.order()), u);
}

namespace {

std::string node_text(const Expr::Node& n) { return Expr(std::make_shared<const Expr::Node>(n)).describe(); }

Jet eval_jet_node(const Expr::Node& n, const Point& p, const ParamTable& params, int order) {
    switch (n.kind) {
        case Expr::Kind::number: return Jet::constant(p, order, n.number);
        case Expr::Kind::variable: return Jet::variable(p, order, n.axis);
        case Expr::Kind::parameter: {
            auto it = params.find(n.name);
            if (it == params.end()) throw std::invalid_argument("unbound parameter '" + n.name + "'");
            return Jet::constant(p, order, it->second);
        }
        case Expr::Kind::neg: return -eval_jet_node(*n.lhs, p, params, order);
        case Expr::Kind::add: return eval_jet_node(*n.lhs, p, params, order) + eval_jet_node(*n.rhs, p, params, order);
        case Expr::Kind::sub: return eval_jet_node(*n.lhs, p, params, order) - eval_jet_node(*n.rhs, p, params, order);
        case Expr::Kind::mul: return eval_jet_node(*n.lhs, p, params, order) * eval_jet_node(*n.rhs, p, params, order);
        case Expr::Kind::div: {
            const Jet den = eval_jet_node(*n.rhs, p, params, order);
            if (den.value() == 0.0) throw DomainError(node_text(n), "division by zero");
            return eval_jet_node(*n.lhs, p, params, order) * pow(den, -1.0);
        }
        case Expr::Kind::pow: {
            const double r = eval(Expr(n.rhs), p, params);
            const Jet base = eval_jet_node(*n.lhs, p, params, order);
            try {
                return pow(base, r);
            } catch (const DomainError& e) {
                throw DomainError(node_text(n), e.what());
            }
        }
        case Expr::Kind::call: {
            const Jet arg = eval_jet_node(*n.lhs, p, params, order);
            try {
                return apply(n.func, arg);
            } catch (const DomainError& e) {
                throw DomainError(node_text(n), e.what());
            }
        }
    }
    return Jet(order, 0.0);
}

}  // namespace

Jet eval_jet(const Expr& e, const Point& p, const ParamTable& params, int order) {
    check_order(order);
    return eval_jet_node(e.node(), p, params, order);
}

}  // namespace crgeo
