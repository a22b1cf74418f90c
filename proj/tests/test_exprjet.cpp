#include <cmath>
#include <numbers>
#include <random>

#include "crgeo/jet.hpp"
#include "crgeo/structure.hpp"
#include "doctest.h"

using namespace crgeo;

namespace {

const std::vector<std::string> kCoords{"x", "y", "t"};

Expr parse(const std::string& s, std::vector<std::string> params = {}) { return parse_expr(s, kCoords, params); }

ParseError parse_failure(const std::string& s) {
    try {
        parse(s);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected a parse error for " << s);
    return ParseError(ParseError::Kind::syntax, 0, "");
}

double d(const Jet& j, int a, int b, int c) { return j.derivative({a, b, c}); }

}  // namespace

TEST_CASE("parser builds the documented trees") {
    CHECK(parse("mu*(x^2+y^2)", {"mu"}).describe() == "Mul(Param mu,Add(Pow(x,2),Pow(y,2)))");
    CHECK(parse("sin(x)*exp(-t)").describe() == "Mul(Sin(x),Exp(Neg(t)))");
    // precedence: ^ binds tighter than unary minus, which binds tighter than *
    CHECK(parse("-x^2").describe() == "Neg(Pow(x,2))");
    CHECK(parse("2^3^2").describe() == "Pow(2,Pow(3,2))");
    CHECK(parse("x-y-t").describe() == "Sub(Sub(x,y),t)");
    CHECK(parse("x/y*t").describe() == "Mul(Div(x,y),t)");
    CHECK(parse(" 1.5e-3 * x ").describe() == "Mul(0.0015,x)");
}

TEST_CASE("parser errors carry kind and offset") {
    auto e = parse_failure("x+");
    CHECK(e.kind() == ParseError::Kind::syntax);
    CHECK(e.offset() == 2);

    auto u = parse_failure("foo(x)");
    CHECK(u.kind() == ParseError::Kind::unknown_identifier);
    CHECK(std::string(u.what()).find("foo") != std::string::npos);

    CHECK(parse_failure("z+1").kind() == ParseError::Kind::unknown_identifier);
    CHECK(parse_failure("sin x").kind() == ParseError::Kind::arity);
    CHECK(parse_failure("sin(x, y)").kind() == ParseError::Kind::arity);
    CHECK(parse_failure("x(1)").kind() == ParseError::Kind::arity);
    CHECK(parse_failure("(x").kind() == ParseError::Kind::syntax);
    CHECK(parse_failure("x^y").kind() == ParseError::Kind::syntax);
}

TEST_CASE("to_source round-trips") {
    for (const char* s : {"mu*(x^2+y^2)", "sin(x)*exp(-t)", "-x^2/3", "atan(x*y)-sqrt(1+t^2)^0.5", "0.1*x-2"}) {
        const Expr e = parse(s, {"mu"});
        CHECK(parse(e.to_source(), {"mu"}).describe() == e.describe());
    }
}

TEST_CASE("eval_jet on polynomials") {
    const Jet a = eval_jet(parse("x^2"), {3, 0, 0}, {}, 2);
    CHECK(a.size() == jet_size(2));
    CHECK(a.value() == 9.0);
    CHECK(d(a, 1, 0, 0) == 6.0);
    CHECK(d(a, 2, 0, 0) == 2.0);
    for (const MultiIndex& m : std::vector<MultiIndex>{{0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {0, 2, 0}, {0, 0, 2}, {0, 1, 1}, {1, 0, 1}})
        CHECK(a.derivative(m) == 0.0);

    const Jet b = eval_jet(parse("mu*(x^2+y^2)", {"mu"}), {1, 2, 5}, {{"mu", 1.0}}, 2);
    CHECK(b.value() == 5.0);
    CHECK(d(b, 1, 0, 0) == 2.0);
    CHECK(d(b, 0, 1, 0) == 4.0);
    CHECK(d(b, 2, 0, 0) == 2.0);
    CHECK(d(b, 0, 2, 0) == 2.0);
    CHECK(d(b, 0, 0, 1) == 0.0);
}

TEST_CASE("eval_jet on a transcendental product matches hand derivatives") {
    const Point p{0, std::numbers::pi / 2, 0};
    const Expr e = parse("exp(x)*sin(y)");
    const Jet j = eval_jet(e, p, {}, 1);
    CHECK(j.value() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d(j, 1, 0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(d(j, 0, 1, 0)) < 1e-15);
    CHECK(fd_check(e, p, {}, 1) < 1e-8);
}

TEST_CASE("higher derivatives against closed forms") {
    // d^k/dx^k exp(2x) = 2^k exp(2x); mixed derivatives separate
    const Jet j = eval_jet(parse("exp(2*x)*cos(y)"), {0.3, 0.4, 0}, {}, 6);
    for (int k = 0; k <= 6; ++k) {
        const double ex = std::pow(2.0, k) * std::exp(0.6) * std::cos(0.4);
        CHECK(d(j, k, 0, 0) == doctest::Approx(ex).epsilon(1e-13));
    }
    CHECK(d(j, 2, 4, 0) == doctest::Approx(4 * std::exp(0.6) * std::cos(0.4)).epsilon(1e-13));
    CHECK(d(j, 3, 3, 0) == doctest::Approx(8 * std::exp(0.6) * std::sin(0.4)).epsilon(1e-13));

    const Jet l = eval_jet(parse("log(1+x^2)"), {0, 0, 0}, {}, 6);
    // log(1+u) = u - u^2/2 + u^3/3 with u = x^2
    CHECK(d(l, 2, 0, 0) == doctest::Approx(2.0));
    CHECK(d(l, 4, 0, 0) == doctest::Approx(-0.5 * 24));
    CHECK(d(l, 6, 0, 0) == doctest::Approx(720.0 / 3));

    const Jet a = eval_jet(parse("atan(x)+tanh(y)+tan(t)"), {0, 0, 0}, {}, 5);
    CHECK(d(a, 3, 0, 0) == doctest::Approx(-2.0));
    CHECK(d(a, 5, 0, 0) == doctest::Approx(24.0));
    CHECK(d(a, 0, 3, 0) == doctest::Approx(-2.0));
    CHECK(d(a, 0, 0, 3) == doctest::Approx(2.0));
    CHECK(d(a, 0, 0, 5) == doctest::Approx(16.0));
}

TEST_CASE("domain violations name the node") {
    try {
        eval_jet(parse("log(x)"), {-1, 0, 0}, {}, 2);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(e.node() == "Log(x)");
    }
    CHECK_THROWS_AS(eval_jet(parse("sqrt(x)"), {-1, 0, 0}, {}, 1), DomainError);
    CHECK_THROWS_AS(eval_jet(parse("x^0.5"), {-1, 0, 0}, {}, 1), DomainError);
    CHECK_THROWS_AS(eval_jet(parse("1/x"), {0, 0, 0}, {}, 1), DomainError);
    CHECK(eval_jet(parse("x^3"), {-2, 0, 0}, {}, 1).value() == -8.0);
    CHECK_THROWS_AS(eval_jet(parse("mu*x", {"mu"}), {1, 0, 0}, {}, 1), std::invalid_argument);
}

TEST_CASE("insufficient order is reported") {
    const Jet j = eval_jet(parse("x*y"), {1, 1, 1}, {}, 1);
    CHECK_THROWS_AS(j.derivative({1, 1, 0}), InsufficientOrder);
    CHECK_THROWS_AS(j.partial(0).partial(1), InsufficientOrder);
}

TEST_CASE("fd_check documented examples") {
    CHECK(fd_check(parse("3*x^2-2*x*y+t^2-y+7"), {0.4, -1.3, 2.2}, {}, 2) < 1e-9);
    CHECK(fd_check(parse("sin(x*y)"), {0.3, 0.7, 0}, {}, 2) < 1e-4);
    CHECK(fd_check(parse("x"), {0.3, 0.7, 0}, {}, 1) < 1e-12);
}

TEST_CASE("complex jets respect conjugation") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    const Point p{0.1, 0.2, 0.3};
    auto rand_jet = [&] {
        Jet j = Jet::constant(p, 4, 0.0);
        for (int a = 0; a <= 4; ++a)
            for (int b = 0; a + b <= 4; ++b)
                for (int c = 0; a + b + c <= 4; ++c) j.coeff({a, b, c}) = u(rng);
        return j;
    };
    for (int trial = 0; trial < 20; ++trial) {
        const CJet a(rand_jet(), rand_jet()), b(rand_jet(), rand_jet());
        const CJet lhs = (a * b).conj(), rhs = a.conj() * b.conj();
        const CJet n = a * a.conj();
        for (std::size_t k = 0; k < jet_size(4); ++k) {
            CHECK(std::abs(lhs.re.coefficients()[k] - rhs.re.coefficients()[k]) < 1e-14);
            CHECK(std::abs(lhs.im.coefficients()[k] - rhs.im.coefficients()[k]) < 1e-14);
            CHECK(std::abs(n.im.coefficients()[k]) < 1e-14);
        }
    }
}

// ---- properties ------------------------------------------------------------

TEST_CASE("jet product is commutative and associative") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    const Point p{0.5, -0.5, 0.25};
    for (int order : {0, 1, 3, 6, 10}) {
        auto rand_jet = [&] {
            Jet j = Jet::constant(p, order, 0.0);
            for (int a = 0; a <= order; ++a)
                for (int b = 0; a + b <= order; ++b)
                    for (int c = 0; a + b + c <= order; ++c) j.coeff({a, b, c}) = u(rng);
            return j;
        };
        for (int trial = 0; trial < 10; ++trial) {
            const Jet a = rand_jet(), b = rand_jet(), c = rand_jet();
            const Jet ab = a * b, ba = b * a, l = (a * b) * c, r = a * (b * c);
            for (std::size_t k = 0; k < a.size(); ++k) {
                CHECK(std::abs(ab.coefficients()[k] - ba.coefficients()[k]) < 1e-14);
                CHECK(std::abs(l.coefficients()[k] - r.coefficients()[k]) < 1e-12);
            }
        }
    }
}

namespace {

// Random expression in x, y, t of bounded depth, avoiding domain edges: log and
// sqrt see 2 + (something)^2, division is by 1.5 + cos(...).
Expr random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
    std::uniform_int_distribution<int> axis(0, 2);
    std::uniform_real_distribution<double> c(-2, 2);
    switch (pick(rng)) {
        case 0: return Expr::num(std::round(c(rng) * 8) / 8);
        case 1: {
            const int a = axis(rng);
            return Expr::var(a, kCoords[static_cast<std::size_t>(a)]);
        }
        case 2: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
        case 3: return random_expr(rng, depth - 1) - random_expr(rng, depth - 1);
        case 4: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
        case 5: return random_expr(rng, depth - 1) / (Expr::num(1.5) + Expr::call(Func::cos, random_expr(rng, depth - 1)));
        case 6: {
            const Func fs[] = {Func::sin, Func::cos, Func::atan, Func::tanh};
            return Expr::call(fs[std::uniform_int_distribution<int>(0, 3)(rng)], random_expr(rng, depth - 1));
        }
        case 7: {
            const Expr s = random_expr(rng, depth - 1);
            return Expr::call(rng() % 2 ? Func::log : Func::sqrt, Expr::num(2) + s * s);
        }
        case 8: return Expr::call(Func::exp, Expr::num(0.25) * Expr::call(Func::sin, random_expr(rng, depth - 1)));
        default: return pow(random_expr(rng, depth - 1), Expr::num(static_cast<double>(rng() % 4)));
    }
}

Expr substitute(const Expr& e, const std::array<Expr, 3>& inner) {
    const auto& n = e.node();
    switch (n.kind) {
        case Expr::Kind::number:
        case Expr::Kind::parameter: return e;
        case Expr::Kind::variable: return inner[static_cast<std::size_t>(n.axis)];
        case Expr::Kind::neg: return -substitute(e.lhs(), inner);
        case Expr::Kind::add: return substitute(e.lhs(), inner) + substitute(e.rhs(), inner);
        case Expr::Kind::sub: return substitute(e.lhs(), inner) - substitute(e.rhs(), inner);
        case Expr::Kind::mul: return substitute(e.lhs(), inner) * substitute(e.rhs(), inner);
        case Expr::Kind::div: return substitute(e.lhs(), inner) / substitute(e.rhs(), inner);
        case Expr::Kind::pow: return pow(substitute(e.lhs(), inner), e.rhs());
        case Expr::Kind::call: return Expr::call(n.func, substitute(e.lhs(), inner));
    }
    return e;
}

// Multivariate Taylor composition: outer is a Taylor polynomial about q;
// substitute X_i - q_i = u_i - q_i monomial by monomial.
Jet compose_multivariate(const Jet& outer, const std::array<Jet, 3>& u) {
    const int n = u[0].order();
    const Point& base = u[0].base();
    std::array<Jet, 3> du;
    for (std::size_t i = 0; i < 3; ++i) du[i] = u[i] - u[i].value();
    Jet r = Jet::constant(base, n, 0.0);
    for (int a = 0; a <= n; ++a) {
        for (int b = 0; a + b <= n; ++b) {
            for (int c = 0; a + b + c <= n; ++c) {
                Jet m = Jet::constant(base, n, outer.coeff({a, b, c}));
                for (int k = 0; k < a; ++k) m = m * du[0];
                for (int k = 0; k < b; ++k) m = m * du[1];
                for (int k = 0; k < c; ++k) m = m * du[2];
                r += m;
            }
        }
    }
    return r;
}

}  // namespace

TEST_CASE("chain rule: composed expressions match multivariate composition") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> coord(-1, 1);
    int checked = 0;
    for (int trial = 0; checked < 100 && trial < 1000; ++trial) {
        const Expr outer = random_expr(rng, 3);
        const std::array<Expr, 3> inner{random_expr(rng, 2), random_expr(rng, 2), random_expr(rng, 2)};
        const Expr composed = substitute(outer, inner);
        const Point p{coord(rng), coord(rng), coord(rng)};
        constexpr int N = 4;
        try {
            const Jet direct = eval_jet(composed, p, {}, N);
            std::array<Jet, 3> u{eval_jet(inner[0], p, {}, N), eval_jet(inner[1], p, {}, N), eval_jet(inner[2], p, {}, N)};
            const Point q{u[0].value(), u[1].value(), u[2].value()};
            const Jet via = compose_multivariate(eval_jet(outer, q, {}, N), u);
            double scale = 1.0;
            for (double v : direct.coefficients()) scale = std::max(scale, std::abs(v));
            for (std::size_t k = 0; k < direct.size(); ++k) {
                CHECK(std::abs(direct.coefficients()[k] - via.coefficients()[k]) <= 1e-12 * scale);
            }
            ++checked;
        } catch (const DomainError&) {
            // 0^negative or similar: not a chain-rule question
        }
    }
    CHECK(checked == 100);
}

TEST_CASE("fd oracle agrees on shipped model expressions at Halton points") {
    const std::vector<std::string> sources{"-y", "x", "1", "y", "-x", "mu*(x^2+y^2)", "2*mu*t", "x^2*y+t"};
    const auto samples = halton_samples({{{-2, 2}, {-2, 2}, {-2, 2}}}, 1e-3, 64, 7);
    for (const auto& s : sources) {
        const Expr e = parse(s, {"mu"});
        for (const auto& p : samples.points) CHECK(fd_check(e, p, {{"mu", 1.0}}, 2) < 1e-4);
    }
}
