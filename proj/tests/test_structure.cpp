#include <cmath>

#include "crgeo/structure.hpp"
#include "doctest.h"

using namespace crgeo;

namespace {

PHStructure make(std::array<const char*, 3> theta, std::array<const char*, 3> e1, std::array<const char*, 3> e2) {
    PHStructure s;
    const auto coords = s.chart.coord_list();
    for (std::size_t i = 0; i < 3; ++i) {
        s.theta[i] = parse_expr(theta[i], coords, {});
        s.e1[i] = parse_expr(e1[i], coords, {});
        s.e2[i] = parse_expr(e2[i], coords, {});
    }
    return s;
}

PHStructure heisenberg() { return make({"-y", "x", "1"}, {"1", "0", "y"}, {"0", "1", "-x"}); }

std::string error_of(const auto& fn) {
    try {
        fn();
    } catch (const StructureError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("Halton samples are interior and reproducible") {
    const std::array<Interval, 3> box{{{-2, 2}, {-1, 1}, {0, 3}}};
    const auto a = halton_samples(box, 1e-3, 256, 7);
    const auto b = halton_samples(box, 1e-3, 256, 7);
    REQUIRE(a.points.size() == 256);
    CHECK(a.points == b.points);
    for (const auto& p : a.points)
        for (std::size_t d = 0; d < 3; ++d) {
            CHECK(p[d] > box[d].lo + 1e-3);
            CHECK(p[d] < box[d].hi - 1e-3);
        }
    CHECK(radical_inverse(1, 2) == 0.5);
    CHECK(radical_inverse(6, 2) == 0.375);
    CHECK(radical_inverse(5, 3) == doctest::Approx(7.0 / 9.0));
    CHECK(halton_samples(box, 0, 4, 8).points != a.points);
}

TEST_CASE("chart box must sit inside the domain") {
    Chart c;
    CHECK_NOTHROW(c.check());
    c.domain[2] = {0, 1};
    CHECK_THROWS_AS(c.check(), std::invalid_argument);
}

TEST_CASE("Heisenberg Reeb field is d/dt") {
    const auto s = heisenberg();
    for (const Point p : {Point{0, 0, 0}, Point{1.2, -0.7, 3.0}}) {
        const JetVec T = reeb(s, p, 3);
        CHECK(T[0].value() == 0.0);
        CHECK(T[1].value() == 0.0);
        CHECK(T[2].value() == 1.0);
        for (const auto& comp : T) {
            for (int axis = 0; axis < 3; ++axis) {
                const Jet d = comp.partial(axis);
                for (double c : d.coefficients()) CHECK(c == 0.0);
            }
        }
    }
}

TEST_CASE("Heisenberg coframe is dx + i dy") {
    const Coframe c = coframe(heisenberg(), {0.3, -0.4, 1.1}, 3);
    CHECK(c.omega1[0].value() == doctest::Approx(1.0));
    CHECK(std::abs(c.omega1[1].value()) < 1e-15);
    CHECK(std::abs(c.omega1[2].value()) < 1e-15);
    CHECK(std::abs(c.omega2[0].value()) < 1e-15);
    CHECK(c.omega2[1].value() == doctest::Approx(1.0));
    CHECK(std::abs(c.omega2[2].value()) < 1e-15);
    CHECK(c.omega1[0].order() == 2);
}

TEST_CASE("degenerate inputs are rejected") {
    const auto flat = make({"0", "0", "1"}, {"1", "0", "0"}, {"0", "1", "0"});
    CHECK(error_of([&] { reeb(flat, {0, 0, 0}, 2); }).rfind("contact condition violated", 0) == 0);

    const auto same = make({"-y", "x", "1"}, {"1", "0", "y"}, {"1", "0", "y"});
    CHECK(error_of([&] { coframe(same, {0.5, 0.5, 0}, 2); }).rfind("frame degenerate", 0) == 0);

    const auto report = validate(flat, halton_samples(flat.chart, 8, 7));
    CHECK_FALSE(report.pass());
    REQUIRE(report.find("pointwise_evaluation") != nullptr);
}

TEST_CASE("validate Heisenberg") {
    const auto s = heisenberg();
    const auto report = validate(s, halton_samples(s.chart, 256, 7));
    CHECK(report.pass());
    for (const auto& e : report.entries) {
        CHECK(e.samples == 256);
        if (e.name != "fd_oracle") CHECK(e.residual < 1e-12);
    }
}

TEST_CASE("scaled frame fails normalization") {
    const auto s = make({"-y", "x", "1"}, {"2", "0", "2*y"}, {"0", "1", "-x"});
    const auto report = validate(s, halton_samples(s.chart, 32, 7));
    CHECK_FALSE(report.pass());
    const auto* n = report.find("normalization");
    REQUIRE(n != nullptr);
    CHECK_FALSE(n->pass);
    CHECK(n->note == "normalization: expected 2, got 4");
    CHECK(report.find("theta(e1)")->pass);
}

TEST_CASE("validate is bit-reproducible") {
    const auto s = heisenberg();
    const auto samples = halton_samples(s.chart, 64, 3);
    const auto a = validate(s, samples), b = validate(s, samples);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) CHECK(a.entries[i].residual == b.entries[i].residual);
}
