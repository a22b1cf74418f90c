#include <cmath>

#include "crgeo/curvature.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace crgeo;

namespace {

std::string model_path(const char* file) { return std::string(CRGEO_SOURCE_DIR) + "/models/" + file; }

ModelError::Kind error_kind(const auto& fn) {
    try {
        fn();
    } catch (const ModelError& e) {
        return e.kind();
    }
    FAIL("no ModelError raised");
    return ModelError::Kind::io;
}

std::string error_text(const auto& fn) {
    try {
        fn();
    } catch (const ModelError& e) {
        return e.what();
    }
    return "";
}

bool same_entries(const CheckList& a, const CheckList& b) {
    if (a.entries.size() != b.entries.size()) return false;
    for (std::size_t i = 0; i < a.entries.size(); ++i)
        if (a.entries[i].name != b.entries[i].name || a.entries[i].residual != b.entries[i].residual ||
            a.entries[i].worst != b.entries[i].worst)
            return false;
    return true;
}

const char* kHeisenbergText = R"(
[model]
name = h
[chart]
coords = x, y, t
box = -2, 2, -2, 2, -2, 2
[contact]
theta = "-y", "x", "1"
[frame]
e1 = "1", "0", "y"
e2 = "0", "1", "-x"
)";

}  // namespace

TEST_CASE("every builtin validates at 256 samples") {
    for (const auto& name : builtin_names()) {
        INFO(name);
        const auto m = builtin(name, {{"mu", 1.0}});
        const auto list = validate(m.structure, halton_samples(m.structure.chart, 256, 7));
        for (const auto& e : list.entries) {
            INFO(e.name, " ", e.residual);
            CHECK(e.pass);
            if (e.name != "fd_oracle") CHECK(e.residual < 1e-9);
        }
    }
}

TEST_CASE("builtin errors") {
    CHECK(error_kind([] { builtin("nope"); }) == ModelError::Kind::unknown_name);
    CHECK(error_kind([] { builtin("heisenberg_gaussian"); }) == ModelError::Kind::missing_parameter);
    CHECK(error_text([] { builtin("heisenberg_contact"); }).find("'mu'") != std::string::npos);
}

TEST_CASE("builtin potentials and declared data") {
    const auto g = builtin("heisenberg_gaussian", {{"mu", 2.0}});
    CHECK(g.kind == PotentialKind::gradient);
    CHECK(g.mu() == 2.0);
    CHECK(g.potential.to_source() == "(mu*((x^2)+(y^2)))");
    const auto c = builtin("heisenberg_contact", {{"mu", 1.0}});
    CHECK(c.kind == PotentialKind::contact);
    CHECK(eval(c.potential, {0, 0, 1.5}, c.structure.params) == 3.0);
    const auto t = builtin("cr_sphere_trivial");
    CHECK(t.mu() == kSphereW);
    CHECK(t.hypotheses.closed);
    CHECK(*builtin("cr_sphere").reference_W == kSphereW);
}

TEST_CASE("cr_sphere has the published constant W and no torsion") {
    const auto m = builtin("cr_sphere");
    for (const auto& p : halton_samples(m.structure.chart, 32, 7).points) {
        const auto g = geometry_at(m.structure, p, 6);
        CHECK(std::abs(g.curv.W.value() - kSphereW) < 1e-9);
        CHECK(std::hypot(g.conn.A11.re.value(), g.conn.A11.im.value()) < 1e-9);
    }
}

TEST_CASE("shipped heisenberg.model matches the builtin") {
    const auto file = load_model(model_path("heisenberg.model"));
    const auto b = builtin("heisenberg");
    const auto samples = halton_samples(b.structure.chart, 64, 7);
    CHECK(same_entries(validate(file.structure, samples), validate(b.structure, samples)));
    for (std::size_t i = 0; i < 3; ++i) CHECK(file.structure.theta[i].describe() == b.structure.theta[i].describe());
    CHECK(*file.reference_W == 0.0);
}

TEST_CASE("shipped cr_sphere.model matches the builtin and records W") {
    const auto file = load_model(model_path("cr_sphere.model"));
    const auto b = builtin("cr_sphere");
    CHECK(*file.reference_W == kSphereW);
    const Point p{0.2, -0.3, 0.1};
    CHECK(geometry_at(file.structure, p, 6).curv.W.value() == geometry_at(b.structure, p, 6).curv.W.value());
}

TEST_CASE("serialize then parse is bit-identical") {
    for (const auto& name : builtin_names()) {
        INFO(name);
        const auto m = builtin(name, {{"mu", 1.25}});
        const auto text = serialize_model(m);
        const auto r = parse_model(text);
        CHECK(serialize_model(r) == text);
        CHECK(r.kind == m.kind);
        CHECK(r.mu() == m.mu());
        const auto samples = halton_samples(m.structure.chart, 32, 7);
        CHECK(same_entries(validate(r.structure, samples), validate(m.structure, samples)));
        if (m.kind != PotentialKind::none) CHECK(r.potential.describe() == m.potential.describe());
    }
}

TEST_CASE("loader rejects a frame with dtheta(e1, e2) = 1") {
    std::string text = kHeisenbergText;
    text.replace(text.find("e1 = \"1\", \"0\", \"y\""), 18, "e1 = \"0.5\", \"0\", \"0.5*y\"");
    const auto msg = error_text([&] { parse_model(text); });
    CHECK(msg.find("normalization: expected 2, got 1") != std::string::npos);
    CHECK(error_kind([&] { parse_model(text); }) == ModelError::Kind::validation);
}

TEST_CASE("loader names unknown functions and bad lines") {
    std::string text = kHeisenbergText;
    text.replace(text.find("\"-y\""), 4, "\"foo(x)\"");
    const auto msg = error_text([&] { parse_model(text, "m.model"); });
    CHECK(msg.find("foo") != std::string::npos);
    CHECK(msg.find("m.model:8") != std::string::npos);
    CHECK(error_kind([] { parse_model("[chart]\nbox 1 2\n"); }) == ModelError::Kind::parse);
    CHECK(error_kind([] { parse_model("[chart]\n"); }) == ModelError::Kind::parse);
    CHECK(error_kind([] { load_model("/nonexistent.model"); }) == ModelError::Kind::io);
}

TEST_CASE("parameters and potentials from a file") {
    std::string text = kHeisenbergText;
    text += "[params]\nmu = 0.5\n[potential]\nkind = gradient\nexpr = \"mu*(x^2+y^2)\"\n";
    text += "[hypotheses]\ncomplete = true\nvanishing_torsion = true\n";
    const auto m = parse_model(text);
    CHECK(m.mu() == 0.5);
    CHECK(m.hypotheses.complete);
    CHECK_FALSE(m.hypotheses.closed);
    CHECK(eval(m.potential, {1, 1, 0}, m.structure.params) == 1.0);
    CHECK(with_params(m, {{"mu", 2.0}}).mu() == 2.0);
}
