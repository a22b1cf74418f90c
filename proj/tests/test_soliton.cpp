#include <cmath>

#include "crgeo/soliton.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace crgeo;
using fixtures::parse;

namespace {

SolitonCandidate with_potential(const PHStructure& s, const char* src, double mu, SolitonKind kind) {
    return {s, parse(s, src), mu, kind};
}

double worst(const SolitonReport& r) {
    double w = 0;
    for (const auto& e : r.checks.entries) w = std::max(w, e.residual);
    return w;
}

}  // namespace

TEST_CASE("classification flags follow the sign of mu") {
    CHECK(classify(1e-300) == SolitonType::shrinking);
    CHECK(classify(0.0) == SolitonType::steady);
    CHECK(classify(-2.0) == SolitonType::expanding);
    CHECK(type_name(SolitonType::expanding) == "expanding");
}

TEST_CASE("pseudo Gaussian soliton for mu in {-1, 0, 1, 2}") {
    for (double mu : {-1.0, 0.0, 1.0, 2.0}) {
        const auto m = builtin("heisenberg_gaussian", {{"mu", mu}});
        const auto c = candidate_from(m);
        const auto rep = check_pseudo_gradient(c, halton_samples(m.structure.chart, 256, 7));
        INFO(mu);
        CHECK(rep.pass());
        CHECK(rep.checks.entries.size() == 7);
        CHECK(worst(rep) < 1e-9);
        CHECK(rep.type == classify(mu));
        CHECK(rep.tolerance == kSolitonTolerance);
    }
}

TEST_CASE("x^3 is not a pseudo-gradient soliton") {
    const auto s = builtin("heisenberg").structure;
    const auto rep = check_pseudo_gradient(with_potential(s, "x^3", 0.0, SolitonKind::gradient),
                                           halton_samples(s.chart, 64, 7));
    CHECK_FALSE(rep.pass());
    CHECK(rep.checks.find("phi_11")->residual > 1e-2);
    CHECK(rep.checks.find("real_hessian_diagonal")->residual > 1e-2);
    // the two formulations agree even when the candidate fails
    CHECK(rep.checks.find("formulation_agreement")->pass);
}

TEST_CASE("real and complex formulations agree on generic fields with torsion") {
    const auto s = fixtures::torsion_model();
    const auto rep = check_pseudo_gradient(with_potential(s, "x*y^2+sin(t)", 0.3, SolitonKind::gradient),
                                           halton_samples(s.chart, 32, 7));
    CHECK(rep.checks.find("formulation_agreement")->residual < 1e-9);
}

TEST_CASE("trivial soliton on the sphere") {
    const auto m = builtin("cr_sphere_trivial");
    const auto samples = halton_samples(m.structure.chart, 64, 7);
    CHECK(check_pseudo_gradient(candidate_from(m), samples).pass());
    const auto f = with_potential(m.structure, "0", kSphereW, SolitonKind::contact);
    const auto rep = check_cr_soliton(f, samples);
    CHECK(rep.pass());
    CHECK(worst(rep) < 1e-9);
    const auto h = harnack_residual(f, samples);
    CHECK(h.precondition);
    CHECK(h.value.value < 1e-8);
    CHECK_FALSE(check_pseudo_gradient(with_potential(m.structure, "0", 1.0, SolitonKind::gradient), samples).pass());
}

TEST_CASE("heisenberg_contact: Definition of CR Yamabe soliton with f = 2 mu t") {
    for (double mu : {-1.0, 0.5, 2.0}) {
        const auto m = builtin("heisenberg_contact", {{"mu", mu}});
        const auto samples = halton_samples(m.structure.chart, 256, 7);
        const auto rep = check_cr_soliton(candidate_from(m), samples);
        CHECK(rep.pass());
        CHECK(worst(rep) < 1e-9);
        const auto h = harnack_residual(candidate_from(m), samples);
        CHECK(h.precondition);
        CHECK(h.value.value == 0.0);
        CHECK(h.entry().pass);
    }
}

TEST_CASE("f = t^2 is rejected and the Harnack identity is not asserted") {
    const auto s = builtin("heisenberg").structure;
    const auto c = with_potential(s, "t^2", 0.0, SolitonKind::contact);
    const auto samples = halton_samples(s.chart, 64, 7);
    const auto rep = check_cr_soliton(c, samples);
    CHECK_FALSE(rep.pass());
    CHECK(rep.checks.find("soliton_trace")->residual > 1e-2);
    // r1 = |f_0 / 2| = |t|
    const auto* e = rep.checks.find("soliton_trace");
    CHECK(e->residual == doctest::Approx(std::abs((*e->worst)[2])));
    const auto h = harnack_residual(c, samples);
    CHECK_FALSE(h.precondition);
    const auto entry = h.entry();
    CHECK_FALSE(entry.applicable);
    CHECK(entry.note.find("precondition failed") != std::string::npos);
}

TEST_CASE("Harnack quantity vanishes on a non-flat trivial soliton and not elsewhere") {
    const auto s = builtin("cr_sphere").structure;
    const Point p{0.2, 0.1, -0.3};
    const auto g = geometry_at(s, p, 6);
    const Jet zero = eval_jet(parse(s, "0"), p, {}, 6);
    CHECK(std::abs(harnack_quantity(g, zero, kSphereW)) < 1e-8);
    // 2W(W - mu) with mu != W
    CHECK(harnack_quantity(g, zero, 1.0) == doctest::Approx(2 * kSphereW * (kSphereW - 1.0)).epsilon(1e-8));
}

TEST_CASE("conserved quantities on the pseudo Gaussian soliton") {
    for (double mu : {-1.0, 1.0, 2.0}) {
        const auto m = builtin("heisenberg_gaussian", {{"mu", mu}});
        const auto rep = conserved_quantities(candidate_from(m), halton_samples(m.structure.chart, 256, 7));
        INFO(mu);
        CHECK(rep.pass());
        REQUIRE(rep.C);
        CHECK(std::abs(rep.C->mean) < 1e-10);
        CHECK(rep.C->spread() < 1e-10);
        CHECK(rep.checks.find("grad_W_exp_phi")->residual < 1e-10);
        CHECK(rep.checks.find("identity_W1")->residual == 0.0);
        CHECK(rep.checks.find("gradient_norm_level")->residual < 1e-10);
        for (const auto& e : rep.checks.entries) CHECK(e.applicable);
    }
}

TEST_CASE("conserved quantities on the sphere's trivial soliton") {
    const auto m = builtin("cr_sphere_trivial");
    const auto rep = conserved_quantities(candidate_from(m), halton_samples(m.structure.chart, 64, 7));
    CHECK(rep.pass());
    CHECK(rep.C->mean == doctest::Approx(kSphereW));
    CHECK(rep.C->spread() < 1e-8);
}

TEST_CASE("conserved quantities are gated on torsion and on the soliton equations") {
    const auto s = fixtures::torsion_model();
    const auto rep = conserved_quantities(with_potential(s, "0", 0.0, SolitonKind::gradient),
                                          halton_samples(s.chart, 16, 7));
    CHECK_FALSE(rep.pass());
    CHECK_FALSE(rep.checks.find("torsion_gate")->pass);
    const auto h = builtin("heisenberg").structure;
    const auto bad = conserved_quantities(with_potential(h, "x^3", 0.0, SolitonKind::gradient),
                                          halton_samples(h.chart, 16, 7));
    CHECK_FALSE(bad.pass());
    CHECK_FALSE(bad.checks.find("soliton_precondition")->pass);
    CHECK_FALSE(bad.checks.find("conserved_C")->applicable);
}

TEST_CASE("Bakry-Emery Ricci and torsion") {
    const auto m = builtin("heisenberg_gaussian", {{"mu", 1.5}});
    const auto c = candidate_from(m);
    const Point p{0.3, -0.7, 1.1};
    // X = Z1 + Z1bar = e1
    const auto b = bakry_emery(c, {1.0, 0.0}, p);
    CHECK(b.ric_be == doctest::Approx(1.5));
    CHECK(b.ric_residual < 1e-9);
    CHECK(b.tor_residual < 1e-9);
    const auto z = bakry_emery(c, {0.0, 0.0}, p);
    CHECK(z.ric_be == 0.0);
    CHECK(z.tor_be == 0.0);
    const auto t = candidate_from(builtin("cr_sphere_trivial"));
    const auto bs = bakry_emery(t, {0.6, -0.8}, {0.1, 0.2, 0.3});
    CHECK(bs.ric_be == doctest::Approx(kSphereW));
    CHECK(bs.ric_residual < 1e-9);
}

TEST_CASE("rapidly oscillating potentials relax the tolerance") {
    const auto s = builtin("heisenberg").structure;
    const auto rep = check_pseudo_gradient(with_potential(s, "sin(200*x)", 0.0, SolitonKind::gradient),
                                           halton_samples(s.chart, 8, 7));
    CHECK(rep.tolerance == kRelaxedTolerance);
    CHECK(rep.checks.entries.front().note.find("relaxed") != std::string::npos);
}
