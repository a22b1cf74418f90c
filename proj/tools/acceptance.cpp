// Acceptance run: one PASS/FAIL line per criterion, with detail lines below.
// Exit status is nonzero only on failures outside the known-unattainable checks.

#include <array>
#include <chrono>
#include <cstdio>
#include <random>
#include <cstdlib>
#include <functional>
#include <string>

#include "crgeo/riemann.hpp"

using namespace crgeo;

namespace {

#ifndef CRGEO_BIN
#define CRGEO_BIN "crgeo"
#endif

struct Criterion {
    int id;
    std::string title;
    bool pass = true;
    bool unexpected = false;  // a failure outside the known-unattainable checks
    std::vector<std::string> details;

    void require(bool ok, const std::string& what, double value, bool known = false) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " (%.3e)", value);
        details.push_back(std::string(ok ? "ok   " : "FAIL ") + what + buf + (!ok && known ? "  [known unattainable]" : ""));
        pass = pass && ok;
        unexpected = unexpected || (!ok && !known);
    }
    void require(bool ok, const std::string& what) {
        details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
        pass = pass && ok;
        unexpected = unexpected || !ok;
    }
};

const std::size_t kSamples = 256, kSeed = 7;

SampleSet samples_for(const ModelDecl& m, std::size_t n = kSamples) { return halton_samples(m.structure.chart, n, kSeed); }

double max_residual(const CheckList& l) {
    double w = 0;
    for (const auto& e : l.entries) w = std::max(w, e.residual);
    return w;
}

double residual(const CheckList& l, const std::string& name) {
    const auto* e = l.find(name);
    return e ? e->residual : INFINITY;
}

Expr parse(const PHStructure& s, const std::string& src) {
    std::vector<std::string> names;
    for (const auto& [k, v] : s.params) names.push_back(k);
    return parse_expr(src, s.chart.coord_list(), names);
}

std::string random_polynomial(std::mt19937_64& rng, int deg) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::string out = "0";
    for (int a = 0; a <= deg; ++a)
        for (int b = 0; a + b <= deg; ++b)
            for (int c = 0; a + b + c <= deg; ++c) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "+(%.6f)*x^%d*y^%d*t^%d", coef(rng), a, b, c);
                out += buf;
            }
    return out;
}

double cabs(const CJet& z) { return std::hypot(z.re.value(), z.im.value()); }

void structure_normalization(Criterion& c) {
    for (const char* name : {"heisenberg", "cr_sphere"}) {
        const auto m = builtin(name);
        const auto l = validate(m.structure, samples_for(m));
        for (const char* k : {"theta(e1)", "theta(e2)", "normalization", "structure_equation"})
            c.require(residual(l, k) < 1e-9, std::string(name) + " " + k, residual(l, k));
    }
}

void commutation(Criterion& c) {
    std::mt19937_64 rng(kSeed);
    for (const char* name : {"heisenberg", "cr_sphere"}) {
        const auto m = builtin(name);
        const auto samples = samples_for(m, 32);
        double worst = 0;
        for (int k = 0; k < 20; ++k) {
            const auto rep = commutation_residuals(m.structure, parse(m.structure, random_polynomial(rng, 4)), samples);
            worst = std::max(worst, max_residual(rep.entries(1e-8)));
        }
        c.require(worst < 1e-8, std::string(name) + ": 20 degree-4 polynomials, 32 samples each", worst);
    }
}

void flat_model(Criterion& c) {
    const auto m = builtin("heisenberg");
    double W = 0, A = 0, th = 0, Q = 0, R1 = 0;
    for (const auto& p : samples_for(m).points) {
        const auto g = geometry_at(m.structure, p);
        W = std::max(W, std::abs(g.curv.W.value()));
        A = std::max(A, cabs(g.conn.A11));
        for (const auto& v : g.conn.theta11) th = std::max(th, cabs(v));
        Q = std::max(Q, cartan_tensor(g).magnitude());
        R1 = std::max(R1, cabs(q_curvature(g).R1));
    }
    c.require(W < 1e-10, "W = 0", W);
    c.require(A < 1e-10, "A11 = 0", A);
    c.require(th < 1e-10, "theta_1^1 = 0", th);
    c.require(Q < 1e-10, "Q11 = 0", Q);
    c.require(R1 < 1e-10, "R_1 = 0", R1);
}

void sphere_model(Criterion& c) {
    const auto m = builtin("cr_sphere");
    double wmin = INFINITY, wmax = -INFINITY, A = 0, Q = 0;
    for (const auto& p : samples_for(m).points) {
        const auto g = geometry_at(m.structure, p);
        wmin = std::min(wmin, g.curv.W.value());
        wmax = std::max(wmax, g.curv.W.value());
        A = std::max(A, cabs(g.conn.A11));
        Q = std::max(Q, cartan_tensor(g).magnitude());
    }
    c.require(wmax - wmin < 1e-8, "W spread (W = " + std::to_string(wmin) + ")", wmax - wmin);
    c.require(A < 1e-9, "|A11|", A);
    c.require(Q < 1e-7, "|Q11|", Q);
    for (double l : {0.5, 1.0, 2.0}) {
        const auto r = adapted_metric_suite(m.structure, l, samples_for(m));
        const double s = residual(r.checks, "scalar_curvature");
        c.require(s < 1e-7, "R^lambda = 4W - 2 lambda^-2, lambda = " + std::to_string(l), s);
    }
}

void ricci_matrix(Criterion& c) {
    for (const char* name : {"heisenberg", "cr_sphere"}) {
        const auto m = builtin(name);
        for (double l : {0.5, 1.0, 2.0}) {
            const auto r = adapted_metric_suite(m.structure, l, samples_for(m));
            const double d = residual(r.checks, "ricci_diagonal"), o = residual(r.checks, "ricci_offdiagonal");
            c.require(std::max(d, o) < 1e-7, std::string(name) + " lambda = " + std::to_string(l), std::max(d, o));
        }
    }
}

void solitons(Criterion& c) {
    for (double mu : {-1.0, 0.0, 1.0, 2.0}) {
        const auto m = builtin("heisenberg_gaussian", {{"mu", mu}});
        const auto r = check_pseudo_gradient(candidate_from(m), samples_for(m));
        c.require(r.pass() && max_residual(r.checks) < 1e-9, "heisenberg_gaussian mu = " + std::to_string(mu),
                  max_residual(r.checks));
    }
    for (double mu : {-1.0, 0.5, 1.0, 2.0}) {
        const auto m = builtin("heisenberg_contact", {{"mu", mu}});
        const auto r = check_cr_soliton(candidate_from(m), samples_for(m));
        c.require(r.pass() && max_residual(r.checks) < 1e-9, "heisenberg_contact mu = " + std::to_string(mu),
                  max_residual(r.checks));
    }
    const auto h = builtin("heisenberg");
    const auto x3 = check_pseudo_gradient({h.structure, parse(h.structure, "x^3"), 0.0, SolitonKind::gradient},
                                          samples_for(h));
    c.require(!x3.pass() && max_residual(x3.checks) > 1e-2, "phi = x^3 rejected", max_residual(x3.checks));
    const auto t2 =
        check_cr_soliton({h.structure, parse(h.structure, "t^2"), 0.0, SolitonKind::contact}, samples_for(h));
    c.require(!t2.pass() && max_residual(t2.checks) > 1e-2, "f = t^2 rejected", max_residual(t2.checks));
}

void harnack(Criterion& c) {
    for (double mu : {-1.0, 0.5, 1.0, 2.0}) {
        const auto m = builtin("heisenberg_contact", {{"mu", mu}});
        const auto h = harnack_residual(candidate_from(m), samples_for(m));
        c.require(h.precondition && h.value.value == 0.0, "heisenberg_contact mu = " + std::to_string(mu) + " exactly 0",
                  h.value.value);
    }
    const auto s = builtin("cr_sphere_trivial");
    const auto h = harnack_residual({s.structure, parse(s.structure, "0"), kSphereW, SolitonKind::contact},
                                    samples_for(s));
    c.require(h.precondition && h.value.value < 1e-7, "cr_sphere with f = 0, mu = W", h.value.value);
}

void conserved(Criterion& c) {
    const auto m = builtin("heisenberg_gaussian", {{"mu", 1.0}});
    const auto r = conserved_quantities(candidate_from(m), samples_for(m));
    c.require(r.C && r.C->spread() < 1e-7, "spread of C", r.C ? r.C->spread() : INFINITY);
    c.require(residual(r.checks, "grad_W_exp_phi") < 1e-7, "|grad_b(W e^-phi)|", residual(r.checks, "grad_W_exp_phi"));
    const double w1 = residual(r.checks, "identity_W1");
    c.require(w1 < 1e-8, "W_1 = -i A11 phi_1bar + W phi_1", w1);
}

void conformal(Criterion& c) {
    std::mt19937_64 rng(kSeed);
    auto coef = [&] { return -0.2 + 0.4 * (static_cast<double>(rng() >> 11) * 0x1.0p-53); };
    for (const char* name : {"heisenberg", "cr_sphere"}) {
        const auto m = builtin(name);
        const auto samples = samples_for(m, 16);
        double r1 = 0, cor = 0;
        std::size_t cor_count = 0;
        for (int k = 0; k < 10; ++k) {
            char buf[200];
            std::snprintf(buf, sizeof buf, "%.4f*x+%.4f*y+%.4f*t+%.4f*x*y+%.4f*t^2+%.4f*x^2", coef(), coef(), coef(),
                          coef(), coef(), coef());
            const auto rep = conformal_change(m.structure, parse(m.structure, buf), samples);
            r1 = std::max(r1, rep.r1.value);
            cor = std::max(cor, rep.corollary.value);
            cor_count += rep.corollary.count;
        }
        c.require(r1 < 1e-6, std::string(name) + ": R~_1 direct vs law over 10 factors", r1);
        c.require(cor_count > 0 && cor < 1e-6, std::string(name) + ": corollary identity", cor);
    }
}

void level_sets(Criterion& c) {
    const auto m = builtin("heisenberg_gaussian", {{"mu", 1.0}});
    const auto r = isoparametric_check(candidate_from(m), 1.0, {0.5, 1.0, 2.0}, kSamples, kSeed);
    for (const char* lv : {"0.5", "1", "2"}) {
        const std::string p = std::string("c=") + lv + ": ";
        auto need = [&](const char* name, const char* text, bool known = false) {
            const auto* e = r.checks.find(p + name);
            c.require(e && e->pass, p + text, e ? e->residual : INFINITY, known);
        };
        need("II_33", "II(E3,E3) < 1e-8");
        need("II_23", "|II(E2,E3) - 1/lambda| < 1e-7");
        need("Rm_2323", "|Rm(E2,E3,E2,E3) - lambda^-2| < 1e-7");
        need("gauss_curvature", "|K| < 1e-7");
        need("grad_norm_spread", "spread of |grad phi| < 1e-6");
        need("laplacian_spread", "spread of Delta phi < 1e-6");
        // With (e1, e2, lambda T) orthonormal and W + Delta_b phi / 2 = mu, Delta phi = 2 Delta_b phi.
        need("laplacian_equals_sub_laplacian", "Delta phi = Delta_b phi < 1e-8", true);
        need("laplacian_twice_sub_laplacian", "Delta phi = 2 Delta_b phi < 1e-8");
    }
}

void critical(Criterion& c) {
    const auto m = builtin("heisenberg_gaussian", {{"mu", 1.0}});
    GridSpec g;
    g.box = m.structure.chart.box;
    const auto r = critical_set(candidate_from(m), g);
    c.require(r.components.size() == 1, "one component", static_cast<double>(r.components.size()));
    if (!r.components.empty()) {
        c.require(r.components[0].dimension == 1, "dimension 1");
        c.require(r.components[0].tag == "line", "tag line (" + r.components[0].tag + ")");
    }
    c.require(r.diffeo.case_label == "ii", "case (ii)");
    c.require(r.diffeo.concluded == "R^3", "refined to R^3 (" + r.diffeo.concluded + ")");
}

std::string run_capture(const std::string& cmd) {
    std::string out;
    FILE* f = popen(cmd.c_str(), "r");
    if (!f) return out;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), f)) > 0) out.append(buf.data(), n);
    pclose(f);
    return out;
}

void determinism(Criterion& c, const std::string& bin) {
    const std::string cmd = "'" + bin + "' all --model heisenberg_gaussian --mu 1 --seed 7 2>/dev/null";
    const auto a = run_capture(cmd), b = run_capture(cmd);
    c.require(!a.empty() && a.find("\"schema\": \"crgeo-report/1\"") != std::string::npos, "report produced",
              static_cast<double>(a.size()));
    c.require(!a.empty() && a == b, "byte-identical across two runs");
}

}  // namespace

int main(int argc, char** argv) {
    const std::string bin = argc > 1 ? argv[1] : CRGEO_BIN;
    struct Step {
        int id;
        const char* title;
        std::function<void(Criterion&)> run;
    };
    const std::vector<Step> steps = {
        {1, "structure normalization", structure_normalization},
        {2, "commutation relations", commutation},
        {3, "flat model", flat_model},
        {4, "sphere model", sphere_model},
        {5, "adapted-metric Ricci matrix", ricci_matrix},
        {6, "soliton suite", solitons},
        {7, "Harnack identity", harnack},
        {8, "conserved quantities", conserved},
        {9, "conformal law", conformal},
        {10, "level-set package", level_sets},
        {11, "critical-set classifier", critical},
        {12, "determinism", [&](Criterion& c) { determinism(c, bin); }},
    };
    int unexpected = 0;
    for (const auto& s : steps) {
        Criterion c{s.id, s.title, true, false, {}};
        const auto t0 = std::chrono::steady_clock::now();
        try {
            s.run(c);
        } catch (const std::exception& e) {
            c.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%2d %-4s %-30s %6.2fs%s\n", s.id, c.pass ? "PASS" : "FAIL", s.title, secs,
                    !c.pass && !c.unexpected ? "  (known unattainable)" : "");
        for (const auto& d : c.details)
            if (!c.pass || std::getenv("CRGEO_ACCEPTANCE_VERBOSE")) std::printf("       %s\n", d.c_str());
        if (c.unexpected) ++unexpected;
    }
    std::printf("%s\n", unexpected ? "unexpected failures" : "no unexpected failures");
    return unexpected ? 1 : 0;
}
