#include "crgeo/riemann.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace crgeo {

namespace {

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

JetVec truncated(const JetVec& v, int order) { return {v[0].truncated(order), v[1].truncated(order), v[2].truncated(order)}; }

double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Point& a) { return std::sqrt(dot(a, a)); }

// Unit uniform double from the top 53 bits, independent of the library's distributions.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

AdaptedMetricData adapted_from(const Coframe& cf, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
    if (cf.order < 3) throw InsufficientOrder("adapted metric needs jet order >= 3");
    const int n = cf.order - 1;
    AdaptedMetricData d;
    d.lambda = lambda;
    d.point = cf.point;
    d.frame = {truncated(cf.e1, n), truncated(cf.e2, n), scale(lambda, cf.T)};
    d.coframe = {cf.omega1, cf.omega2, scale(1.0 / lambda, truncated(cf.theta, n))};

    // [E_a, E_b] = c[g][a][b] E_g with c = -d omega^g (E_a, E_b)
    std::array<TwoForm<Jet>, 3> dw;
    for (int g = 0; g < 3; ++g) dw[g] = exterior(d.coframe[g]);
    std::array<std::array<std::array<Jet, 3>, 3>, 3> c;
    for (int g = 0; g < 3; ++g)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) c[g][a][b] = -dw[g](d.frame[a], d.frame[b]);

    // Koszul formula in an orthonormal frame
    std::array<std::array<std::array<Jet, 3>, 3>, 3> G;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int k = 0; k < 3; ++k) {
                G[a][b][k] = 0.5 * (c[k][a][b] - c[a][b][k] + c[b][k][a]);
                d.Gamma[a][b][k] = G[a][b][k].value();
            }

    for (int b = 0; b < 3; ++b)
        for (int k = 0; k < 3; ++k) {
            JetVec f = scale(G[0][b][k], d.coframe[0]);
            for (int a = 1; a < 3; ++a) f = f + scale(G[a][b][k], d.coframe[a]);
            d.forms[b][k] = f;
        }

    for (int b = 0; b < 3; ++b)
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i)
                d.antisymmetry = std::max(d.antisymmetry, std::abs(d.forms[b][k][i].value() + d.forms[k][b][i].value()));

    // d omega^k = sum_b omega^b ^ omega_b^k
    for (int k = 0; k < 3; ++k) {
        auto rhs = wedge(d.coframe[0], d.forms[0][k]);
        for (int b = 1; b < 3; ++b) {
            const auto w = wedge(d.coframe[b], d.forms[b][k]);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) rhs.c[i][j] = rhs.c[i][j] + w.c[i][j];
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                d.first_structure = std::max(d.first_structure, std::abs(dw[k].c[i][j].value() - rhs.c[i][j].value()));
    }

    // Omega_b^k = d omega_b^k - omega_b^m ^ omega_m^k; Rm[a][b][k][m] = Omega_m^k(E_a, E_b)
    for (int m = 0; m < 3; ++m)
        for (int k = 0; k < 3; ++k) {
            TwoForm<Jet> om = exterior(d.forms[m][k]);
            for (int q = 0; q < 3; ++q) {
                const auto w = wedge(d.forms[m][q], d.forms[q][k]);
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) om.c[i][j] = om.c[i][j] - w.c[i][j];
            }
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) d.Rm[a][b][k][m] = om(d.frame[a], d.frame[b]).value();
        }

    const auto& R = d.Rm;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int k = 0; k < 3; ++k)
                for (int m = 0; m < 3; ++m) {
                    d.rm_symmetry = std::max({d.rm_symmetry, std::abs(R[a][b][k][m] + R[b][a][k][m]),
                                              std::abs(R[a][b][k][m] + R[a][b][m][k]),
                                              std::abs(R[a][b][k][m] - R[k][m][a][b])});
                    // R(X,Y)Z + R(Y,Z)X + R(Z,X)Y = 0 with (X,Y,Z) = (E_a, E_b, E_m)
                    d.bianchi = std::max(d.bianchi, std::abs(R[a][b][k][m] + R[b][m][k][a] + R[m][a][k][b]));
                }

    for (int b = 0; b < 3; ++b)
        for (int k = 0; k < 3; ++k) {
            double s = 0.0;
            for (int a = 0; a < 3; ++a) s += R[a][b][a][k];
            d.Ric[b][k] = s;
        }
    d.scalar = d.Ric[0][0] + d.Ric[1][1] + d.Ric[2][2];
    return d;
}

ConnectionIdentities identities_from(const PointGeometry& g, const AdaptedMetricData& d) {
    ConnectionIdentities r;
    const double l = d.lambda;
    // theta_1^1 = i (omega_1^2 - lambda^-2 theta), compared on the frame
    for (int a = 0; a < 3; ++a) {
        const CJet t = contract(g.conn.theta11, d.frame[a]);
        const double theta_a = a == 2 ? l : 0.0;
        r.theta11 = std::max({r.theta11, std::abs(t.re.value()), std::abs(t.im.value() - (d.Gamma[a][0][1] - theta_a / (l * l)))});
    }
    const double reA = g.conn.A11.re.value();
    const double imA = -g.conn.A11.im.value();  // A_{1bar1bar} = conj(A11)
    const std::array<double, 3> w13{-l * reA, -l * imA + 1.0 / l, 0.0};
    const std::array<double, 3> w23{-l * imA - 1.0 / l, l * reA, 0.0};
    for (int a = 0; a < 3; ++a) {
        r.omega13 = std::max(r.omega13, std::abs(d.Gamma[a][0][2] - w13[a]));
        r.omega23 = std::max(r.omega23, std::abs(d.Gamma[a][1][2] - w23[a]));
    }
    return r;
}

}  // namespace

double AdaptedMetricData::rm(const Point& x, const Point& y, const Point& z, const Point& w) const {
    double s = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int k = 0; k < 3; ++k)
                for (int m = 0; m < 3; ++m) s += x[a] * y[b] * z[k] * w[m] * Rm[a][b][k][m];
    return s;
}

AdaptedMetricData adapted_metric(const PHStructure& s, double lambda, const Point& p, int order) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    return adapted_from(coframe(s, p, order), lambda);
}

ConnectionIdentities connection_form_identities(const PHStructure& s, double lambda, const Point& p, int order) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    const auto g = geometry_at(s, p, order);
    return identities_from(g, adapted_from(g.frame, lambda));
}

AdaptedMetricReport adapted_metric_suite(const PHStructure& s, double lambda, const SampleSet& samples, int order) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    struct P {
        double A = 0, scalar = 0, diag = 0, off = 0, sect = 0, theta11 = 0, w13 = 0, w23 = 0;
        double anti = 0, first = 0, sym = 0, bianchi = 0, W = 0;
        Mat3 ric{};
    };
    const std::size_t n = samples.points.size();
    std::vector<P> per(n);
    const double l2 = 1.0 / (lambda * lambda);
    parallel_for(n, [&](std::size_t i) {
        const Point& p = samples.points[i];
        const auto g = geometry_at(s, p, order);
        const auto d = adapted_from(g.frame, lambda);
        const double W = g.curv.W.value();
        P r;
        r.W = W;
        r.ric = d.Ric;
        r.A = std::hypot(g.conn.A11.re.value(), g.conn.A11.im.value());
        r.scalar = d.scalar - (4 * W - 2 * l2);
        const std::array<double, 3> expect{2 * W - 2 * l2, 2 * W - 2 * l2, 2 * l2};
        for (int a = 0; a < 3; ++a) {
            r.diag = std::max(r.diag, std::abs(d.Ric[a][a] - expect[a]));
            for (int b = 0; b < 3; ++b)
                if (a != b) r.off = std::max(r.off, std::abs(d.Ric[a][b]));
        }
        std::mt19937_64 rng(samples.seed * 1000003u + i);
        const Point e3{0, 0, 1};
        for (int k = 0; k < 8; ++k) {
            const double ang = 2 * M_PI * unit(rng);
            const Point V{std::cos(ang), std::sin(ang), 0};
            r.sect = std::max(r.sect, std::abs(d.rm(V, e3, V, e3) - l2));
        }
        const auto ci = identities_from(g, d);
        r.theta11 = ci.theta11;
        r.w13 = ci.omega13;
        r.w23 = ci.omega23;
        r.anti = d.antisymmetry;
        r.first = d.first_structure;
        r.sym = d.rm_symmetry;
        r.bianchi = d.bianchi;
        per[i] = r;
    });

    MaxResidual A, sc, dg, off, sect, t11, w13, w23, anti, first, sym, bi;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = samples.points[i];
        A.add(per[i].A, p);
        sc.add(per[i].scalar, p);
        dg.add(per[i].diag, p);
        off.add(per[i].off, p);
        sect.add(per[i].sect, p);
        t11.add(per[i].theta11, p);
        w13.add(per[i].w13, p);
        w23.add(per[i].w23, p);
        anti.add(per[i].anti, p);
        first.add(per[i].first, p);
        sym.add(per[i].sym, p);
        bi.add(per[i].bianchi, p);
    }

    AdaptedMetricReport rep;
    rep.lambda = lambda;
    if (n > 0) {
        rep.ricci_at_first = per[0].ric;
        rep.W_at_first = per[0].W;
    }
    auto& e = rep.checks.entries;
    e.push_back(anti.entry("connection_antisymmetry", "Levi-Civita forms are antisymmetric, omega_a^b + omega_b^a = 0", 1e-8));
    e.push_back(first.entry("first_structure", "d omega^a = omega^b ^ omega_b^a", 1e-8));
    e.push_back(sym.entry("riemann_symmetries", "Rm antisymmetric in each pair and symmetric under pair exchange", 1e-8));
    e.push_back(bi.entry("first_bianchi", "first Bianchi identity", 1e-8));
    e.push_back(t11.entry("theta11_identity", "theta_1^1 = i (omega_1^2 - lambda^-2 theta)", 1e-8));
    e.push_back(w13.entry("omega13_identity",
                          "omega_1^3 = -lambda Re A_{1bar1bar} omega^1 + (-lambda Im A_{1bar1bar} + 1/lambda) omega^2", 1e-8));
    e.push_back(w23.entry("omega23_identity",
                          "omega_2^3 = (-lambda Im A_{1bar1bar} - 1/lambda) omega^1 + lambda Re A_{1bar1bar} omega^2", 1e-8));

    const CheckEntry gate = A.entry("torsion_gate", "hypothesis: vanishing torsion, |A11| = 0", 1e-8);
    e.push_back(gate);
    std::vector<CheckEntry> lemma = {
        sc.entry("scalar_curvature", "adapted-metric scalar curvature R = 4W - 2 lambda^-2", 1e-7),
        dg.entry("ricci_diagonal", "Ricci of h^lambda is diag(2W - 2 lambda^-2, 2W - 2 lambda^-2, 2 lambda^-2)", 1e-7),
        off.entry("ricci_offdiagonal", "Ricci of h^lambda has no off-diagonal entries in (e1, e2, lambda T)", 1e-8),
        sect.entry("sectional_V_e3", "sectional curvature of span(V, e3) is lambda^-2 for horizontal unit V", 1e-8),
    };
    for (auto& x : lemma) {
        if (!gate.pass) x.mark_not_applicable("torsion does not vanish; identity not asserted");
        e.push_back(std::move(x));
    }
    return rep;
}

// Level surfaces ------------------------------------------------------------------

LevelSurfaceSample level_sample(const SolitonCandidate& c, double lambda, const Point& p, int order) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    const auto g = geometry_at(c.structure, p, order);
    const auto d = adapted_from(g.frame, lambda);
    const Jet f = eval_jet(c.potential, p, c.structure.params, order);

    LevelSurfaceSample s;
    s.point = p;
    s.phi = f.value();
    const JetVec df = gradient(f);
    std::array<Jet, 3> Ef;
    Point u{};
    for (int a = 0; a < 3; ++a) {
        Ef[a] = contract(df, d.frame[a]);
        u[a] = Ef[a].value();
    }
    Mat3 H{};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double v = directional(d.frame[a], Ef[b]).value();
            for (int k = 0; k < 3; ++k) v -= d.Gamma[a][b][k] * u[k];
            H[a][b] = v;
        }
    s.grad_norm = norm(u);
    s.laplacian = H[0][0] + H[1][1] + H[2][2];
    s.sub_laplacian = sub_laplacian(g, f).complex_path.value();
    s.grad_b_norm = std::sqrt(std::max(0.0, gradient_norm2(g, f).value()));

    const double gn = s.grad_norm;
    if (gn > 0.0) {
        const Point E1{u[0] / gn, u[1] / gn, u[2] / gn};
        const double h = std::hypot(E1[0], E1[1]);
        Point E2{0, 0, 0}, E3{0, 0, 1};
        if (h > 0.0) E2 = {E1[1] / h, -E1[0] / h, 0.0};
        for (int a = 0; a < 3; ++a) E3[a] -= E1[2] * E1[a];
        const double n3 = norm(E3);
        for (auto& v : E3) v /= n3;
        s.E = {E1, E2, E3};

        auto hess = [&](const Point& x, const Point& y) {
            double v = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) v += x[a] * y[b] * H[a][b];
            return v;
        };
        // II(X, Y) = <nabla_X Y, E1> = -Hess phi(X, Y) / |grad phi| for tangent X, Y
        s.II22 = -hess(E2, E2) / gn;
        s.II23 = -hess(E2, E3) / gn;
        s.II33 = -hess(E3, E3) / gn;
        s.rm2323 = d.rm(E2, E3, E2, E3);
        s.K = s.rm2323 - s.II23 * s.II23 + s.II22 * s.II33;

        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                s.orthonormality = std::max(s.orthonormality, std::abs(dot(s.E[i], s.E[j]) - (i == j ? 1.0 : 0.0)));
        s.tangency = std::max(std::abs(dot(E2, u)), std::abs(dot(E3, u)));

        // nabla_X T = lambda^-1 sum_a X^a Gamma[a][2][k] E_k
        auto nablaT = [&](const Point& x) {
            Point r{};
            for (int k = 0; k < 3; ++k)
                for (int a = 0; a < 3; ++a) r[k] += x[a] * d.Gamma[a][2][k] / lambda;
            return r;
        };
        s.T_parallel = std::max(norm(nablaT(E3)), std::abs(dot(nablaT(E2), E2)));
    }

    // grad_b(phi_1 phi_1bar) = (mu - W) grad_b phi, Z1 and T components
    const auto grad = horizontal_gradient(g, f);
    const double W = g.curv.W.value();
    const IndexedCoeff nc = scalar(grad.phi1 * grad.phi1bar);
    const CJet n1 = derive(g, nc, "1").value;
    const CJet n0 = derive(g, nc, "0").value;
    const double phi0 = derive(g, scalar(f), "0").value.re.value();
    const CJet diff = n1 - grad.phi1 * (c.mu - W);
    s.gradient_level = std::max(std::hypot(diff.re.value(), diff.im.value()),
                                std::hypot(n0.re.value() - (c.mu - W) * phi0, n0.im.value()));
    return s;
}

namespace {

struct Projected {
    Point p{};
    bool ok = false;
    int iterations = 0;
    std::string why;
};

bool inside(const std::array<Interval, 3>& dom, const Point& p) {
    for (int i = 0; i < 3; ++i)
        if (!(p[i] > dom[i].lo && p[i] < dom[i].hi)) return false;
    return true;
}

// Damped Newton along the coordinate gradient towards {phi = value}.
Projected project(const SolitonCandidate& c, double value, Point q, const Projection& pr) {
    const auto& chart = c.structure.chart;
    auto eval = [&](const Point& x) { return eval_jet(c.potential, x, c.structure.params, 1); };
    Projected out;
    try {
        Jet f = eval(q);
        for (int it = 0; it <= pr.max_iterations; ++it) {
            const double r = f.value() - value;
            if (std::abs(r) < pr.tolerance) {
                out.p = q;
                out.ok = true;
                out.iterations = it;
                return out;
            }
            if (it == pr.max_iterations) break;
            const Point gv{f.partial(0).value(), f.partial(1).value(), f.partial(2).value()};
            const double g2 = dot(gv, gv);
            if (!(g2 > 0.0)) {
                out.why = "vanishing gradient";
                return out;
            }
            double step = 1.0;
            bool moved = false;
            for (int k = 0; k < 30; ++k, step *= 0.5) {
                Point nq = q;
                for (int i = 0; i < 3; ++i) nq[i] -= step * r / g2 * gv[i];
                if (!inside(chart.domain, nq)) continue;
                const Jet nf = eval(nq);
                if (std::abs(nf.value() - value) < std::abs(r)) {
                    q = nq;
                    f = nf;
                    moved = true;
                    break;
                }
            }
            if (!moved) {
                out.why = "line search stalled";
                return out;
            }
        }
        out.why = "no convergence in " + std::to_string(pr.max_iterations) + " iterations";
    } catch (const std::exception& e) {
        out.why = e.what();
    }
    return out;
}

}  // namespace

LevelSurface level_surface(const SolitonCandidate& c, double lambda, double value, std::size_t n, std::size_t seed,
                           const Projection& proj, int order) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    const SampleSet seeds = halton_samples(c.structure.chart, n, seed);
    std::vector<Projected> pts(n);
    std::vector<LevelSurfaceSample> per(n);
    parallel_for(n, [&](std::size_t i) {
        pts[i] = project(c, value, seeds.points[i], proj);
        if (pts[i].ok) {
            per[i] = level_sample(c, lambda, pts[i].p, order);
            per[i].iterations = pts[i].iterations;
        }
    });
    LevelSurface out;
    out.value = value;
    for (std::size_t i = 0; i < n; ++i) {
        if (!pts[i].ok) {
            out.failures.push_back("seed " + std::to_string(i) + " at " + format_point(seeds.points[i]) + ": " +
                                   pts[i].why);
            continue;
        }
        if (per[i].grad_norm <= 10 * proj.epsilon) {
            out.critical = true;
            continue;
        }
        out.samples.push_back(per[i]);
    }
    if (out.critical) out.samples.clear();
    return out;
}

IsoparametricReport isoparametric_check(const SolitonCandidate& c, double lambda, const std::vector<double>& values,
                                        std::size_t n, std::size_t seed, int order) {
    IsoparametricReport rep;
    auto& e = rep.checks.entries;
    const SampleSet pre_samples = halton_samples(c.structure.chart, 64, seed);

    // constant potentials have no regular values
    bool constant = true;
    for (const auto& p : pre_samples.points) {
        const Jet f = eval_jet(c.potential, p, c.structure.params, 1);
        if (std::abs(f.partial(0).value()) + std::abs(f.partial(1).value()) + std::abs(f.partial(2).value()) > 1e-14) {
            constant = false;
            break;
        }
    }
    if (constant) {
        rep.vacuous = true;
        CheckEntry v;
        v.name = "isoparametric";
        v.anchor = "phi is isoparametric for h^lambda";
        v.mark_not_applicable("vacuous: potential is constant, no regular values");
        e.push_back(v);
        return rep;
    }

    const SolitonReport base = check_pseudo_gradient(c, pre_samples, order);
    CheckEntry pre;
    pre.name = "soliton_precondition";
    pre.anchor = "candidate is a pseudo-gradient CR Yamabe soliton";
    for (const auto& x : base.checks.entries) pre.residual = std::max(pre.residual, x.residual);
    pre.tolerance = base.tolerance;
    pre.samples = pre_samples.points.size();
    pre.pass = base.pass();
    e.push_back(pre);

    MaxResidual torsion;
    for (const auto& p : pre_samples.points) {
        const auto conn = connection(c.structure, p, order);
        torsion.add(std::hypot(conn.A11.re.value(), conn.A11.im.value()), p);
    }
    e.push_back(torsion.entry("torsion_gate", "hypothesis: vanishing torsion, |A11| = 0", 1e-8));

    const double il = 1.0 / lambda;
    for (double cv : values) {
        LevelSurface ls = level_surface(c, lambda, cv, n, seed, {}, order);
        const std::string tag = "c=" + fmt_g(cv) + ": ";
        CheckEntry proj;
        proj.name = tag + "projection";
        proj.anchor = "Newton projection onto the regular level set";
        proj.samples = n;
        proj.residual = static_cast<double>(ls.failures.size());
        proj.pass = !ls.critical && !ls.samples.empty();
        if (ls.critical)
            proj.note = "rejected: critical value";
        else if (ls.samples.empty())
            proj.note = "no sample converged";
        else if (!ls.failures.empty())
            proj.note = std::to_string(ls.failures.size()) + " seeds failed to converge";
        e.push_back(proj);

        LevelRow row;
        row.value = cv;
        row.samples = ls.samples.size();
        MaxResidual ii33, ii23, rm, K, tpar, orth, tan, lvl, lap_eq, lap2;
        Spread gs{0, INFINITY, -INFINITY}, ls_{0, INFINITY, -INFINITY};
        double gb = 0.0, sl = 0.0, ii23m = 0.0;
        for (const auto& s : ls.samples) {
            ii33.add(s.II33, s.point);
            ii23.add(s.II23 - il, s.point);
            rm.add(s.rm2323 - il * il, s.point);
            K.add(s.K, s.point);
            tpar.add(s.T_parallel, s.point);
            orth.add(s.orthonormality, s.point);
            tan.add(s.tangency, s.point);
            lvl.add(s.gradient_level, s.point);
            lap_eq.add(s.laplacian - s.sub_laplacian, s.point);
            lap2.add(s.laplacian - 2 * s.sub_laplacian, s.point);
            gs.mean += s.grad_norm;
            gs.min = std::min(gs.min, s.grad_norm);
            gs.max = std::max(gs.max, s.grad_norm);
            ls_.mean += s.laplacian;
            ls_.min = std::min(ls_.min, s.laplacian);
            ls_.max = std::max(ls_.max, s.laplacian);
            gb += s.grad_b_norm;
            sl += s.sub_laplacian;
            ii23m += s.II23;
            row.K_max = std::max(row.K_max, std::abs(s.K));
            row.II33_max = std::max(row.II33_max, std::abs(s.II33));
        }
        if (!ls.samples.empty()) {
            const double m = static_cast<double>(ls.samples.size());
            row.grad_norm = gs.mean / m;
            row.grad_norm_spread = gs.spread();
            row.laplacian = ls_.mean / m;
            row.laplacian_spread = ls_.spread();
            row.grad_b_norm = gb / m;
            row.sub_laplacian = sl / m;
            row.II23 = ii23m / m;
        }
        rep.rows.push_back(row);

        auto spread_entry = [&](const char* name, const char* anchor, double spread) {
            MaxResidual r;
            if (!ls.samples.empty()) {
                r.value = spread;
                r.where = ls.samples.front().point;
                r.count = ls.samples.size();
            }
            return r.entry(tag + name, anchor, 1e-6);
        };
        e.push_back(spread_entry("grad_norm_spread", "|grad phi| is constant on level sets (isoparametric)", row.grad_norm_spread));
        e.push_back(spread_entry("laplacian_spread", "Delta phi is constant on level sets (isoparametric)", row.laplacian_spread));
        auto eq = lap_eq.entry(tag + "laplacian_equals_sub_laplacian",
                               "Riemannian Laplacian of h^lambda equals the sublaplacian, Delta phi = Delta_b phi", 1e-8);
        eq.note = "known unattainable: (e1, e2) are unit for h^lambda while W + Delta_b phi / 2 = mu fixes "
                  "Delta_b phi = (phi_e1e1 + phi_e2e2) / 2, so Delta phi = 2 Delta_b phi";
        e.push_back(eq);
        e.push_back(lap2.entry(tag + "laplacian_twice_sub_laplacian",
                               "Delta phi = 2 Delta_b phi for the orthonormal frame (e1, e2, lambda T) when phi_0 = 0", 1e-8));
        e.push_back(ii33.entry(tag + "II_33", "II(E3, E3) = <nabla_{e3} e3, E1> = 0", 1e-8));
        e.push_back(ii23.entry(tag + "II_23", "II(E2, E3) = 1/lambda", 1e-7));
        e.push_back(rm.entry(tag + "Rm_2323", "Rm(V, e3, V, e3) = lambda^-2 on the tangent plane", 1e-7));
        e.push_back(K.entry(tag + "gauss_curvature", "regular level surfaces have zero Gaussian curvature (Gauss equation)", 1e-7));
        e.push_back(tpar.entry(tag + "T_parallel", "T is parallel on the level surface: nabla_{E3} T = 0, <nabla_{E2} T, E2> = 0", 1e-8));
        e.push_back(orth.entry(tag + "frame_orthonormal", "(E1, E2, E3) orthonormal for h^lambda", 1e-9));
        e.push_back(tan.entry(tag + "frame_tangent", "E2, E3 tangent to the level set", 1e-9));
        e.push_back(lvl.entry(tag + "gradient_level",
                              "grad (phi_1 phi_1bar) = (mu - W) grad phi, so |grad_b phi| is constant on levels", 1e-7));
        rep.levels.push_back(std::move(ls));
    }

    // table monotone in c (strictly, over levels with samples)
    std::vector<std::pair<double, double>> tbl;
    for (const auto& r : rep.rows)
        if (r.samples > 0) tbl.emplace_back(r.value, r.grad_norm);
    std::sort(tbl.begin(), tbl.end());
    bool up = true, down = true;
    for (std::size_t i = 1; i < tbl.size(); ++i) {
        up = up && tbl[i].second > tbl[i - 1].second;
        down = down && tbl[i].second < tbl[i - 1].second;
    }
    rep.monotone = up || down;
    return rep;
}

// Critical set --------------------------------------------------------------------

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

DiffeoReport classify_components(const std::vector<CriticalComponent>& components) {
    DiffeoReport out;
    auto& d = out;
    std::vector<std::string> curve_tags, surface_tags;
    bool ambiguous = false;
    for (const auto& c : components) {
        // unbounded curves and sheets count when they cross the chart
        const bool counted = !c.boundary || (c.dimension == 1 && c.spanning) || c.dimension == 2;
        if (!counted) {
            ++d.excluded;
            continue;
        }
        if (c.dimension == 1) {
            curve_tags.push_back(c.tag);
        } else if (c.dimension == 2) {
            surface_tags.push_back(c.tag);
        } else {
            ambiguous = true;
        }
        if (c.tag == "unknown") ambiguous = true;
    }
    d.curves = static_cast<int>(curve_tags.size());
    d.surfaces = static_cast<int>(surface_tags.size());

    auto all = [](const std::vector<std::string>& v, const char* t) {
        return !v.empty() && std::all_of(v.begin(), v.end(), [&](const std::string& s) { return s == t; });
    };
    // regular leaves are tubes over the focal varieties
    if (all(curve_tags, "line"))
        d.leaf = "cylinder";
    else if (all(curve_tags, "circle"))
        d.leaf = "torus";
    else if (curve_tags.empty() && !surface_tags.empty() && !ambiguous &&
             std::all_of(surface_tags.begin(), surface_tags.end(), [&](const std::string& s) { return s == surface_tags[0]; }))
        d.leaf = surface_tags[0];

    if (d.excluded > 0) {
        d.reason = "chart does not contain the full critical set: " + std::to_string(d.excluded) +
                   " boundary-touching component(s) excluded";
    }
    if (d.curves == 0) {
        d.case_label = "i";
        d.candidates = {"R^3", "T^2 x R", "S^1 x R^2"};
        if (d.excluded == 0 && !ambiguous) {
            if (d.leaf == "torus") d.concluded = "T^2 x R";
            if (d.leaf == "cylinder") d.concluded = "S^1 x R^2";
            if (d.leaf == "plane") d.concluded = "R^3";
        }
    } else if (d.curves == 1) {
        d.case_label = "ii";
        d.candidates = {"R^3", "T^2 x [0,inf) with T^2 x {0} collapsing to S^1"};
        if (d.excluded == 0 && !ambiguous) {
            if (d.leaf == "cylinder") d.concluded = "R^3";
            if (d.leaf == "torus") d.concluded = "T^2 x [0,inf) with T^2 x {0} collapsing to S^1";
        }
    } else if (d.curves == 2) {
        d.case_label = "iii";
        d.candidates = {"S^3", "S^2 x R", "L(p,q)"};
        if (d.excluded == 0 && !ambiguous) {
            if (d.leaf == "cylinder") d.concluded = "S^2 x R";
            // S^3 and the lens spaces are not distinguished numerically
            if (d.leaf == "torus") d.reason = "two critical circles: S^3 or L(p,q), not distinguished";
        }
    } else {
        d.case_label.clear();
        d.reason = "more than two critical curves: outside the theorem's hypotheses or grid artefact";
    }
    if (ambiguous && d.reason.empty()) d.reason = "ambiguous component shape";
    if (d.concluded != "undetermined" && d.reason.empty())
        d.reason = "case (" + d.case_label + ") refined by the regular leaf topology (" + d.leaf + ")";
    return out;
}

namespace {

struct Pca {
    std::array<double, 3> values{};  // descending
    Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
};

Pca pca(const std::vector<Point>& pts) {
    Pca r;
    if (pts.size() < 2) return r;
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& p : pts) mean += Eigen::Vector3d(p[0], p[1], p[2]);
    mean /= static_cast<double>(pts.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : pts) {
        const Eigen::Vector3d v = Eigen::Vector3d(p[0], p[1], p[2]) - mean;
        cov += v * v.transpose();
    }
    cov /= static_cast<double>(pts.size());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    const Eigen::Vector3d ev = es.eigenvalues();  // ascending
    r.values = {std::max(ev[2], 0.0), std::max(ev[1], 0.0), std::max(ev[0], 0.0)};
    r.axis = es.eigenvectors().col(2);
    return r;
}

// Rank with eigenvalue gap ratio >= 10 between kept and dropped directions.
int rank_of(const std::array<double, 3>& l, std::size_t count) {
    if (count < 2 || l[0] <= 0.0) return 0;
    if (l[0] >= 10 * l[1]) return 1;
    if (l[1] >= 10 * l[2]) return 2;
    return 3;
}

}  // namespace

CriticalSetReport critical_set(const SolitonCandidate& c, const GridSpec& grid) {
    if (grid.cells < 4) throw std::invalid_argument("grid needs at least 4 cells per axis");
    if (!(grid.lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    const int m = grid.cells + 1;
    const std::size_t total = static_cast<std::size_t>(m) * m * m;
    auto coord = [&](int axis, int k) {
        const auto& iv = grid.box[axis];
        return iv.lo + (iv.hi - iv.lo) * k / grid.cells;
    };
    auto node_point = [&](std::size_t id) {
        const int i = static_cast<int>(id / (static_cast<std::size_t>(m) * m));
        const int j = static_cast<int>((id / m) % m);
        const int k = static_cast<int>(id % m);
        return std::array<int, 3>{i, j, k};
    };

    // |grad phi|^2 = (e1 phi)^2 + (e2 phi)^2 + lambda^2 (T phi)^2
    std::vector<char> crit(total, 0);
    std::vector<double> gnorm(total, 0.0);
    parallel_for(static_cast<std::size_t>(m) * m, [&](std::size_t row) {
        const int i = static_cast<int>(row / m), j = static_cast<int>(row % m);
        for (int k = 0; k < m; ++k) {
            const Point p{coord(0, i), coord(1, j), coord(2, k)};
            const std::size_t id = row * m + k;
            try {
                const Jet f = eval_jet(c.potential, p, c.structure.params, 1);
                const JetVec df = gradient(f);
                const JetVec e1 = eval_components(c.structure.e1, p, c.structure.params, 0);
                const JetVec e2 = eval_components(c.structure.e2, p, c.structure.params, 0);
                const JetVec T = reeb(c.structure, p, 1);
                double a = 0, b = 0, t = 0;
                for (int q = 0; q < 3; ++q) {
                    a += e1[q].value() * df[q].value();
                    b += e2[q].value() * df[q].value();
                    t += T[q].value() * df[q].value();
                }
                gnorm[id] = std::sqrt(a * a + b * b + grid.lambda * grid.lambda * t * t);
            } catch (const std::exception&) {
                gnorm[id] = INFINITY;
            }
            crit[id] = gnorm[id] < grid.epsilon;
        }
    });

    CriticalSetReport rep;
    rep.nodes = total;
    std::vector<std::size_t> ids;
    for (std::size_t id = 0; id < total; ++id)
        if (crit[id]) ids.push_back(id);
    rep.critical_nodes = ids.size();

    if (rep.critical_nodes == total) {
        rep.diffeo.trivial = true;
        rep.diffeo.reason = "trivial soliton, classification inapplicable";
        return rep;
    }

    std::unordered_map<std::size_t, std::size_t> slot;
    for (std::size_t s = 0; s < ids.size(); ++s) slot.emplace(ids[s], s);
    UnionFind uf(ids.size());
    std::vector<int> degree(ids.size(), 0);
    for (std::size_t s = 0; s < ids.size(); ++s) {
        const auto n = node_point(ids[s]);
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj)
                for (int dk = -1; dk <= 1; ++dk) {
                    if (!di && !dj && !dk) continue;
                    const int a = n[0] + di, b = n[1] + dj, q = n[2] + dk;
                    if (a < 0 || b < 0 || q < 0 || a >= m || b >= m || q >= m) continue;
                    const auto it = slot.find((static_cast<std::size_t>(a) * m + b) * m + q);
                    if (it == slot.end()) continue;
                    ++degree[s];
                    uf.unite(s, it->second);
                }
    }

    std::vector<std::size_t> root_index(ids.size(), SIZE_MAX);
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t s = 0; s < ids.size(); ++s) {
        const std::size_t r = uf.find(s);
        if (root_index[r] == SIZE_MAX) {
            root_index[r] = members.size();
            members.emplace_back();
        }
        members[root_index[r]].push_back(s);
    }

    auto near_boundary = [&](const std::array<int, 3>& n) {
        for (int q = 0; q < 3; ++q)
            if (n[q] <= 2 || n[q] >= grid.cells - 2) return true;
        return false;
    };

    const int reach = 5;  // local PCA neighbourhood, in cells
    for (const auto& mem : members) {
        CriticalComponent comp;
        Eigen::Vector3d mean = Eigen::Vector3d::Zero();
        bool closed = true;
        std::unordered_map<std::size_t, std::size_t> local;  // node id -> position in comp.points
        for (std::size_t s : mem) {
            const auto n = node_point(ids[s]);
            const Point p{coord(0, n[0]), coord(1, n[1]), coord(2, n[2])};
            local.emplace(ids[s], comp.points.size());
            comp.points.push_back(p);
            mean += Eigen::Vector3d(p[0], p[1], p[2]);
            comp.boundary = comp.boundary || near_boundary(n);
            closed = closed && degree[s] >= 2;
        }
        mean /= static_cast<double>(mem.size());
        const auto global = pca(comp.points);
        comp.eigenvalues = global.values;

        // dimension: most frequent local rank over (at most 256) member points
        std::array<int, 4> votes{};
        const std::size_t stride = std::max<std::size_t>(1, mem.size() / 256);
        for (std::size_t q = 0; q < mem.size(); q += stride) {
            const auto n = node_point(ids[mem[q]]);
            std::vector<Point> nb;
            for (int di = -reach; di <= reach; ++di)
                for (int dj = -reach; dj <= reach; ++dj)
                    for (int dk = -reach; dk <= reach; ++dk) {
                        const int a = n[0] + di, b = n[1] + dj, k = n[2] + dk;
                        if (a < 0 || b < 0 || k < 0 || a >= m || b >= m || k >= m) continue;
                        const auto it = local.find((static_cast<std::size_t>(a) * m + b) * m + k);
                        if (it != local.end()) nb.push_back(comp.points[it->second]);
                    }
            ++votes[rank_of(pca(nb).values, nb.size())];
        }
        comp.dimension = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());

        if (comp.dimension == 1) {
            const Eigen::Vector3d axis = global.axis;
            double lo = INFINITY, hi = -INFINITY;
            std::size_t ilo = 0, ihi = 0;
            for (std::size_t q = 0; q < mem.size(); ++q) {
                const auto& p = comp.points[q];
                const double t = axis.dot(Eigen::Vector3d(p[0], p[1], p[2]) - mean);
                if (t < lo) lo = t, ilo = q;
                if (t > hi) hi = t, ihi = q;
            }
            comp.spanning = comp.boundary && near_boundary(node_point(ids[mem[ilo]])) &&
                            near_boundary(node_point(ids[mem[ihi]]));
            comp.tag = !comp.boundary && closed ? "circle" : "line";
        } else if (comp.dimension == 2) {
            // a single chart shows no periodicity: bounded sheets are read as tori,
            // unbounded ones as planes when globally flat and cylinders otherwise
            if (!comp.boundary)
                comp.tag = "torus";
            else
                comp.tag = global.values[2] <= 1e-6 * global.values[0] ? "plane" : "cylinder";
        }
        rep.components.push_back(std::move(comp));
    }
    rep.diffeo = classify_components(rep.components);
    return rep;
}

}  // namespace crgeo
