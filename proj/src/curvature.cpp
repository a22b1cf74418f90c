#include "crgeo/curvature.hpp"

#include <algorithm>
#include <cmath>

namespace crgeo {

namespace {

double cabs(const CJet& z) { return std::hypot(z.re.value(), z.im.value()); }

IndexedCoeff torsion(const PointGeometry& g) { return {g.conn.A11, "11", 2}; }

}  // namespace

double CartanTensor::magnitude() const { return cabs(Q11); }

CartanTensor cartan_tensor(const PointGeometry& g) {
    const IndexedCoeff W = scalar(g.curv.W);
    const IndexedCoeff A = torsion(g);
    const CJet W11 = derive(g, W, "11").value;
    const CJet A0 = derive(g, A, "0").value;
    const CJet Ab1 = derive(g, A, "b1").value;
    CartanTensor c;
    c.Q11 = W11 * (1.0 / 6.0) + times_i(g.curv.W * g.conn.A11) * 0.5 - A0 - times_i(Ab1) * (2.0 / 3.0);
    return c;
}

CartanTensor cartan_tensor(const PHStructure& s, const Point& p, int order) {
    return cartan_tensor(geometry_at(s, p, order));
}

PaneitzValue paneitz(const PointGeometry& g, const Jet& phi) {
    const IndexedCoeff f = scalar(phi);
    PaneitzValue v;
    // indices raised with h_{1 1bar} = 1: phi_1bar^1bar_1 = phi_{1bar 1 1}, phi^1 = phi_1bar
    v.P1 = derive(g, f, "b11").value + times_i(g.conn.A11 * derive(g, f, "b").value);
    const IndexedCoeff p1{v.P1, "1", 1};
    v.P0 = derive(g, p1, "b").value.re * 2.0;
    return v;
}

PaneitzValue paneitz(const PHStructure& s, const Expr& phi, const Point& p, int order) {
    return paneitz(geometry_at(s, p, order), eval_jet(phi, p, s.params, order));
}

QCurvature q_curvature(const PointGeometry& g) {
    QCurvature q;
    const IndexedCoeff W = scalar(g.curv.W);
    const IndexedCoeff A = torsion(g);
    q.R1 = derive(g, W, "1").value - times_i(derive(g, A, "b").value);
    q.R1_1bar = derive(g, IndexedCoeff{q.R1, "1", 1}, "b").value;
    q.Q = q.R1_1bar.re * -kQCurvatureConstant;

    const SubLaplacian lap = sub_laplacian(g, g.curv.W);
    const CJet Abb = derive(g, A, "bb").value;
    const double half = 0.5 * (lap.complex_path.value() + 2.0 * Abb.im.value());
    q.divergence_identity = std::hypot(q.R1_1bar.re.value() - half, q.R1_1bar.im.value());
    return q;
}

QCurvature q_curvature(const PHStructure& s, const Point& p, int order) {
    return q_curvature(geometry_at(s, p, order));
}

PHStructure conformal_structure(const PHStructure& s, const Expr& g) {
    PHStructure r = s;
    const Expr up = exp(Expr::num(2) * g);
    const Expr down = exp(-g);
    for (std::size_t i = 0; i < 3; ++i) {
        r.theta[i] = up * s.theta[i];
        r.e1[i] = down * s.e1[i];
        r.e2[i] = down * s.e2[i];
    }
    r.chart.name = s.chart.name + "~";
    return r;
}

ConformalPoint conformal_point(const PHStructure& s, const PHStructure& rescaled, const Expr& g, const Point& p,
                               int order) {
    ConformalPoint out;
    const PointGeometry old = geometry_at(s, p, order);
    const PointGeometry neu = geometry_at(rescaled, p, order);
    const Jet gj = eval_jet(g, p, s.params, order);
    const double eg = std::exp(gj.value());

    // direct path
    const QCurvature qn = q_curvature(neu);
    out.R1_direct = qn.R1;
    out.R11_direct = qn.R1_1bar;
    out.W_direct = neu.curv.W.value();

    // transformation law on the original structure
    const QCurvature qo = q_curvature(old);
    const PaneitzValue pg = paneitz(old, gj);
    const CJet Cg = derive(old, IndexedCoeff{pg.P1, "1", 1}, "b").value;
    out.R1_law = (qo.R1 - pg.P1 * 6.0) * std::pow(eg, -3.0);
    out.R11_law = (qo.R1_1bar - Cg * 6.0) * std::pow(eg, -4.0);

    // coframe law theta~^1 = e^g (theta^1 + 2i g_1bar theta)
    const CJet g1b = derive(old, scalar(gj), "b").value;
    const CJetVec t1 = old.frame.theta1();
    const CJetVec t1n = neu.frame.theta1();
    for (std::size_t i = 0; i < 3; ++i) {
        const CJet predicted = (t1[i] + times_i(g1b * old.frame.theta[i]) * 2.0) * eg;
        out.coframe_law = std::max(out.coframe_law, cabs(t1n[i] - predicted));
    }

    // corollary, read on the rescaled structure with -g
    out.corollary_applicable = std::abs(qo.Q.value()) < 1e-8 && cabs(qo.R1_1bar) < 1e-8;
    if (out.corollary_applicable) {
        const Jet back = -gj;
        const PaneitzValue pb = paneitz(neu, back);
        const CJet Cb = derive(neu, IndexedCoeff{pb.P1, "1", 1}, "b").value;
        const SubLaplacian lap = sub_laplacian(neu, neu.curv.W);
        const CJet Abb = derive(neu, torsion(neu), "bb").value;
        const double lhs = lap.complex_path.value() + 2.0 * Abb.im.value();
        out.corollary = std::hypot(lhs - 12.0 * Cb.re.value(), 12.0 * Cb.im.value());
    }
    return out;
}

ConformalReport conformal_change(const PHStructure& s, const Expr& g, const SampleSet& samples, int order) {
    ConformalReport rep;
    rep.rescaled = conformal_structure(s, g);
    const std::size_t n = samples.points.size();
    std::vector<ConformalPoint> per(n);
    parallel_for(n, [&](std::size_t i) { per[i] = conformal_point(s, rep.rescaled, g, samples.points[i], order); });
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = samples.points[i];
        const auto& c = per[i];
        rep.r1.add(cabs(c.R1_direct - c.R1_law), p);
        rep.r11.add(cabs(c.R11_direct - c.R11_law), p);
        rep.coframe.add(c.coframe_law, p);
        if (c.corollary_applicable) rep.corollary.add(c.corollary, p);
        else ++rep.corollary_skipped;
    }
    return rep;
}

CheckList ConformalReport::entries(double tolerance) const {
    CheckList out;
    out.entries.push_back(r1.entry("conformal_R1", "R~_1 = e^{-3g}(R_1 - 6 P_1 g), direct vs law", tolerance));
    out.entries.push_back(
        r11.entry("conformal_R1_1bar", "R~_{1,1bar} = e^{-4g}(R_{1,1bar} - 6 C g), C g = (P_1 g)_{,1bar}", tolerance));
    out.entries.push_back(coframe.entry("conformal_coframe", "theta~^1 = e^g (theta^1 + 2i g_1bar theta)", 1e-9));
    auto c = corollary.entry("conformal_corollary",
                             "vanishing Q for e^{2g} theta implies Delta_b W + 2 Im A_{11,1bar1bar} = 12 C g", tolerance);
    if (corollary.count == 0) {
        c.mark_not_applicable("not applicable: the original Q vanishes at no sample");
    } else if (corollary_skipped > 0) {
        c.note = std::to_string(corollary_skipped) + " samples skipped: original Q does not vanish there";
    }
    out.entries.push_back(c);
    return out;
}

}  // namespace crgeo
