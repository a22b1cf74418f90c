#include "crgeo/connection.hpp"

#include <algorithm>
#include <cmath>

namespace crgeo {

namespace {

double cabs(const CJet& z) { return std::hypot(z.re.value(), z.im.value()); }

}  // namespace

ConnectionData connection_from(const Coframe& c) {
    if (c.order < 2) throw InsufficientOrder("connection needs jet order >= 2");
    const CJetVec t1 = c.theta1();
    const CJetVec z = c.Z1(), zb = c.Z1bar(), T = c.T_c();
    const auto dt1 = exterior(t1);

    const CJet p = dt1(z, zb);
    const CJet q = dt1(T, z);
    const CJet r = dt1(T, zb);

    ConnectionData d;
    d.alpha = -p.conj();
    d.beta = p;
    d.gamma = -q;
    d.A11 = r.conj();

    const CJetVec t1b = c.theta1bar();
    for (std::size_t i = 0; i < 3; ++i) {
        d.theta11[i] = d.alpha * t1[i] + d.beta * t1b[i] + d.gamma * c.theta[i];
        d.imaginarity = std::max(d.imaginarity, std::abs(d.theta11[i].re.value()));
    }
    d.re_gamma = std::abs(d.gamma.re.value());
    d.conjugate_eq = cabs(exterior(t1b)(T, z) - r.conj());
    return d;
}

CurvatureData curvature_from(const Coframe& c, const ConnectionData& conn) {
    if (c.order < 3) throw InsufficientOrder("Tanaka-Webster curvature needs jet order >= 3");
    const CJetVec z = c.Z1(), zb = c.Z1bar(), T = c.T_c();
    const auto dw = exterior(conn.theta11);

    CurvatureData k;
    const CJet w = dw(z, zb);
    k.W = w.re;
    k.im_W = std::abs(w.im.value());

    // A_{11,1bar} = Z1bar(A11) - 2 theta_1^1(Z1bar) A11 (weight 2)
    k.A11_1bar = directional(zb, conn.A11) - contract(conn.theta11, zb) * conn.A11 * 2.0;
    const CJet zt = dw(z, T), zbt = dw(zb, T);
    k.torsion_residual = std::max(cabs(zt - k.A11_1bar), cabs(zbt + k.A11_1bar.conj()));
    k.torsion_residual_flipped = std::max(cabs(zt + k.A11_1bar), cabs(zbt - k.A11_1bar.conj()));
    return k;
}

ConnectionData connection(const PHStructure& s, const Point& p, int order) {
    return connection_from(coframe(s, p, order));
}

CurvatureData tw_curvature(const PHStructure& s, const Point& p, int order) {
    const Coframe c = coframe(s, p, order);
    return curvature_from(c, connection_from(c));
}

PointGeometry geometry_at(const PHStructure& s, const Point& p, int order) {
    PointGeometry g;
    g.frame = coframe(s, p, order);
    g.conn = connection_from(g.frame);
    g.curv = curvature_from(g.frame, g.conn);
    return g;
}

}  // namespace crgeo
