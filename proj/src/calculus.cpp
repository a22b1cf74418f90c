#include "crgeo/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crgeo {

namespace {

double cabs(const CJet& z) { return std::hypot(z.re.value(), z.im.value()); }

CJet cmul_i(const CJet& z) { return times_i(z); }

std::size_t pow3(int r) {
    std::size_t n = 1;
    for (int i = 0; i < r; ++i) n *= 3;
    return n;
}

}  // namespace

char index_char(Dir d) {
    switch (d) {
        case Dir::Z1: return '1';
        case Dir::Z1bar: return 'b';
        case Dir::T: return '0';
    }
    return '?';
}

CJetVec direction(const PointGeometry& g, Dir d) {
    switch (d) {
        case Dir::Z1: return g.frame.Z1();
        case Dir::Z1bar: return g.frame.Z1bar();
        case Dir::T: return g.frame.T_c();
    }
    throw std::invalid_argument("bad direction");
}

int IndexedCoeff::weight_of(const std::string& index) {
    int k = 0;
    for (char ch : index) {
        if (ch == '1') ++k;
        else if (ch == 'b') --k;
        else if (ch != '0') throw std::invalid_argument("index characters are 1, b, 0");
    }
    return k;
}

IndexedCoeff scalar(const Jet& f) { return {CJet(f), "", 0}; }
IndexedCoeff scalar(const CJet& f) { return {f, "", 0}; }

IndexedCoeff cov_derivative(const PointGeometry& g, const IndexedCoeff& c, Dir d) {
    if (!c.consistent()) throw std::invalid_argument("IndexedCoeff weight does not match its index");
    const CJetVec x = direction(g, d);
    IndexedCoeff r;
    r.value = directional(x, c.value);
    if (c.weight != 0) r.value = r.value - contract(g.conn.theta11, x) * c.value * static_cast<double>(c.weight);
    r.index = c.index + index_char(d);
    r.weight = IndexedCoeff::weight_of(r.index);
    return r;
}

IndexedCoeff derive(const PointGeometry& g, const IndexedCoeff& c, const std::string& dirs) {
    IndexedCoeff r = c;
    for (char ch : dirs) {
        const Dir d = ch == '1' ? Dir::Z1 : ch == 'b' ? Dir::Z1bar : ch == '0' ? Dir::T
                                                                              : throw std::invalid_argument("bad direction");
        r = cov_derivative(g, r, d);
    }
    return r;
}

HorizontalGradient horizontal_gradient(const PointGeometry& g, const Jet& phi) {
    HorizontalGradient h;
    h.phi_e1 = directional(g.frame.e1, phi);
    h.phi_e2 = directional(g.frame.e2, phi);
    h.phi1 = cov_derivative(g, scalar(phi), Dir::Z1).value;
    h.phi1bar = cov_derivative(g, scalar(phi), Dir::Z1bar).value;
    return h;
}

Jet gradient_norm2(const PointGeometry& g, const Jet& phi) {
    const auto h = horizontal_gradient(g, phi);
    return (h.phi1 * h.phi1bar).re * 2.0;
}

const Jet& RealTensor::at(std::initializer_list<int> idx) const {
    if (static_cast<int>(idx.size()) != rank) throw std::invalid_argument("RealTensor index rank mismatch");
    std::size_t k = 0;
    for (int i : idx) k = 3 * k + static_cast<std::size_t>(i);
    return c[k];
}

RealTensor real_scalar(const Jet& f) { return {0, {f}}; }

JetVec real_connection(const PointGeometry& g) { return imag_part(g.conn.theta11); }

RealTensor real_nabla(const PointGeometry& g, const RealTensor& t) {
    const JetVec sigma = real_connection(g);
    const std::array<const JetVec*, 3> dirs{&g.frame.e1, &g.frame.e2, &g.frame.T};
    std::array<Jet, 3> sig;
    for (std::size_t d = 0; d < 3; ++d) sig[d] = contract(sigma, *dirs[d]);

    RealTensor r;
    r.rank = t.rank + 1;
    const std::size_t n = pow3(t.rank);
    r.c.resize(n * 3);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t d = 0; d < 3; ++d) {
            Jet v = directional(*dirs[d], t.c[k]);
            // walk the slots of k, most significant first
            std::size_t stride = n / 3;
            for (int s = 0; s < t.rank; ++s, stride /= 3) {
                const std::size_t slot = (k / stride) % 3;
                if (slot == 0) v = v - sig[d] * t.c[k + stride];       // sigma_1^2 C_{..2..}
                else if (slot == 1) v = v + sig[d] * t.c[k - stride];  // sigma_2^1 = -sigma
            }
            r.c[3 * k + d] = v;
        }
    }
    return r;
}

SubLaplacian sub_laplacian(const PointGeometry& g, const Jet& phi) {
    SubLaplacian s;
    const IndexedCoeff f = scalar(phi);
    s.complex_path = (derive(g, f, "1b").value + derive(g, f, "b1").value).re;
    const RealTensor h = real_nabla(g, real_nabla(g, real_scalar(phi)));
    s.real_path = (h.at({0, 0}) + h.at({1, 1})) * 0.5;
    s.discrepancy = std::abs(s.complex_path.value() - s.real_path.value());
    return s;
}

CommutationResiduals commutation_at(const PointGeometry& g, const Jet& phi) {
    CommutationResiduals r;
    const Jet& W = g.curv.W;
    const double reA = g.conn.A11.re.value(), imA = g.conn.A11.im.value();

    const RealTensor d1 = real_nabla(g, real_scalar(phi));
    const RealTensor d2 = real_nabla(g, d1);
    const RealTensor d3 = real_nabla(g, d2);
    const double pe1 = d1.at({0}).value(), pe2 = d1.at({1}).value(), p0 = d1.at({2}).value();
    auto h = [&](int i, int j) { return d2.at({i, j}).value(); };
    auto k = [&](int i, int j, int l) { return d3.at({i, j, l}).value(); };
    r.e1e2 = h(0, 1) - h(1, 0) - 2 * p0;
    r.te1 = h(2, 0) - h(0, 2) - (pe1 * reA - pe2 * imA);
    r.te2 = h(2, 1) - h(1, 2) + (pe1 * imA + pe2 * reA);
    r.e1e1e2 = k(0, 0, 1) - k(0, 1, 0) - (2 * h(0, 2) - 2 * pe2 * W.value());
    r.e2e1e2 = k(1, 0, 1) - k(1, 1, 0) - (2 * h(1, 2) + 2 * pe1 * W.value());

    const IndexedCoeff f = scalar(phi);
    double c11 = 0.0;
    for (const char* base : {"", "1", "b"}) {
        const IndexedCoeff c = derive(g, f, base);
        const CJet lhs = derive(g, c, "1b").value - derive(g, c, "b1").value;
        const CJet rhs = cmul_i(derive(g, c, "0").value) + W * c.value * static_cast<double>(c.weight);
        c11 = std::max(c11, cabs(lhs - rhs));
    }
    r.complex_11b = c11;

    double c01 = 0.0;
    for (const char* base : {"", "1"}) {
        const IndexedCoeff c = derive(g, f, base);
        const CJet lhs = derive(g, c, "01").value - derive(g, c, "10").value;
        const CJet rhs =
            derive(g, c, "b").value * g.conn.A11 - c.value * g.curv.A11_1bar * static_cast<double>(c.weight);
        c01 = std::max(c01, cabs(lhs - rhs));
    }
    r.complex_01 = c01;

    const CJet comm = derive(g, f, "1b").value - derive(g, f, "b1").value;
    r.phi0 = cabs(CJet(d1.at({2})) + cmul_i(comm));
    return r;
}

CheckList CommutationReport::entries(double tolerance) const {
    CheckList out;
    out.entries.push_back(e1e2.entry("comm_e1e2", "phi_{e1e2} - phi_{e2e1} = 2 phi_0", tolerance));
    out.entries.push_back(te1.entry("comm_0e1", "phi_{0e1} - phi_{e1 0} = phi_e1 Re A11 - phi_e2 Im A11", tolerance));
    out.entries.push_back(te2.entry("comm_0e2", "phi_{0e2} - phi_{e2 0} = -(phi_e1 Im A11 + phi_e2 Re A11)", tolerance));
    out.entries.push_back(
        e1e1e2.entry("comm_e1e1e2", "phi_{e1e1e2} - phi_{e1e2e1} = 2 phi_{e1 0} - 2 phi_e2 W", tolerance));
    out.entries.push_back(
        e2e1e2.entry("comm_e2e1e2", "phi_{e2e1e2} - phi_{e2e2e1} = 2 phi_{e2 0} + 2 phi_e1 W", tolerance));
    out.entries.push_back(
        complex_11b.entry("comm_complex_11bar", "C_{I,1 1bar} - C_{I,1bar 1} = i C_{I,0} + k W C_I", tolerance));
    out.entries.push_back(
        complex_01.entry("comm_complex_01", "C_{I,01} - C_{I,10} = C_{I,1bar} A11 - k C_I A_{11,1bar}", tolerance));
    out.entries.push_back(phi0.entry("phi0_identity", "phi_0 = -i (phi_{1 1bar} - phi_{1bar 1})", tolerance));
    return out;
}

CommutationReport commutation_residuals(const PHStructure& s, const Expr& phi, const SampleSet& samples, int order) {
    const std::size_t n = samples.points.size();
    std::vector<CommutationResiduals> per(n);
    parallel_for(n, [&](std::size_t i) {
        const Point& p = samples.points[i];
        const PointGeometry g = geometry_at(s, p, order);
        per[i] = commutation_at(g, eval_jet(phi, p, s.params, order));
    });
    CommutationReport rep;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = samples.points[i];
        rep.e1e2.add(per[i].e1e2, p);
        rep.te1.add(per[i].te1, p);
        rep.te2.add(per[i].te2, p);
        rep.e1e1e2.add(per[i].e1e1e2, p);
        rep.e2e1e2.add(per[i].e2e1e2, p);
        rep.complex_11b.add(per[i].complex_11b, p);
        rep.complex_01.add(per[i].complex_01, p);
        rep.phi0.add(per[i].phi0, p);
    }
    return rep;
}

namespace {

/// J V = e2 omega1(V) - e1 omega2(V) (J e1 = e2, J e2 = -e1, J T = 0).
CJetVec apply_J(const Coframe& c, const CJetVec& v) {
    const CJet a = contract(c.omega1, v), b = contract(c.omega2, v);
    CJetVec r;
    for (std::size_t i = 0; i < 3; ++i) r[i] = c.e2[i] * a - c.e1[i] * b;
    return r;
}

}  // namespace

ContactFieldReport contact_field(const PointGeometry& g, const Jet& f) {
    const Coframe& c = g.frame;
    ContactFieldReport rep;
    const IndexedCoeff fs = scalar(f);
    const CJet f1 = derive(g, fs, "1").value, f1b = derive(g, fs, "b").value;
    const CJetVec z = c.Z1(), zb = c.Z1bar(), T = c.T_c();

    CJetVec X;
    for (std::size_t i = 0; i < 3; ++i) X[i] = cmul_i(f1) * zb[i] - cmul_i(f1b) * z[i] - f * T[i];
    for (std::size_t i = 0; i < 3; ++i) rep.imag_defect = std::max(rep.imag_defect, std::abs(X[i].im.value()));
    rep.X = real_part(X);

    // L_X theta = X _| d theta + d(theta(X)), evaluated on the real frame.
    const TwoForm<Jet> dtheta = exterior(c.theta);
    const Jet theta_x = contract(c.theta, rep.X);
    const std::array<const JetVec*, 3> frame{&c.e1, &c.e2, &c.T};
    rep.f0 = directional(c.T, f).value();
    for (std::size_t v = 0; v < 3; ++v) {
        const Jet lie = dtheta(rep.X, *frame[v]) + directional(*frame[v], theta_x);
        rep.lie_theta[v] = lie.value();
        const double th = contract(c.theta, *frame[v]).value();
        rep.lie_theta_residual = std::max(rep.lie_theta_residual, std::abs(rep.lie_theta[v] + rep.f0 * th));
    }

    // (L_X J)(V) = [X, J V] - J [X, V] with J Z1 = i Z1, J Z1bar = -i Z1bar.
    const auto xz = bracket(X, z);
    const auto xzb = bracket(X, zb);
    CJetVec lz, lzb;
    const CJetVec jxz = apply_J(c, xz), jxzb = apply_J(c, xzb);
    for (std::size_t i = 0; i < 3; ++i) {
        lz[i] = cmul_i(xz[i]) - jxz[i];
        lzb[i] = cmul_i(xzb[i]) * -1.0 - jxzb[i];
    }
    rep.lie_J = contract(c.theta1bar(), lz);
    rep.lie_J_conj = contract(c.theta1(), lzb);
    rep.predicted = (derive(g, fs, "11").value + cmul_i(g.conn.A11 * f)) * 2.0;
    rep.lie_J_residual =
        std::max(cabs(rep.lie_J - rep.predicted), cabs(rep.lie_J_conj - rep.predicted.conj()));
    return rep;
}

ContactFieldReport contact_field(const PHStructure& s, const Expr& f, const Point& p, int order) {
    const PointGeometry g = geometry_at(s, p, order);
    return contact_field(g, eval_jet(f, p, s.params, order));
}

}  // namespace crgeo
