#include "crgeo/structure.hpp"

#include <algorithm>
#include <cstdio>

namespace crgeo {

void Chart::check() const {
    for (std::size_t i = 0; i < 3; ++i) {
        if (!(box[i].lo < box[i].hi)) throw std::invalid_argument("chart '" + name + "': degenerate sampling box");
        if (!(domain[i].lo < domain[i].hi)) throw std::invalid_argument("chart '" + name + "': degenerate domain");
        if (!domain[i].contains(box[i])) throw std::invalid_argument("chart '" + name + "': sampling box leaves domain");
    }
    if (!(margin >= 0.0)) throw std::invalid_argument("chart '" + name + "': negative margin");
    for (std::size_t i = 0; i < 3; ++i) {
        if (2 * margin >= box[i].hi - box[i].lo) throw std::invalid_argument("chart '" + name + "': margin too large");
    }
}

double radical_inverse(std::size_t index, unsigned base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

SampleSet halton_samples(const std::array<Interval, 3>& box, double margin, std::size_t count, std::size_t seed) {
    static constexpr unsigned bases[3] = {2, 3, 5};
    SampleSet s;
    s.seed = seed;
    s.box = box;
    s.margin = margin;
    s.points.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        Point p{};
        for (std::size_t d = 0; d < 3; ++d) {
            const double lo = box[d].lo + margin, hi = box[d].hi - margin;
            p[d] = lo + (hi - lo) * radical_inverse(seed + k + 1, bases[d]);
        }
        s.points.push_back(p);
    }
    return s;
}

SampleSet halton_samples(const Chart& chart, std::size_t count, std::size_t seed) {
    return halton_samples(chart.box, chart.margin, count, seed);
}

std::string format_point(const Point& p) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.6g, %.6g, %.6g)", p[0], p[1], p[2]);
    return buf;
}

JetVec eval_components(const std::array<Expr, 3>& c, const Point& p, const ParamTable& params, int order) {
    return {eval_jet(c[0], p, params, order), eval_jet(c[1], p, params, order), eval_jet(c[2], p, params, order)};
}

CJetVec Coframe::Z1() const {
    CJetVec z;
    for (std::size_t i = 0; i < 3; ++i) z[i] = CJet(e1[i] * 0.5, e2[i] * -0.5);
    return z;
}

CJetVec Coframe::T_c() const { return {CJet(T[0]), CJet(T[1]), CJet(T[2])}; }

namespace {

JetVec reeb_from(const JetVec& theta, const Point& p) {
    const TwoForm<Jet> w = exterior(theta);
    // v^i = (1/2) eps^{ijk} w_jk spans the kernel of w; theta(v) = (theta ^ d theta)/vol.
    const JetVec v{w.c[1][2], w.c[2][0], w.c[0][1]};
    const Jet tv = contract(theta, v);
    double scale = 0.0;
    for (const auto& c : theta) scale = std::max(scale, std::abs(c.value()));
    if (std::abs(tv.value()) <= 1e-12 * std::max(1.0, scale)) {
        throw StructureError("contact condition violated at " + format_point(p));
    }
    const Jet inv = 1.0 / tv;
    return {v[0] * inv, v[1] * inv, v[2] * inv};
}

}  // namespace

JetVec reeb(const PHStructure& s, const Point& p, int order) {
    if (order < 1) throw InsufficientOrder("reeb field needs jet order >= 1");
    return reeb_from(eval_components(s.theta, p, s.params, order), p);
}

Coframe coframe(const PHStructure& s, const Point& p, int order) {
    if (order < 1) throw InsufficientOrder("coframe needs jet order >= 1");
    Coframe c;
    c.point = p;
    c.order = order;
    c.theta = eval_components(s.theta, p, s.params, order);
    c.e1 = eval_components(s.e1, p, s.params, order);
    c.e2 = eval_components(s.e2, p, s.params, order);
    c.T = reeb_from(c.theta, p);

    // Columns T, e1, e2; rows of the inverse are the dual coframe.
    JetMat f;
    for (std::size_t i = 0; i < 3; ++i) {
        f[i][0] = c.T[i];
        f[i][1] = c.e1[i].truncated(order - 1);
        f[i][2] = c.e2[i].truncated(order - 1);
    }
    JetMat inv;
    try {
        inv = inverse(f);
    } catch (const SingularMatrix&) {
        throw StructureError("frame degenerate at " + format_point(p));
    }
    c.omega1 = {inv[1][0], inv[1][1], inv[1][2]};
    c.omega2 = {inv[2][0], inv[2][1], inv[2][2]};
    return c;
}

namespace {

struct PointResiduals {
    double theta_e1 = 0, theta_e2 = 0, normalization = 0, got = 0, levi = 0, reeb = 0, duality = 0, structure = 0,
           volume = 0, fd = 0;
    std::string failure;
};

double cabs(const CJet& z) { return std::hypot(z.re.value(), z.im.value()); }

PointResiduals residuals_at(const PHStructure& s, const Point& p) {
    PointResiduals r;
    const Coframe c = coframe(s, p, 2);
    const TwoForm<Jet> dtheta = exterior(c.theta);
    r.theta_e1 = contract(c.theta, c.e1).value();
    r.theta_e2 = contract(c.theta, c.e2).value();
    r.got = dtheta(c.e1, c.e2).value();
    r.normalization = r.got - 2.0;

    const CJetVec z = c.Z1(), zb = c.Z1bar();
    const CJet levi = times_i(dtheta(z, zb)) * -1.0;
    r.levi = std::hypot(levi.re.value() - 1.0, levi.im.value());

    double reeb_res = std::abs(contract(c.theta, c.T).value() - 1.0);
    const JetVec kernel = interior(c.T, dtheta);
    for (const auto& k : kernel) reeb_res = std::max(reeb_res, std::abs(k.value()));
    r.reeb = reeb_res;

    const CJetVec t1 = c.theta1();
    const CJetVec tc = c.T_c();
    r.duality = std::max({cabs(contract(t1, z) - CJet(Jet(0, 1.0))), cabs(contract(t1, zb)), cabs(contract(t1, tc))});

    const auto w = wedge(t1, c.theta1bar());
    double se = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            // d theta - i theta^1 ^ theta^1bar, componentwise
            const CJet d = CJet(dtheta.c[i][j]) - times_i(w.c[i][j]);
            se = std::max(se, cabs(d));
        }
    r.structure = se;

    // (theta ^ d theta)(e1, e2, T) expanded by the shuffle formula.
    r.volume = (contract(c.theta, c.e1) * dtheta(c.e2, c.T) - contract(c.theta, c.e2) * dtheta(c.e1, c.T) +
                contract(c.theta, c.T) * dtheta(c.e1, c.e2))
                   .value() -
               2.0;

    double fd = 0.0;
    for (const auto* comps : {&s.theta, &s.e1, &s.e2})
        for (const auto& e : *comps) fd = std::max(fd, fd_check(e, p, s.params, 2));
    r.fd = fd;
    return r;
}

}  // namespace

CheckList validate(const PHStructure& s, const SampleSet& samples, double tolerance) {
    const std::size_t n = samples.points.size();
    std::vector<PointResiduals> per(n);
    parallel_for(n, [&](std::size_t i) {
        try {
            per[i] = residuals_at(s, samples.points[i]);
        } catch (const std::exception& e) {
            per[i].failure = e.what();
        }
    });

    MaxResidual th1, th2, norm, levi, reeb_m, dual, se, vol, fd;
    std::string first_failure;
    std::size_t failures = 0;
    double got_at_worst = 2.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = samples.points[i];
        const auto& r = per[i];
        if (!r.failure.empty()) {
            if (failures++ == 0) first_failure = r.failure;
            continue;
        }
        th1.add(r.theta_e1, p);
        th2.add(r.theta_e2, p);
        const double before = norm.value;
        const bool first = !norm.where;
        norm.add(r.normalization, p);
        if (first || norm.value > before) got_at_worst = r.got;
        levi.add(r.levi, p);
        reeb_m.add(r.reeb, p);
        dual.add(r.duality, p);
        se.add(r.structure, p);
        vol.add(r.volume, p);
        fd.add(r.fd, p);
    }

    CheckList out;
    if (failures > 0) {
        CheckEntry e;
        e.name = "pointwise_evaluation";
        e.anchor = "contact condition and frame independence";
        e.residual = INFINITY;
        e.tolerance = 0.0;
        e.samples = n;
        e.note = first_failure + " (" + std::to_string(failures) + " of " + std::to_string(n) + " samples)";
        out.entries.push_back(e);
    }
    out.entries.push_back(th1.entry("theta(e1)", "frame lies in the contact plane: theta(e1) = 0", tolerance));
    out.entries.push_back(th2.entry("theta(e2)", "frame lies in the contact plane: theta(e2) = 0", tolerance));
    auto ne = norm.entry("normalization", "d theta = 2 e^1 ^ e^2, i.e. d theta(e1, e2) = 2", tolerance);
    if (!ne.pass && ne.samples > 0) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "normalization: expected 2, got %g", got_at_worst);
        ne.note = buf;
    }
    out.entries.push_back(ne);
    out.entries.push_back(levi.entry("levi_form", "h_{1 1bar} = -i d theta(Z1, Z1bar) = 1", tolerance));
    out.entries.push_back(reeb_m.entry("reeb", "theta(T) = 1 and d theta(T, .) = 0", tolerance));
    out.entries.push_back(dual.entry("coframe_duality", "theta^1(Z1) = 1, theta^1(Z1bar) = 0, theta^1(T) = 0", tolerance));
    out.entries.push_back(se.entry("structure_equation", "d theta = i theta^1 ^ theta^1bar", tolerance));
    out.entries.push_back(vol.entry("volume", "(theta ^ d theta)(e1, e2, T) = 2", tolerance));
    out.entries.push_back(fd.entry("fd_oracle", "component jets agree with central differences", 1e-4));
    return out;
}

}  // namespace crgeo
