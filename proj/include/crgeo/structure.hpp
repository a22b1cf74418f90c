#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "crgeo/expr.hpp"
#include "crgeo/forms.hpp"
#include "crgeo/jet.hpp"
#include "crgeo/report.hpp"

namespace crgeo {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
};

/// A single coordinate chart with a rectangular domain. Unbounded domains use
/// infinite endpoints; sampling always happens in the finite box.
struct Chart {
    std::string name = "chart";
    std::array<std::string, 3> coords{"x", "y", "t"};
    std::array<Interval, 3> domain{{{-INFINITY, INFINITY}, {-INFINITY, INFINITY}, {-INFINITY, INFINITY}}};
    std::array<Interval, 3> box{{{-2, 2}, {-2, 2}, {-2, 2}}};
    double margin = 1e-3;

    /// Throws std::invalid_argument when the box is degenerate or leaves the domain.
    void check() const;
    std::vector<std::string> coord_list() const { return {coords.begin(), coords.end()}; }
};

/// Contact form theta (components against dx^i) with an adapted real frame
/// (e1, e2) in ker theta. J is the data J e1 = e2.
struct PHStructure {
    Chart chart;
    std::array<Expr, 3> theta;
    std::array<Expr, 3> e1;
    std::array<Expr, 3> e2;
    ParamTable params;
};

/// Raised for pointwise failures of the contact or frame hypotheses.
class StructureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SampleSet {
    std::vector<Point> points;
    std::size_t seed = 0;
    std::array<Interval, 3> box{};
    double margin = 0.0;
};

/// Halton points (bases 2, 3, 5) with indices seed+1 .. seed+count, mapped into
/// the box shrunk by the margin. Radical inverses of positive indices lie in
/// (0, 1), so every point is strictly interior.
SampleSet halton_samples(const std::array<Interval, 3>& box, double margin, std::size_t count, std::size_t seed);
SampleSet halton_samples(const Chart& chart, std::size_t count, std::size_t seed);
double radical_inverse(std::size_t index, unsigned base);

JetVec eval_components(const std::array<Expr, 3>& c, const Point& p, const ParamTable& params, int order);

/// Everything pointwise that the coordinate-free calculus needs: the frame
/// (e1, e2, T) and its dual coframe (theta, omega1, omega2), theta^1 = omega1 + i omega2.
/// theta, e1, e2 carry the requested order; T and omega one less.
struct Coframe {
    Point point{};
    int order = 0;
    JetVec theta, e1, e2, T;
    JetVec omega1, omega2;

    CJetVec theta1() const { return complexify(omega1, omega2); }
    CJetVec theta1bar() const { return conj(theta1()); }
    /// Z1 = (e1 - i e2) / 2.
    CJetVec Z1() const;
    CJetVec Z1bar() const { return conj(Z1()); }
    CJetVec T_c() const;
};

/// Reeb field: the kernel direction of d theta scaled so theta(T) = 1. Throws
/// StructureError "contact condition violated at p" when theta ^ d theta = 0.
JetVec reeb(const PHStructure& s, const Point& p, int order = kDefaultJetOrder);

/// Throws StructureError "frame degenerate at p" when (e1, e2, T) is singular.
Coframe coframe(const PHStructure& s, const Point& p, int order = kDefaultJetOrder);

/// Max residual of every normalization over the samples; never throws for
/// pointwise failures (they become failing entries).
CheckList validate(const PHStructure& s, const SampleSet& samples, double tolerance = 1e-9);

std::string format_point(const Point& p);

}  // namespace crgeo
