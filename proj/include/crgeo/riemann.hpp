#pragma once

// The Webster adapted metric h^lambda = (1/2) d theta(., J.) + lambda^-2 theta^2,
// orthonormal frame (e1, e2, lambda T), its Levi-Civita connection and curvature,
// level surfaces of a potential, and the critical-set classification.
//
// Frame indices 0, 1, 2 stand for e1, e2, e3 = lambda T.
//   Gamma[a][b][c] = <nabla_{E_a} E_b, E_c> = omega_b^c(E_a)
//   Rm[a][b][c][d] = <R(E_a, E_b) E_d, E_c>, so Rm[a][b][a][b] is the sectional curvature
//   Ric[b][d]      = sum_a Rm[a][b][a][d]

#include <optional>
#include <string>
#include <vector>

#include "crgeo/soliton.hpp"

namespace crgeo {

using Tensor3 = std::array<std::array<std::array<double, 3>, 3>, 3>;
using Tensor4 = std::array<Tensor3, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

struct AdaptedMetricData {
    double lambda = 1.0;
    Point point{};
    std::array<JetVec, 3> frame;    // E_a, coordinate components
    std::array<JetVec, 3> coframe;  // omega^a = Re theta^1, Im theta^1, theta / lambda
    std::array<std::array<JetVec, 3>, 3> forms;  // omega_b^c as coordinate one-forms
    Tensor3 Gamma{};
    Tensor4 Rm{};
    Mat3 Ric{};
    double scalar = 0.0;
    // invariants
    double antisymmetry = 0.0;     // max |omega_b^c + omega_c^b|
    double first_structure = 0.0;  // max |d omega^c - omega^b ^ omega_b^c|
    double rm_symmetry = 0.0;      // antisymmetry in both pairs and pair symmetry
    double bianchi = 0.0;          // first Bianchi identity

    /// Rm(X, Y, Z, W) for frame-component vectors.
    double rm(const Point& x, const Point& y, const Point& z, const Point& w) const;
};

/// Needs order >= 3 (connection forms at order - 2, curvature at order - 3).
/// Throws std::invalid_argument for lambda <= 0.
AdaptedMetricData adapted_metric(const PHStructure& s, double lambda, const Point& p, int order = kDefaultJetOrder);

struct ConnectionIdentities {
    double theta11 = 0.0;  // theta_1^1 = i (omega_1^2 - lambda^-2 theta)
    double omega13 = 0.0;  // omega_1^3 = (-lambda Re Abb) w1 + (-lambda Im Abb + 1/lambda) w2
    double omega23 = 0.0;  // omega_2^3 = (-lambda Im Abb - 1/lambda) w1 + (lambda Re Abb) w2
};
ConnectionIdentities connection_form_identities(const PHStructure& s, double lambda, const Point& p,
                                                int order = kDefaultJetOrder);

/// Suite over samples: Lemma-level Ricci matrix, scalar curvature 4W - 2/lambda^2,
/// sectional curvature lambda^-2 on planes (V, e3), connection-form identities and
/// the metric invariants.
struct AdaptedMetricReport {
    double lambda = 1.0;
    CheckList checks;
    Mat3 ricci_at_first{};  // at the first sample, for display
    double W_at_first = 0.0;
};
AdaptedMetricReport adapted_metric_suite(const PHStructure& s, double lambda, const SampleSet& samples,
                                         int order = kDefaultJetOrder);

struct LevelSurfaceSample {
    Point point{};
    double phi = 0.0;
    std::array<Point, 3> E{};  // E1 = grad phi / |grad phi|, E2 horizontal tangent, E3 ~ lambda T (frame components)
    double grad_norm = 0.0;    // |grad phi| for h^lambda
    double grad_b_norm = 0.0;  // |grad_b phi| = sqrt(2 phi_1 phi_1bar)
    double laplacian = 0.0;    // Riemannian Laplacian of h^lambda
    double sub_laplacian = 0.0;
    double II22 = 0.0, II23 = 0.0, II33 = 0.0;
    double rm2323 = 0.0;
    double K = 0.0;               // Gauss equation
    double orthonormality = 0.0;  // max |<E_i, E_j> - delta_ij|
    double tangency = 0.0;        // max |<E_i, grad phi>|, i = 2, 3
    double T_parallel = 0.0;      // max(|nabla_{E3} T|, |<nabla_{E2} T, E2>|)
    double gradient_level = 0.0;  // |grad_b(phi_1 phi_1bar) - (mu - W) grad_b phi|
    int iterations = 0;
};

struct LevelSurface {
    double value = 0.0;
    std::vector<LevelSurfaceSample> samples;
    std::vector<std::string> failures;  // per seed
    bool critical = false;              // c is a critical value on the sampled component
};

/// Newton projection settings: damped Newton along the coordinate gradient,
/// at most 50 iterations, |phi - c| < 1e-12.
struct Projection {
    int max_iterations = 50;
    double tolerance = 1e-12;
    double epsilon = 1e-3;  // regularity threshold is 10 epsilon on |grad phi|
};

LevelSurface level_surface(const SolitonCandidate& c, double lambda, double value, std::size_t n, std::size_t seed = 7,
                           const Projection& proj = {}, int order = kDefaultJetOrder);
LevelSurfaceSample level_sample(const SolitonCandidate& c, double lambda, const Point& p, int order = kDefaultJetOrder);

struct LevelRow {
    double value = 0.0;
    std::size_t samples = 0;
    double grad_norm = 0.0, grad_norm_spread = 0.0;
    double grad_b_norm = 0.0;
    double laplacian = 0.0, laplacian_spread = 0.0;
    double sub_laplacian = 0.0;
    double K_max = 0.0, II23 = 0.0, II33_max = 0.0;
};

struct IsoparametricReport {
    std::vector<LevelRow> rows;
    std::vector<LevelSurface> levels;
    CheckList checks;
    bool vacuous = false;    // no regular values to test
    bool monotone = true;    // |grad phi| is monotone in c across the table
    bool pass() const { return checks.pass(); }
};

/// Per level: spreads of |grad phi| and Delta phi (< 1e-6), the pointwise
/// Delta phi = Delta_b phi check (< 1e-8), Delta phi = 2 Delta_b phi, K = 0,
/// II values, T parallel along the leaf, and the level identity for |grad_b phi|.
/// Soliton and torsion hypotheses are gated entries.
IsoparametricReport isoparametric_check(const SolitonCandidate& c, double lambda, const std::vector<double>& values,
                                        std::size_t n, std::size_t seed = 7, int order = kDefaultJetOrder);

struct GridSpec {
    std::array<Interval, 3> box{{{-2, 2}, {-2, 2}, {-2, 2}}};
    int cells = 64;  // nodes per axis = cells + 1
    double epsilon = 1e-3;
    double lambda = 1.0;
};

struct CriticalComponent {
    std::vector<Point> points;
    int dimension = 0;  // majority local PCA rank; 0 for isolated nodes, 3 when no gap
    std::string tag = "unknown";  // line, circle, plane, cylinder, torus, unknown
    bool boundary = false;        // within 2 cells of the box boundary
    bool spanning = false;        // reaches the boundary at both ends of its main axis
    std::array<double, 3> eigenvalues{};  // global PCA, descending
};

struct DiffeoReport {
    int curves = 0;
    int surfaces = 0;
    int excluded = 0;  // boundary-touching components left out of the count
    std::string leaf = "unknown";
    std::string case_label;               // "i", "ii", "iii" or ""
    std::vector<std::string> candidates;  // the theorem's list for the case
    std::string concluded = "undetermined";
    std::string reason;
    std::string caveat = "hypotheses declared, not verified";
    bool trivial = false;
};

struct CriticalSetReport {
    std::vector<CriticalComponent> components;
    DiffeoReport diffeo;
    std::size_t nodes = 0, critical_nodes = 0;
};

/// Grid scan for |grad phi| < epsilon (h^lambda norm), 26-adjacency components,
/// local PCA rank over 5-cell neighbourhoods with gap ratio >= 10.
CriticalSetReport critical_set(const SolitonCandidate& c, const GridSpec& grid);

/// The decision table alone: counted curves (boundary-touching components are
/// excluded unless they are lines spanning the chart or sheets), surfaces and leaf tag
/// mapped onto cases (i)-(iii).
DiffeoReport classify_components(const std::vector<CriticalComponent>& components);

}  // namespace crgeo
