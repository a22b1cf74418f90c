#pragma once

// CR Yamabe solitons (W + f_0/2 = mu, f_11 + i A11 f = 0) and pseudo-gradient
// solitons (W + Delta_b phi / 2 = mu, phi_11 = 0, phi_0 = 0), with the
// identities that hold on them.

#include <complex>
#include <optional>
#include <string>

#include "crgeo/curvature.hpp"
#include "crgeo/models.hpp"

namespace crgeo {

enum class SolitonKind { contact, gradient };
enum class SolitonType { shrinking, steady, expanding };

SolitonType classify(double mu);
std::string_view type_name(SolitonType t);

struct SolitonCandidate {
    PHStructure structure;
    Expr potential;
    double mu = 0.0;
    SolitonKind kind = SolitonKind::gradient;
};

/// From a model with a declared potential; throws ModelError otherwise.
SolitonCandidate candidate_from(const ModelDecl& m);

/// Default pass tolerance on analytic inputs, and the relaxed one used when the
/// potential fails the strict finite-difference regime.
inline constexpr double kSolitonTolerance = 1e-7;
inline constexpr double kRelaxedTolerance = 1e-4;
inline constexpr double kStrictFd = 1e-8;

struct Spread {
    double mean = 0.0, min = 0.0, max = 0.0;
    double spread() const { return max - min; }
};

struct SolitonReport {
    SolitonKind kind = SolitonKind::gradient;
    double mu = 0.0;
    SolitonType type = SolitonType::steady;
    double tolerance = kSolitonTolerance;
    CheckList checks;
    std::optional<Spread> C;  // conserved quantity, when computed

    bool pass() const { return checks.pass(); }
};

/// r1 = |W + f_0/2 - mu|, r2 = |f_11 + i A11 f|, plus the L_{X_f} cross-checks.
SolitonReport check_cr_soliton(const SolitonCandidate& c, const SampleSet& samples, int order = kDefaultJetOrder);

/// Complex residuals |W + Delta_b phi/2 - mu|, |phi_11|, |phi_0|, the real
/// version phi_e1e1 = phi_e2e2, phi_e1e2 = phi_e2e1 = 0, W + phi_e1e1/2 = mu,
/// and the agreement of the two formulations.
SolitonReport check_pseudo_gradient(const SolitonCandidate& c, const SampleSet& samples,
                                    int order = kDefaultJetOrder);

/// 4 Delta_b W + 2W(W - mu) - W_0 f + i(f_1 W_1bar - f_1bar W_1).
double harnack_quantity(const PointGeometry& g, const Jet& f, double mu);

struct HarnackReport {
    MaxResidual value;
    bool precondition = false;  // the candidate passes check_cr_soliton
    CheckEntry entry(double tolerance = kSolitonTolerance) const;
};
HarnackReport harnack_residual(const SolitonCandidate& c, const SampleSet& samples, int order = kDefaultJetOrder);

/// Lemma-level consequences on pseudo-gradient solitons with vanishing torsion:
/// C = W + |grad_b phi|^2/2 - mu phi constant, grad_b(W e^-phi) = 0,
/// W_1 = -i A11 phi_1bar + W phi_1, and grad_b(phi_1 phi_1bar) = (mu - W) grad_b phi.
/// The torsion gate is its own entry; identities are marked not applicable when
/// the gate or the soliton residuals fail.
SolitonReport conserved_quantities(const SolitonCandidate& c, const SampleSet& samples,
                                   int order = kDefaultJetOrder);

struct BakryEmery {
    double ric_be = 0.0;      // W X^1 X^1bar + Re[phi_{1 1bar} X^1 X^1bar]
    double ric_residual = 0.0;  // |ric_be - mu |X|^2|
    double tor_be = 0.0;      // 2 Re[(i A_{1bar1bar} + phi_{1bar1bar}) X_1 X_1]
    double tor = 0.0;         // 2 Re[i A_{1bar1bar} X_1 X_1]
    double tor_residual = 0.0;
};
/// X = X1 Z1 + conj(X1) Z1bar, i.e. X1 = a + ib for X = a e1 + b e2.
BakryEmery bakry_emery(const SolitonCandidate& c, std::complex<double> X1, const Point& p,
                       int order = kDefaultJetOrder);

}  // namespace crgeo
