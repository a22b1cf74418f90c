#pragma once

#include "crgeo/calculus.hpp"

namespace crgeo {

/// Q11 = W11/6 + (i/2) W A11 - A11,0 - (2i/3) A11,1bar1.
struct CartanTensor {
    CJet Q11;
    double magnitude() const;
};
CartanTensor cartan_tensor(const PointGeometry& g);
CartanTensor cartan_tensor(const PHStructure& s, const Point& p, int order = kDefaultJetOrder);

struct PaneitzValue {
    CJet P1;  // phi_{1bar 1 1} + i A11 phi_1bar
    Jet P0;   // (P1 phi),1bar + conjugate = 2 Re (P1 phi),1bar
};
PaneitzValue paneitz(const PointGeometry& g, const Jet& phi);
PaneitzValue paneitz(const PHStructure& s, const Expr& phi, const Point& p, int order = kDefaultJetOrder);

/// Q = -c R_{1,1bar} with c fixed to 2; R_{1,1bar} is returned too so any other
/// constant can be applied by the caller.
inline constexpr double kQCurvatureConstant = 2.0;

struct QCurvature {
    CJet R1;       // W_1 - i A11,1bar
    CJet R1_1bar;  // R_{1,1bar}
    Jet Q;         // -c Re R_{1,1bar}
    /// |R_{1,1bar} - (Delta_b W + 2 Im A11,1bar1bar)/2|: the two forms of Q agree.
    double divergence_identity = 0.0;
};
QCurvature q_curvature(const PointGeometry& g);
QCurvature q_curvature(const PHStructure& s, const Point& p, int order = kDefaultJetOrder);

/// theta~ = e^{2g} theta with frame e~_i = e^{-g} e_i; the dual coframe is then
/// theta~^1 = e^g (theta^1 + 2i g_1bar theta).
PHStructure conformal_structure(const PHStructure& s, const Expr& g);

struct ConformalPoint {
    CJet R1_direct;        // R~_1 on the rescaled structure
    CJet R1_law;           // e^{-3g} (R_1 - 6 P_1 g)
    CJet R11_direct;       // R~_{1,1bar}
    CJet R11_law;          // e^{-4g} (R_{1,1bar} - 6 C g), C g = (P_1 g),1bar on the original
    double coframe_law = 0.0;  // |theta~^1 (duality) - e^g(theta^1 + 2i g_1bar theta)| componentwise
    double W_direct = 0.0;
    /// Conformal corollary: when e^{2g} theta has vanishing Q, the original satisfies
    /// Delta_b W + 2 Im A11,1bar1bar = 12 C g. Evaluated on the rescaled structure with
    /// -g (which maps it back to the original); gated on the original's Q.
    double corollary = 0.0;
    bool corollary_applicable = false;
};

struct ConformalReport {
    PHStructure rescaled;
    MaxResidual r1, r11, coframe, corollary;
    std::size_t corollary_skipped = 0;
    CheckList entries(double tolerance) const;
};

ConformalReport conformal_change(const PHStructure& s, const Expr& g, const SampleSet& samples,
                                 int order = kDefaultJetOrder);
ConformalPoint conformal_point(const PHStructure& s, const PHStructure& rescaled, const Expr& g, const Point& p,
                               int order = kDefaultJetOrder);

}  // namespace crgeo
