#pragma once

#include "crgeo/structure.hpp"

namespace crgeo {

/// Tanaka-Webster connection at a point, from the first structure equation
///   d theta^1 = theta^1 ^ theta_1^1 + theta ^ A^1_{1bar} theta^1bar.
///
/// Writing d theta^1 = p theta^1^theta^1bar + q theta^theta^1 + r theta^theta^1bar,
/// the purely imaginary solution is theta_1^1 = alpha theta^1 + beta theta^1bar + gamma theta
/// with beta = p, alpha = -conj(p), gamma = -q, and A^1_{1bar} = A_{1bar1bar} = r.
struct ConnectionData {
    CJet alpha, beta, gamma;
    CJetVec theta11;  // coordinate components of theta_1^1
    CJet A11;         // conj(r)
    // consistency residuals (values at the base point)
    double re_gamma = 0.0;       // |Re gamma|: encodes d h_{1 1bar} = 0
    double imaginarity = 0.0;    // max |Re theta_1^1 component|
    double conjugate_eq = 0.0;   // theta^theta^1 coefficient of d theta^1bar vs conj(r)
};

/// Second structure equation
///   d theta_1^1 = W theta^1^theta^1bar + 2i Im(A^1bar_{1,1bar} theta^1 ^ theta).
struct CurvatureData {
    Jet W;
    double im_W = 0.0;
    CJet A11_1bar;  // A_{11,1bar}
    /// |d theta_1^1(Z1, T) - A_{11,1bar}| and its conjugate partner
    /// |d theta_1^1(Z1bar, T) + conj(A_{11,1bar})|.
    double torsion_residual = 0.0;
    /// Same with the opposite sign convention, kept so the sign can be read off
    /// from data on a torsion-carrying model.
    double torsion_residual_flipped = 0.0;
};

/// Frame, connection and curvature at one point, sharing one jet evaluation.
/// Orders with input order N: frame N-1, connection N-2, W N-3.
struct PointGeometry {
    Coframe frame;
    ConnectionData conn;
    CurvatureData curv;

    int order() const { return frame.order; }
    const Point& point() const { return frame.point; }
};

ConnectionData connection(const PHStructure& s, const Point& p, int order = kDefaultJetOrder);
CurvatureData tw_curvature(const PHStructure& s, const Point& p, int order = kDefaultJetOrder);
PointGeometry geometry_at(const PHStructure& s, const Point& p, int order = kDefaultJetOrder);

/// theta_1^1 as coordinate components from a coframe.
ConnectionData connection_from(const Coframe& c);
CurvatureData curvature_from(const Coframe& c, const ConnectionData& conn);

}  // namespace crgeo
