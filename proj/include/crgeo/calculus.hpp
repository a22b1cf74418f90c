#pragma once

// Covariant derivatives in the unitary frame (Z1, Z1bar, T) and in the real
// frame (e1, e2, T), plus the commutation identities and the contact field X_f.
//
// Index conventions: C_{I,X} is the derivative of C_I along X, appended on the
// right; phi_{e_i e_j} means "along e_i first, then along e_j".

#include <string>
#include <vector>

#include "crgeo/connection.hpp"

namespace crgeo {

enum class Dir { Z1, Z1bar, T };

/// '1', 'b' (for 1bar) or '0'.
char index_char(Dir d);
CJetVec direction(const PointGeometry& g, Dir d);

/// A component C_I of a tensor, with I over {1, 1bar, 0}; k = #1 - #1bar.
struct IndexedCoeff {
    CJet value;
    std::string index;
    int weight = 0;

    static int weight_of(const std::string& index);
    bool consistent() const { return weight == weight_of(index); }
};

IndexedCoeff scalar(const Jet& f);
IndexedCoeff scalar(const CJet& f);

/// C_{I,X} = X(C_I) - k theta_1^1(X) C_I.
IndexedCoeff cov_derivative(const PointGeometry& g, const IndexedCoeff& c, Dir d);

/// Convenience: successive derivatives, e.g. derive(g, phi, "1b1") = phi_{1 1bar 1}.
IndexedCoeff derive(const PointGeometry& g, const IndexedCoeff& c, const std::string& dirs);

struct HorizontalGradient {
    CJet phi1, phi1bar;
    Jet phi_e1, phi_e2;
};
HorizontalGradient horizontal_gradient(const PointGeometry& g, const Jet& phi);

/// |grad_b phi|^2 = 2 phi_1 phi_1bar = (phi_e1^2 + phi_e2^2) / 2.
Jet gradient_norm2(const PointGeometry& g, const Jet& phi);

/// Real tensor in the frame (e1, e2, T) with slots 0, 1, 2.
struct RealTensor {
    int rank = 0;
    std::vector<Jet> c;  // row-major, 3^rank entries

    const Jet& at(std::initializer_list<int> idx) const;
};
RealTensor real_scalar(const Jet& f);
/// Real-frame covariant derivative, new index last:
///   (nabla C)(I, d) = e_d(C_I) - sum over slots of sigma_{I_s}^m(e_d) C_{I[s->m]},
/// sigma_1^2 = sigma = -i theta_1^1, sigma_2^1 = -sigma, T slots carry no connection.
RealTensor real_nabla(const PointGeometry& g, const RealTensor& t);
/// sigma_1^2 as a real one-form.
JetVec real_connection(const PointGeometry& g);

struct SubLaplacian {
    Jet complex_path;  // phi_{1 1bar} + phi_{1bar 1}
    Jet real_path;     // (phi_{e1e1} + phi_{e2e2}) / 2
    double discrepancy = 0.0;
};
SubLaplacian sub_laplacian(const PointGeometry& g, const Jet& phi);

/// Residuals of the commutation relations at one point; all values at the base point.
struct CommutationResiduals {
    double e1e2 = 0;      // phi_{e1e2} - phi_{e2e1} = 2 phi_0
    double te1 = 0;       // phi_{0e1} - phi_{e1 0} = phi_e1 Re A - phi_e2 Im A
    // Imaginary part of C_{,01} - C_{,10} = C_{,1bar} A11. The often-quoted form
    // without the leading minus contradicts that relation when A11 != 0.
    double te2 = 0;       // phi_{0e2} - phi_{e2 0} = -(phi_e1 Im A + phi_e2 Re A)
    double e1e1e2 = 0;    // phi_{e1e1e2} - phi_{e1e2e1} = 2 phi_{e1 0} - 2 phi_e2 W
    double e2e1e2 = 0;    // phi_{e2e1e2} - phi_{e2e2e1} = 2 phi_{e2 0} + 2 phi_e1 W
    double complex_11b = 0;  // C_{I,1 1bar} - C_{I,1bar 1} = i C_{I,0} + k W C_I, I in {(), 1, 1bar}
    double complex_01 = 0;   // C_{I,01} - C_{I,10} = C_{I,1bar} A11 - k C_I A_{11,1bar}, I in {(), 1}
    double phi0 = 0;         // phi_0 = -i (phi_{1 1bar} - phi_{1bar 1})
};
CommutationResiduals commutation_at(const PointGeometry& g, const Jet& phi);

struct CommutationReport {
    MaxResidual e1e2, te1, te2, e1e1e2, e2e1e2, complex_11b, complex_01, phi0;
    CheckList entries(double tolerance) const;
};
/// phi is evaluated at order `order` at each sample; needs order >= 3 beyond the frame.
CommutationReport commutation_residuals(const PHStructure& s, const Expr& phi, const SampleSet& samples,
                                        int order = kDefaultJetOrder);

/// X_f = i f_1 Z1bar - i f_1bar Z1 - f T with the Lie-derivative report.
struct ContactFieldReport {
    JetVec X;                       // real coordinate components
    std::array<double, 3> lie_theta{};  // (L_X theta)(V), V = e1, e2, T
    double f0 = 0.0;
    double lie_theta_residual = 0.0;    // max_V |(L_X theta)(V) + f_0 theta(V)|
    double imag_defect = 0.0;           // |Im X| (X must be real)
    CJet lie_J;                     // theta^1bar((L_X J)(Z1)): coefficient of theta^1 (x) Z1bar
    CJet lie_J_conj;                // theta^1((L_X J)(Z1bar))
    CJet predicted;                 // 2 (f_11 + i A11 f)
    double lie_J_residual = 0.0;    // max of |lie_J - predicted|, |lie_J_conj - conj(predicted)|
};
ContactFieldReport contact_field(const PointGeometry& g, const Jet& f);
ContactFieldReport contact_field(const PHStructure& s, const Expr& f, const Point& p, int order = kDefaultJetOrder);

/// Lie bracket [X, Y] of coordinate vector fields.
template <class A, class B>
auto bracket(const Vec3<A>& x, const Vec3<B>& y) {
    using R = decltype(directional(x, y[0]) - directional(y, x[0]));
    Vec3<R> r;
    for (std::size_t i = 0; i < 3; ++i) r[i] = directional(x, y[i]) - directional(y, x[i]);
    return r;
}

}  // namespace crgeo
