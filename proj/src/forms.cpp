#include "crgeo/forms.hpp"

#include <algorithm>
#include <cmath>

namespace crgeo {

Jet determinant(const JetMat& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

JetMat inverse(const JetMat& m) {
    const Jet det = determinant(m);
    double scale = 0.0;
    for (const auto& row : m)
        for (const auto& v : row) scale = std::max(scale, std::abs(v.value()));
    if (std::abs(det.value()) <= 1e-12 * std::max(1.0, scale * scale * scale)) {
        throw SingularMatrix("matrix singular at base point");
    }
    const Jet inv = 1.0 / det;
    JetMat r;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            // cofactor of m[j][i]
            const int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
            const int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
            r[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) * inv;
        }
    }
    return r;
}

}  // namespace crgeo
