#pragma once

// Test-only structures and random fields shared by the suites.

#include <random>
#include <string>

#include "crgeo/models.hpp"

namespace fixtures {

using namespace crgeo;

inline PHStructure make(std::array<const char*, 3> theta, std::array<const char*, 3> e1,
                        std::array<const char*, 3> e2) {
    PHStructure s;
    const auto coords = s.chart.coord_list();
    for (std::size_t i = 0; i < 3; ++i) {
        s.theta[i] = parse_expr(theta[i], coords, {});
        s.e1[i] = parse_expr(e1[i], coords, {});
        s.e2[i] = parse_expr(e2[i], coords, {});
    }
    return s;
}

/// Heisenberg contact form with a J that is not invariant under T:
/// e1 = e^a e1_H, e2 = e^-a e2_H, a = 0.2x + 0.1t. Nonzero torsion.
inline PHStructure torsion_model() {
    auto s = make({"-y", "x", "1"}, {"exp(0.2*x+0.1*t)", "0", "y*exp(0.2*x+0.1*t)"},
                  {"0", "exp(-0.2*x-0.1*t)", "-x*exp(-0.2*x-0.1*t)"});
    s.chart.box = {{{-1, 1}, {-1, 1}, {-1, 1}}};
    return s;
}

/// Heisenberg frame rotated by chi(x, y): same theta, same W.
inline PHStructure rotated_heisenberg(const std::string& chi) {
    const std::string c = "cos(" + chi + ")", s = "sin(" + chi + ")";
    const std::string e1[3] = {c, s, c + "*y-" + s + "*x"};
    const std::string e2[3] = {"-" + s, c, "-" + s + "*y-" + c + "*x"};
    return make({"-y", "x", "1"}, {e1[0].c_str(), e1[1].c_str(), e1[2].c_str()},
                {e2[0].c_str(), e2[1].c_str(), e2[2].c_str()});
}

/// Random polynomial of total degree <= deg in x, y, t with coefficients in [-1, 1].
inline std::string random_polynomial(std::mt19937_64& rng, int deg) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::string out = "0";
    for (int a = 0; a <= deg; ++a)
        for (int b = 0; a + b <= deg; ++b)
            for (int c = 0; a + b + c <= deg; ++c) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "+(%.6f)*x^%d*y^%d*t^%d", coef(rng), a, b, c);
                out += buf;
            }
    return out;
}

inline Expr parse(const PHStructure& s, const std::string& src) {
    std::vector<std::string> names;
    for (const auto& [k, v] : s.params) names.push_back(k);
    return parse_expr(src, s.chart.coord_list(), names);
}

}  // namespace fixtures
