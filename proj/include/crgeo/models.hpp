#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crgeo/structure.hpp"

namespace crgeo {

enum class PotentialKind { none, gradient, contact };

std::string_view kind_name(PotentialKind k);

/// Declared, never inferred.
struct Hypotheses {
    bool complete = false;
    bool closed = false;
    bool vanishing_torsion = false;
};

struct ModelDecl {
    std::string name;
    PHStructure structure;
    PotentialKind kind = PotentialKind::none;
    Expr potential;
    Hypotheses hypotheses;
    /// Published Tanaka-Webster constant for models whose W is constant.
    std::optional<double> reference_W;

    double mu() const;
};

class ModelError : public std::runtime_error {
public:
    enum class Kind { unknown_name, missing_parameter, parse, validation, io };
    ModelError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// heisenberg, heisenberg_gaussian (mu), heisenberg_contact (mu), cr_sphere,
/// cr_sphere_trivial.
std::vector<std::string> builtin_names();

/// Parameters not used by the model are ignored; required ones missing throw
/// ModelError::missing_parameter.
ModelDecl builtin(const std::string& name, const ParamTable& params = {});

/// Conformal factor g with theta_sphere = e^{2g} theta_Heisenberg.
inline constexpr const char* kSphereConformalFactor = "0.5*log(4/((1+x^2+y^2)^2+4*t^2))";
/// Tanaka-Webster curvature of cr_sphere with that factor.
inline constexpr double kSphereW = 2.0;

/// Line-oriented model format, see README. `origin` prefixes error locations.
ModelDecl parse_model(std::string_view text, const std::string& origin = "<model>");
ModelDecl load_model(const std::string& path);
std::string serialize_model(const ModelDecl& m);

/// Replace parameter values (keys must already exist or be declared by the
/// potential) and re-register.
ModelDecl with_params(ModelDecl m, const ParamTable& overrides);

/// structure.validate on the model's box (256 Halton samples, seed 7); throws
/// ModelError::validation naming the first failing check, its worst point and residual.
void register_model(const ModelDecl& m);

}  // namespace crgeo
