#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crgeo {

using Point = std::array<double, 3>;

/// Parameter table: name -> value.
using ParamTable = std::map<std::string, double>;

class ParseError : public std::runtime_error {
public:
    enum class Kind { syntax, unknown_identifier, arity };

    ParseError(Kind kind, std::size_t offset, const std::string& what)
        : std::runtime_error(what), kind_(kind), offset_(offset) {}

    Kind kind() const noexcept { return kind_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    Kind kind_;
    std::size_t offset_;
};

/// Raised when a function argument leaves the function's domain
/// (log of a nonpositive value, real power of a nonpositive base, ...).
class DomainError : public std::runtime_error {
public:
    DomainError(std::string node, const std::string& what)
        : std::runtime_error(what), node_(std::move(node)) {}
    const std::string& node() const noexcept { return node_; }

private:
    std::string node_;
};

enum class Func { sin, cos, tan, exp, log, sqrt, sinh, cosh, tanh, atan };

std::string_view func_name(Func f);

/// Immutable expression tree over three chart coordinates and named parameters.
class Expr {
public:
    enum class Kind { number, variable, parameter, neg, add, sub, mul, div, pow, call };

    struct Node {
        Kind kind;
        double number = 0.0;  // number
        int axis = -1;        // variable: coordinate slot 0..2
        std::string name;     // variable / parameter name
        Func func = Func::sin;
        std::shared_ptr<const Node> lhs;  // unary operand, or left operand
        std::shared_ptr<const Node> rhs;  // right operand / exponent
    };

    Expr() = default;
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    const Node& node() const { return *node_; }
    bool valid() const noexcept { return node_ != nullptr; }
    Kind kind() const { return node_->kind; }
    Expr lhs() const { return Expr(node_->lhs); }
    Expr rhs() const { return Expr(node_->rhs); }

    /// Structural debug form, e.g. "Mul(Param mu, Add(Pow(x,2),Pow(y,2)))".
    std::string describe() const;
    /// Source text that parses back into a structurally identical tree.
    std::string to_source() const;

    /// True if no coordinate variable occurs in the tree.
    bool is_constant() const;
    /// Names of parameters referenced anywhere in the tree.
    void collect_params(std::vector<std::string>& out) const;

    // Builders. Negative literals are stored as Neg(Number) so that
    // to_source()/parse round-trips are structural identities.
    static Expr num(double v);
    static Expr var(int axis, std::string name);
    static Expr param(std::string name);
    static Expr call(Func f, Expr arg);

    friend Expr operator-(const Expr& a);
    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr pow(const Expr& a, const Expr& b);

private:
    std::shared_ptr<const Node> node_;
};

inline Expr exp(const Expr& a) { return Expr::call(Func::exp, a); }
inline Expr log(const Expr& a) { return Expr::call(Func::log, a); }

/// Recursive-descent parser for
///   expr := term (('+'|'-') term)*; term := factor (('*'|'/') factor)*;
///   factor := ['-'] power; power := atom ['^' factor];
///   atom := number | ident | ident '(' expr ')' | '(' expr ')'.
Expr parse_expr(std::string_view source, const std::vector<std::string>& coords,
                const std::vector<std::string>& params);

/// Plain double evaluation, independent of the jet machinery.
double eval(const Expr& e, const Point& p, const ParamTable& params);

}  // namespace crgeo
