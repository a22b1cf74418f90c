#include "crgeo/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace crgeo {

namespace {

constexpr std::array<std::pair<std::string_view, Func>, 10> kFuncs{{
    {"sin", Func::sin},
    {"cos", Func::cos},
    {"tan", Func::tan},
    {"exp", Func::exp},
    {"log", Func::log},
    {"sqrt", Func::sqrt},
    {"sinh", Func::sinh},
    {"cosh", Func::cosh},
    {"tanh", Func::tanh},
    {"atan", Func::atan},
}};

std::shared_ptr<Expr::Node> make_node(Expr::Kind k) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = k;
    return n;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& coords,
           const std::vector<std::string>& params)
        : src_(src), coords_(coords), params_(params) {}

    Expr run() {
        Expr e = expr();
        skip_ws();
        if (pos_ != src_.size()) {
            fail(ParseError::Kind::syntax, "unexpected '" + std::string(1, src_[pos_]) + "'");
        }
        return e;
    }

private:
    [[noreturn]] void fail(ParseError::Kind kind, const std::string& msg) const {
        throw ParseError(kind, pos_, msg + " at offset " + std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    Expr expr() {
        Expr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = lhs + term();
            } else if (accept('-')) {
                lhs = lhs - term();
            } else {
                return lhs;
            }
        }
    }

    Expr term() {
        Expr lhs = factor();
        for (;;) {
            if (accept('*')) {
                lhs = lhs * factor();
            } else if (accept('/')) {
                lhs = lhs / factor();
            } else {
                return lhs;
            }
        }
    }

    Expr factor() {
        if (accept('-')) return -power();
        return power();
    }

    Expr power() {
        Expr base = atom();
        if (accept('^')) {
            const std::size_t at = pos_;
            Expr exponent = factor();
            if (!exponent.is_constant()) {
                pos_ = at;
                fail(ParseError::Kind::syntax, "exponent must not depend on coordinates");
            }
            return pow(base, exponent);
        }
        return base;
    }

    Expr atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail(ParseError::Kind::syntax, "unexpected end of input");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            if (!accept(')')) fail(ParseError::Kind::syntax, "expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail(ParseError::Kind::syntax, "unexpected '" + std::string(1, c) + "'");
    }

    Expr number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
            ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t q = pos_ + 1;
            if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
            if (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) {
                pos_ = q;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size() || text == ".") {
            pos_ = start;
            fail(ParseError::Kind::syntax, "malformed number '" + text + "'");
        }
        return Expr::num(v);
    }

    Expr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            ++pos_;
        }
        const std::string name(src_.substr(start, pos_ - start));
        const bool call = peek() == '(';

        auto fit = std::find_if(kFuncs.begin(), kFuncs.end(), [&](auto& kv) { return kv.first == name; });
        if (fit != kFuncs.end()) {
            if (!call) {
                pos_ = start;
                fail(ParseError::Kind::arity, "function '" + name + "' expects one argument");
            }
            accept('(');
            Expr arg = expr();
            if (peek() == ',') fail(ParseError::Kind::arity, "function '" + name + "' expects one argument");
            if (!accept(')')) fail(ParseError::Kind::syntax, "expected ')'");
            return Expr::call(fit->second, arg);
        }

        auto cit = std::find(coords_.begin(), coords_.end(), name);
        auto pit = std::find(params_.begin(), params_.end(), name);
        if (cit == coords_.end() && pit == params_.end()) {
            pos_ = start;
            if (call) {
                fail(ParseError::Kind::unknown_identifier, "unknown function '" + name + "'");
            }
            fail(ParseError::Kind::unknown_identifier, "unknown identifier '" + name + "'");
        }
        if (call) {
            pos_ = start;
            fail(ParseError::Kind::arity, "'" + name + "' is not a function");
        }
        if (cit != coords_.end()) return Expr::var(static_cast<int>(cit - coords_.begin()), name);
        return Expr::param(name);
    }

    std::string_view src_;
    const std::vector<std::string>& coords_;
    const std::vector<std::string>& params_;
    std::size_t pos_ = 0;
};

void describe_into(const Expr::Node& n, std::ostringstream& os) {
    auto two = [&](const char* tag) {
        os << tag << '(';
        describe_into(*n.lhs, os);
        os << ',';
        describe_into(*n.rhs, os);
        os << ')';
    };
    switch (n.kind) {
        case Expr::Kind::number: os << format_number(n.number); break;
        case Expr::Kind::variable: os << n.name; break;
        case Expr::Kind::parameter: os << "Param " << n.name; break;
        case Expr::Kind::neg:
            os << "Neg(";
            describe_into(*n.lhs, os);
            os << ')';
            break;
        case Expr::Kind::add: two("Add"); break;
        case Expr::Kind::sub: two("Sub"); break;
        case Expr::Kind::mul: two("Mul"); break;
        case Expr::Kind::div: two("Div"); break;
        case Expr::Kind::pow: two("Pow"); break;
        case Expr::Kind::call: {
            std::string f(func_name(n.func));
            f[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(f[0])));
            os << f << '(';
            describe_into(*n.lhs, os);
            os << ')';
            break;
        }
    }
}

void source_into(const Expr::Node& n, std::ostringstream& os) {
    auto two = [&](char op) {
        os << '(';
        source_into(*n.lhs, os);
        os << op;
        source_into(*n.rhs, os);
        os << ')';
    };
    switch (n.kind) {
        case Expr::Kind::number: os << format_number(n.number); break;
        case Expr::Kind::variable:
        case Expr::Kind::parameter: os << n.name; break;
        case Expr::Kind::neg:
            os << "(-";
            source_into(*n.lhs, os);
            os << ')';
            break;
        case Expr::Kind::add: two('+'); break;
        case Expr::Kind::sub: two('-'); break;
        case Expr::Kind::mul: two('*'); break;
        case Expr::Kind::div: two('/'); break;
        case Expr::Kind::pow: two('^'); break;
        case Expr::Kind::call:
            os << func_name(n.func) << '(';
            source_into(*n.lhs, os);
            os << ')';
            break;
    }
}

bool constant_node(const Expr::Node& n) {
    switch (n.kind) {
        case Expr::Kind::number:
        case Expr::Kind::parameter: return true;
        case Expr::Kind::variable: return false;
        case Expr::Kind::neg:
        case Expr::Kind::call: return constant_node(*n.lhs);
        default: return constant_node(*n.lhs) && constant_node(*n.rhs);
    }
}

void params_into(const Expr::Node& n, std::vector<std::string>& out) {
    if (n.kind == Expr::Kind::parameter) {
        if (std::find(out.begin(), out.end(), n.name) == out.end()) out.push_back(n.name);
        return;
    }
    if (n.lhs) params_into(*n.lhs, out);
    if (n.rhs) params_into(*n.rhs, out);
}

double apply(Func f, double x, const Expr::Node& node) {
    switch (f) {
        case Func::sin: return std::sin(x);
        case Func::cos: return std::cos(x);
        case Func::tan: return std::tan(x);
        case Func::exp: return std::exp(x);
        case Func::log:
            if (!(x > 0.0)) throw DomainError(Expr(std::make_shared<const Expr::Node>(node)).describe(), "log of nonpositive value");
            return std::log(x);
        case Func::sqrt:
            if (x < 0.0) throw DomainError(Expr(std::make_shared<const Expr::Node>(node)).describe(), "sqrt of negative value");
            return std::sqrt(x);
        case Func::sinh: return std::sinh(x);
        case Func::cosh: return std::cosh(x);
        case Func::tanh: return std::tanh(x);
        case Func::atan: return std::atan(x);
    }
    return 0.0;
}

double eval_node(const Expr::Node& n, const Point& p, const ParamTable& params) {
    switch (n.kind) {
        case Expr::Kind::number: return n.number;
        case Expr::Kind::variable: return p[static_cast<std::size_t>(n.axis)];
        case Expr::Kind::parameter: {
            auto it = params.find(n.name);
            if (it == params.end()) throw std::invalid_argument("unbound parameter '" + n.name + "'");
            return it->second;
        }
        case Expr::Kind::neg: return -eval_node(*n.lhs, p, params);
        case Expr::Kind::add: return eval_node(*n.lhs, p, params) + eval_node(*n.rhs, p, params);
        case Expr::Kind::sub: return eval_node(*n.lhs, p, params) - eval_node(*n.rhs, p, params);
        case Expr::Kind::mul: return eval_node(*n.lhs, p, params) * eval_node(*n.rhs, p, params);
        case Expr::Kind::div: return eval_node(*n.lhs, p, params) / eval_node(*n.rhs, p, params);
        case Expr::Kind::pow: {
            const double b = eval_node(*n.lhs, p, params);
            const double e = eval_node(*n.rhs, p, params);
            if (e != std::floor(e) && !(b > 0.0)) {
                throw DomainError(Expr(std::make_shared<const Expr::Node>(n)).describe(),
                                  "non-integer power of nonpositive base");
            }
            return std::pow(b, e);
        }
        case Expr::Kind::call: return apply(n.func, eval_node(*n.lhs, p, params), n);
    }
    return 0.0;
}

}  // namespace

std::string_view func_name(Func f) {
    for (const auto& [name, fn] : kFuncs) {
        if (fn == f) return name;
    }
    return "?";
}

std::string Expr::describe() const {
    std::ostringstream os;
    describe_into(*node_, os);
    return os.str();
}

std::string Expr::to_source() const {
    std::ostringstream os;
    source_into(*node_, os);
    return os.str();
}

bool Expr::is_constant() const { return constant_node(*node_); }

void Expr::collect_params(std::vector<std::string>& out) const { params_into(*node_, out); }

Expr Expr::num(double v) {
    if (std::signbit(v)) return -num(-v);
    auto n = make_node(Kind::number);
    n->number = v;
    return Expr(std::move(n));
}

Expr Expr::var(int axis, std::string name) {
    auto n = make_node(Kind::variable);
    n->axis = axis;
    n->name = std::move(name);
    return Expr(std::move(n));
}

Expr Expr::param(std::string name) {
    auto n = make_node(Kind::parameter);
    n->name = std::move(name);
    return Expr(std::move(n));
}

Expr Expr::call(Func f, Expr arg) {
    auto n = make_node(Kind::call);
    n->func = f;
    n->lhs = arg.node_;
    return Expr(std::move(n));
}

Expr operator-(const Expr& a) {
    auto n = make_node(Expr::Kind::neg);
    n->lhs = a.node_;
    return Expr(std::move(n));
}

namespace {
Expr bin(Expr::Kind k, std::shared_ptr<const Expr::Node> an, std::shared_ptr<const Expr::Node> bn) {
    auto n = make_node(k);
    n->lhs = std::move(an);
    n->rhs = std::move(bn);
    return Expr(std::move(n));
}
}  // namespace

Expr operator+(const Expr& a, const Expr& b) { return bin(Expr::Kind::add, a.node_, b.node_); }
Expr operator-(const Expr& a, const Expr& b) { return bin(Expr::Kind::sub, a.node_, b.node_); }
Expr operator*(const Expr& a, const Expr& b) { return bin(Expr::Kind::mul, a.node_, b.node_); }
Expr operator/(const Expr& a, const Expr& b) { return bin(Expr::Kind::div, a.node_, b.node_); }
Expr pow(const Expr& a, const Expr& b) { return bin(Expr::Kind::pow, a.node_, b.node_); }

Expr parse_expr(std::string_view source, const std::vector<std::string>& coords,
                const std::vector<std::string>& params) {
    return Parser(source, coords, params).run();
}

double eval(const Expr& e, const Point& p, const ParamTable& params) { return eval_node(e.node(), p, params); }

}  // namespace crgeo
