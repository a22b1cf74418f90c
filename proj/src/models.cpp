#include "crgeo/models.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "crgeo/curvature.hpp"

namespace crgeo {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

PHStructure heisenberg_structure() {
    PHStructure s;
    const auto c = s.chart.coord_list();
    const char* th[3] = {"-y", "x", "1"};
    const char* a[3] = {"1", "0", "y"};
    const char* b[3] = {"0", "1", "-x"};
    for (std::size_t i = 0; i < 3; ++i) {
        s.theta[i] = parse_expr(th[i], c, {});
        s.e1[i] = parse_expr(a[i], c, {});
        s.e2[i] = parse_expr(b[i], c, {});
    }
    s.chart.name = "heisenberg";
    return s;
}

double require(const ParamTable& p, const std::string& model, const std::string& key) {
    auto it = p.find(key);
    if (it == p.end())
        throw ModelError(ModelError::Kind::missing_parameter, "model " + model + " requires parameter '" + key + "'");
    return it->second;
}

Expr parse_with(const PHStructure& s, const std::string& src) {
    std::vector<std::string> names;
    for (const auto& [k, v] : s.params) names.push_back(k);
    return parse_expr(src, s.chart.coord_list(), names);
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Splits a,b,"c,d" at top-level commas; quotes are stripped.
std::vector<std::string> split_list(const std::string& v, const std::string& where) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false, was_quoted = false;
    for (char ch : v) {
        if (ch == '"') {
            quoted = !quoted;
            was_quoted = true;
        } else if (ch == ',' && !quoted) {
            out.push_back(was_quoted ? cur : trim(cur));
            cur.clear();
            was_quoted = false;
        } else if (quoted || !(was_quoted && (ch == ' ' || ch == '\t'))) {
            cur += ch;
        }
    }
    if (quoted) throw ModelError(ModelError::Kind::parse, where + ": unterminated quote");
    out.push_back(was_quoted ? cur : trim(cur));
    return out;
}

double to_number(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ModelError(ModelError::Kind::parse, where + ": expected a number, got '" + s + "'");
}

bool to_bool(const std::string& s, const std::string& where) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw ModelError(ModelError::Kind::parse, where + ": expected true or false, got '" + s + "'");
}

std::string quoted(const std::array<Expr, 3>& c) {
    return "\"" + c[0].to_source() + "\", \"" + c[1].to_source() + "\", \"" + c[2].to_source() + "\"";
}

struct Line {
    std::string value;
    std::string where;
};

}  // namespace

std::string_view kind_name(PotentialKind k) {
    switch (k) {
        case PotentialKind::gradient: return "gradient";
        case PotentialKind::contact: return "contact";
        default: return "none";
    }
}

double ModelDecl::mu() const {
    auto it = structure.params.find("mu");
    return it == structure.params.end() ? 0.0 : it->second;
}

std::vector<std::string> builtin_names() {
    return {"heisenberg", "heisenberg_gaussian", "heisenberg_contact", "cr_sphere", "cr_sphere_trivial"};
}

ModelDecl builtin(const std::string& name, const ParamTable& params) {
    ModelDecl m;
    m.name = name;
    m.structure = heisenberg_structure();
    m.hypotheses = {true, false, true};
    if (name == "heisenberg") {
        m.reference_W = 0.0;
    } else if (name == "heisenberg_gaussian" || name == "heisenberg_contact") {
        m.structure.params["mu"] = require(params, name, "mu");
        const bool gaussian = name == "heisenberg_gaussian";
        m.kind = gaussian ? PotentialKind::gradient : PotentialKind::contact;
        m.potential = parse_with(m.structure, gaussian ? "mu*(x^2+y^2)" : "2*mu*t");
        m.reference_W = 0.0;
    } else if (name == "cr_sphere" || name == "cr_sphere_trivial") {
        const auto h = m.structure;
        m.structure = conformal_structure(h, parse_expr(kSphereConformalFactor, h.chart.coord_list(), {}));
        m.structure.chart.name = "cr_sphere";
        m.structure.chart.box = {{{-1, 1}, {-1, 1}, {-1, 1}}};
        m.hypotheses = {true, true, true};
        m.reference_W = kSphereW;
        if (name == "cr_sphere_trivial") {
            auto it = params.find("mu");
            m.structure.params["mu"] = it == params.end() ? kSphereW : it->second;
            m.kind = PotentialKind::gradient;
            m.potential = Expr::num(0);
        }
    } else {
        std::string known;
        for (const auto& n : builtin_names()) known += (known.empty() ? "" : ", ") + n;
        throw ModelError(ModelError::Kind::unknown_name, "unknown model '" + name + "' (known: " + known + ")");
    }
    register_model(m);
    return m;
}

void register_model(const ModelDecl& m) {
    try {
        m.structure.chart.check();
    } catch (const std::invalid_argument& e) {
        throw ModelError(ModelError::Kind::validation, m.name + ": " + e.what());
    }
    const auto samples = halton_samples(m.structure.chart, 256, 7);
    const CheckList checks = validate(m.structure, samples);
    for (const auto& e : checks.entries) {
        if (e.pass) continue;
        std::string msg = m.name + ": validation failed: ";
        msg += e.note.empty() ? e.name : e.note;
        msg += " (residual " + fmt(e.residual);
        if (e.worst) msg += " at " + format_point(*e.worst);
        msg += ")";
        throw ModelError(ModelError::Kind::validation, msg);
    }
}

ModelDecl with_params(ModelDecl m, const ParamTable& overrides) {
    for (const auto& [k, v] : overrides) m.structure.params[k] = v;
    register_model(m);
    return m;
}

ModelDecl parse_model(std::string_view text, const std::string& origin) {
    // Pass 1: collect section.key -> value so that [params] may appear anywhere.
    std::map<std::string, Line> kv;
    std::vector<std::string> param_order;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    for (int lineno = 1; std::getline(in, raw); ++lineno) {
        const std::string where = origin + ":" + std::to_string(lineno);
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ModelError(ModelError::Kind::parse, where + ": malformed section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ModelError(ModelError::Kind::parse, where + ": expected key = value");
        const std::string key = section + "." + trim(std::string_view(line).substr(0, eq));
        if (kv.count(key)) throw ModelError(ModelError::Kind::parse, where + ": duplicate key " + key);
        kv[key] = {trim(std::string_view(line).substr(eq + 1)), where};
        if (section == "params") param_order.push_back(key);
    }
    auto get = [&](const std::string& key) -> const Line& {
        auto it = kv.find(key);
        if (it == kv.end()) throw ModelError(ModelError::Kind::parse, origin + ": missing key " + key);
        return it->second;
    };
    auto has = [&](const std::string& key) { return kv.count(key) > 0; };

    ModelDecl m;
    m.name = has("model.name") ? get("model.name").value : origin;
    Chart& chart = m.structure.chart;
    chart.name = m.name;
    if (has("chart.coords")) {
        const auto& l = get("chart.coords");
        const auto c = split_list(l.value, l.where);
        if (c.size() != 3) throw ModelError(ModelError::Kind::parse, l.where + ": coords needs 3 names");
        for (std::size_t i = 0; i < 3; ++i) chart.coords[i] = c[i];
    }
    auto read_box = [&](const std::string& key, std::array<Interval, 3>& dst) {
        if (!has(key)) return;
        const auto& l = get(key);
        const auto v = split_list(l.value, l.where);
        if (v.size() != 6) throw ModelError(ModelError::Kind::parse, l.where + ": expected 6 numbers");
        for (std::size_t i = 0; i < 3; ++i) dst[i] = {to_number(v[2 * i], l.where), to_number(v[2 * i + 1], l.where)};
    };
    read_box("chart.box", chart.box);
    read_box("chart.domain", chart.domain);
    if (has("chart.margin")) chart.margin = to_number(get("chart.margin").value, get("chart.margin").where);
    for (const auto& key : param_order) m.structure.params[key.substr(7)] = to_number(kv[key].value, kv[key].where);

    auto expr = [&](const std::string& src, const std::string& where) {
        try {
            return parse_with(m.structure, src);
        } catch (const ParseError& e) {
            throw ModelError(ModelError::Kind::parse,
                             where + ": in \"" + src + "\" at offset " + std::to_string(e.offset()) + ": " + e.what());
        }
    };
    auto triple = [&](const std::string& key, std::array<Expr, 3>& dst) {
        const auto& l = get(key);
        const auto v = split_list(l.value, l.where);
        if (v.size() != 3) throw ModelError(ModelError::Kind::parse, l.where + ": expected 3 components");
        for (std::size_t i = 0; i < 3; ++i) dst[i] = expr(v[i], l.where);
    };
    triple("contact.theta", m.structure.theta);
    triple("frame.e1", m.structure.e1);
    triple("frame.e2", m.structure.e2);

    if (has("potential.kind")) {
        const auto& l = get("potential.kind");
        if (l.value == "gradient") m.kind = PotentialKind::gradient;
        else if (l.value == "contact") m.kind = PotentialKind::contact;
        else if (l.value != "none")
            throw ModelError(ModelError::Kind::parse, l.where + ": kind must be gradient, contact or none");
        if (m.kind != PotentialKind::none) {
            const auto& e = get("potential.expr");
            m.potential = expr(split_list(e.value, e.where).at(0), e.where);
        }
    }
    if (has("hypotheses.complete")) m.hypotheses.complete = to_bool(get("hypotheses.complete").value, get("hypotheses.complete").where);
    if (has("hypotheses.closed")) m.hypotheses.closed = to_bool(get("hypotheses.closed").value, get("hypotheses.closed").where);
    if (has("hypotheses.vanishing_torsion"))
        m.hypotheses.vanishing_torsion =
            to_bool(get("hypotheses.vanishing_torsion").value, get("hypotheses.vanishing_torsion").where);
    if (has("reference.tanaka_webster"))
        m.reference_W = to_number(get("reference.tanaka_webster").value, get("reference.tanaka_webster").where);

    register_model(m);
    return m;
}

ModelDecl load_model(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ModelError(ModelError::Kind::io, "cannot open model file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_model(ss.str(), path);
}

std::string serialize_model(const ModelDecl& m) {
    const Chart& c = m.structure.chart;
    std::ostringstream o;
    auto box = [&](const std::array<Interval, 3>& b) {
        std::string s;
        for (std::size_t i = 0; i < 3; ++i) s += (i ? ", " : "") + fmt(b[i].lo) + ", " + fmt(b[i].hi);
        return s;
    };
    o << "[model]\nname = " << m.name << "\n\n";
    o << "[chart]\ncoords = " << c.coords[0] << ", " << c.coords[1] << ", " << c.coords[2] << "\n";
    o << "box = " << box(c.box) << "\n";
    bool bounded = false;
    for (const auto& d : c.domain) bounded = bounded || std::isfinite(d.lo) || std::isfinite(d.hi);
    if (bounded) o << "domain = " << box(c.domain) << "\n";
    o << "margin = " << fmt(c.margin) << "\n\n";
    if (!m.structure.params.empty()) {
        o << "[params]\n";
        for (const auto& [k, v] : m.structure.params) o << k << " = " << fmt(v) << "\n";
        o << "\n";
    }
    o << "[contact]\ntheta = " << quoted(m.structure.theta) << "\n\n";
    o << "[frame]\ne1 = " << quoted(m.structure.e1) << "\ne2 = " << quoted(m.structure.e2) << "\n\n";
    if (m.kind != PotentialKind::none)
        o << "[potential]\nkind = " << kind_name(m.kind) << "\nexpr = \"" << m.potential.to_source() << "\"\n\n";
    auto b = [](bool v) { return v ? "true" : "false"; };
    o << "[hypotheses]\ncomplete = " << b(m.hypotheses.complete) << "\nclosed = " << b(m.hypotheses.closed)
      << "\nvanishing_torsion = " << b(m.hypotheses.vanishing_torsion) << "\n";
    if (m.reference_W) o << "\n[reference]\ntanaka_webster = " << fmt(*m.reference_W) << "\n";
    return o.str();
}

}  // namespace crgeo
