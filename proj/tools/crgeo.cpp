// crgeo: verification reports for pseudohermitian 3-manifolds.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage error,
// 3 model load or validation failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "crgeo/riemann.hpp"
#include "json.hpp"

using namespace crgeo;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr const char* kSchema = "crgeo-report/1";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string command;
    std::string model, model_file;
    std::size_t seed = 7;
    std::size_t samples = 256;
    int order = kDefaultJetOrder;
    std::optional<double> tolerance;
    bool text = false;
    std::string output;
    ParamTable params;
    std::string point;
    std::string lambdas = "0.5,1,2";
    std::string lambda = "1";
    std::string levels = "0.5,1,2";
    std::size_t level_samples = 64;
    double epsilon = 1e-3;
    int cells = 64;
    std::vector<std::string> g;
    int g_count = 10;
    std::size_t conformal_samples = 16;
};

struct Section {
    std::string name;
    CheckList checks;
    json data = json::object();
    std::string text;  // extra human-readable lines
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(std::string("bad number in --") + what + ": '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError(std::string("--") + what + " needs at least one value");
    return out;
}

Point parse_point(const std::string& s) {
    const auto v = parse_list(s, "point");
    if (v.size() != 3) throw UsageError("--point needs three comma-separated coordinates");
    return {v[0], v[1], v[2]};
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
json cjson(const CJet& z) { return json{{"re", num(z.re.value())}, {"im", num(z.im.value())}}; }
json pjson(const Point& p) { return json::array({num(p[0]), num(p[1]), num(p[2])}); }

json entry_json(const CheckEntry& e, std::size_t seed) {
    json j;
    j["name"] = e.name;
    j["anchor"] = e.anchor;
    j["residual"] = num(e.residual);
    j["tolerance"] = num(e.tolerance);
    j["pass"] = e.pass;
    j["applicable"] = e.applicable;
    j["samples"] = e.samples;
    j["seed"] = seed;
    j["worst"] = e.worst ? pjson(*e.worst) : json(nullptr);
    if (!e.note.empty()) j["note"] = e.note;
    return j;
}

// Sections -------------------------------------------------------------------------

Section run_validate(const ModelDecl& m, const Options& o) {
    Section s{"validate", {}, json::object(), {}};
    s.checks = validate(m.structure, halton_samples(m.structure.chart, o.samples, o.seed));
    return s;
}

Section run_curvature(const ModelDecl& m, const Options& o) {
    Section s{"curvature", {}, json::object(), {}};
    const auto samples = halton_samples(m.structure.chart, o.samples, o.seed);
    struct P {
        double imW = 0, torsion = 0, imag = 0, div = 0, W = 0, A = 0, Q11 = 0, ref = 0;
    };
    std::vector<P> per(samples.points.size());
    parallel_for(per.size(), [&](std::size_t i) {
        const auto g = geometry_at(m.structure, samples.points[i], o.order);
        P r;
        r.imW = g.curv.im_W;
        r.torsion = g.curv.torsion_residual;
        r.imag = std::max(g.conn.imaginarity, g.conn.re_gamma);
        r.div = q_curvature(g).divergence_identity;
        r.W = g.curv.W.value();
        r.A = std::hypot(g.conn.A11.re.value(), g.conn.A11.im.value());
        r.Q11 = cartan_tensor(g).magnitude();
        r.ref = m.reference_W ? r.W - *m.reference_W : 0.0;
        per[i] = r;
    });
    MaxResidual imW, tor, imag, div, ref;
    double wmin = INFINITY, wmax = -INFINITY, amax = 0, qmax = 0;
    for (std::size_t i = 0; i < per.size(); ++i) {
        const Point& p = samples.points[i];
        imW.add(per[i].imW, p);
        tor.add(per[i].torsion, p);
        imag.add(per[i].imag, p);
        div.add(per[i].div, p);
        ref.add(per[i].ref, p);
        wmin = std::min(wmin, per[i].W);
        wmax = std::max(wmax, per[i].W);
        amax = std::max(amax, per[i].A);
        qmax = std::max(qmax, per[i].Q11);
    }
    auto& e = s.checks.entries;
    e.push_back(imag.entry("connection_imaginary", "theta_1^1 is purely imaginary (d h_{1 1bar} = 0)", 1e-9));
    e.push_back(imW.entry("W_real", "Tanaka-Webster curvature W is real", 1e-9));
    e.push_back(tor.entry("torsion_structure", "second structure equation: torsion derivative terms", 1e-8));
    e.push_back(div.entry("q_divergence_identity", "R_{1,1bar} = (Delta_b W + 2 Im A_{11,1bar1bar}) / 2", 1e-8));
    if (m.reference_W)
        e.push_back(ref.entry("reference_W", "W equals the published constant of the model", 1e-8));

    s.data["W_min"] = num(wmin);
    s.data["W_max"] = num(wmax);
    s.data["W_spread"] = num(wmax - wmin);
    s.data["A11_max"] = num(amax);
    s.data["Q11_max"] = num(qmax);
    if (m.reference_W) s.data["reference_W"] = *m.reference_W;

    const Point p = o.point.empty() ? samples.points.front() : parse_point(o.point);
    const auto g = geometry_at(m.structure, p, o.order);
    const auto q = q_curvature(g);
    json pt;
    pt["point"] = pjson(p);
    pt["W"] = num(g.curv.W.value());
    pt["A11"] = cjson(g.conn.A11);
    pt["Q11"] = cjson(cartan_tensor(g).Q11);
    pt["R1"] = cjson(q.R1);
    pt["R1_1bar"] = cjson(q.R1_1bar);
    pt["Q"] = num(q.Q.value());
    pt["reeb"] = pjson({g.frame.T[0].value(), g.frame.T[1].value(), g.frame.T[2].value()});
    s.data["at_point"] = pt;
    s.text = "  at " + format_point(p) + ": W = " + fmt("%.12g", pt["W"].get<double>()) +
             ", |A11| = " + fmt("%.3e", std::hypot(g.conn.A11.re.value(), g.conn.A11.im.value())) +
             ", |Q11| = " + fmt("%.3e", cartan_tensor(g).magnitude()) + ", Q = " + fmt("%.6g", q.Q.value()) + "\n";
    return s;
}

SolitonCandidate candidate(const ModelDecl& m) {
    if (m.kind == PotentialKind::none) throw UsageError("model '" + m.name + "' declares no potential");
    return candidate_from(m);
}

json soliton_data(const SolitonReport& r) {
    json d;
    d["kind"] = r.kind == SolitonKind::contact ? "contact" : "gradient";
    d["mu"] = r.mu;
    d["type"] = std::string(type_name(r.type));
    d["tolerance"] = r.tolerance;
    if (r.C) d["C"] = json{{"mean", num(r.C->mean)}, {"min", num(r.C->min)}, {"max", num(r.C->max)}};
    return d;
}

Section run_soliton(const ModelDecl& m, const Options& o) {
    const auto c = candidate(m);
    const auto samples = halton_samples(m.structure.chart, o.samples, o.seed);
    const auto r = c.kind == SolitonKind::contact ? check_cr_soliton(c, samples, o.order)
                                                  : check_pseudo_gradient(c, samples, o.order);
    return {"check-soliton", r.checks, soliton_data(r), {}};
}

Section run_conserved(const ModelDecl& m, const Options& o) {
    const auto c = candidate(m);
    const auto r = conserved_quantities(c, halton_samples(m.structure.chart, o.samples, o.seed), o.order);
    return {"conserved", r.checks, soliton_data(r), {}};
}

Section run_harnack(const ModelDecl& m, const Options& o) {
    const auto c = candidate(m);
    const auto r = harnack_residual(c, halton_samples(m.structure.chart, o.samples, o.seed), o.order);
    Section s{"harnack", {}, json::object(), {}};
    s.checks.entries.push_back(r.entry());
    s.data["precondition"] = r.precondition;
    s.data["max_residual"] = num(r.value.value);
    return s;
}

Section run_conformal(const ModelDecl& m, const Options& o) {
    Section s{"conformal", {}, json::object(), {}};
    std::vector<std::string> gs = o.g;
    if (gs.empty()) {
        // low-degree factors with coefficients in [-0.2, 0.2], from the seed
        std::mt19937_64 rng(o.seed);
        auto coef = [&] { return -0.2 + 0.4 * (static_cast<double>(rng() >> 11) * 0x1.0p-53); };
        for (int k = 0; k < o.g_count; ++k) {
            char buf[200];
            std::snprintf(buf, sizeof buf, "%.4f*x+%.4f*y+%.4f*t+%.4f*x*y+%.4f*t^2+%.4f*x^2", coef(), coef(), coef(),
                          coef(), coef(), coef());
            gs.emplace_back(buf);
        }
    }
    std::vector<std::string> names;
    for (const auto& [k, v] : m.structure.params) names.push_back(k);
    const auto samples = halton_samples(m.structure.chart, o.conformal_samples, o.seed);
    MaxResidual r1, r11, cof, cor;
    std::size_t skipped = 0;
    json list = json::array();
    for (const auto& src : gs) {
        Expr g;
        try {
            g = parse_expr(src, m.structure.chart.coord_list(), names);
        } catch (const ParseError& e) {
            throw UsageError("bad --g expression '" + src + "': " + e.what());
        }
        const auto rep = conformal_change(m.structure, g, samples, o.order);
        r1.merge(rep.r1);
        r11.merge(rep.r11);
        cof.merge(rep.coframe);
        cor.merge(rep.corollary);
        skipped += rep.corollary_skipped;
        list.push_back(json{{"g", src}, {"R1", num(rep.r1.value)}, {"R1_1bar", num(rep.r11.value)}});
    }
    ConformalReport all;
    all.r1 = r1;
    all.r11 = r11;
    all.coframe = cof;
    all.corollary = cor;
    all.corollary_skipped = skipped;
    s.checks = all.entries(1e-6);
    s.data["factors"] = list;
    s.data["corollary_skipped"] = skipped;
    return s;
}

Section run_adapted(const ModelDecl& m, const Options& o) {
    Section s{"adapted-metric", {}, json::object(), {}};
    const auto samples = halton_samples(m.structure.chart, o.samples, o.seed);
    json per = json::array();
    for (double l : parse_list(o.lambdas, "lambda")) {
        if (!(l > 0)) throw UsageError("lambda must be positive");
        const auto r = adapted_metric_suite(m.structure, l, samples, o.order);
        for (auto e : r.checks.entries) {
            e.name = "lambda=" + fmt("%g", l) + ": " + e.name;
            s.checks.entries.push_back(std::move(e));
        }
        json ric = json::array();
        for (const auto& row : r.ricci_at_first) ric.push_back(json::array({num(row[0]), num(row[1]), num(row[2])}));
        per.push_back(json{{"lambda", l}, {"W", num(r.W_at_first)}, {"ricci_at_first_sample", ric}});
        s.text += "  lambda " + fmt("%-4g", l) + " Ricci diag (" + fmt("%.9g", r.ricci_at_first[0][0]) + ", " +
                  fmt("%.9g", r.ricci_at_first[1][1]) + ", " + fmt("%.9g", r.ricci_at_first[2][2]) + "), W = " +
                  fmt("%.9g", r.W_at_first) + "\n";
    }
    s.data["lambdas"] = per;
    s.data["first_sample"] = pjson(samples.points.front());
    return s;
}

double single_lambda(const Options& o) {
    const auto v = parse_list(o.lambda, "lambda");
    if (v.size() != 1 || !(v[0] > 0)) throw UsageError("--lambda takes one positive value here");
    return v[0];
}

Section run_level_sets(const ModelDecl& m, const Options& o) {
    Section s{"level-sets", {}, json::object(), {}};
    const auto c = candidate(m);
    const double l = single_lambda(o);
    const auto r = isoparametric_check(c, l, parse_list(o.levels, "levels"), o.level_samples, o.seed, o.order);
    s.checks = r.checks;
    json rows = json::array();
    char line[256];
    std::snprintf(line, sizeof line, "  %-8s %5s %14s %10s %14s %14s %14s %14s %10s\n", "c", "n", "|grad phi|", "spread",
                  "|grad_b phi|", "Delta phi", "Delta_b phi", "II(E2,E3)", "max|K|");
    s.text = line;
    for (const auto& row : r.rows) {
        rows.push_back(json{{"c", row.value},
                            {"samples", row.samples},
                            {"grad_norm", num(row.grad_norm)},
                            {"grad_norm_spread", num(row.grad_norm_spread)},
                            {"grad_b_norm", num(row.grad_b_norm)},
                            {"laplacian", num(row.laplacian)},
                            {"laplacian_spread", num(row.laplacian_spread)},
                            {"sub_laplacian", num(row.sub_laplacian)},
                            {"II23", num(row.II23)},
                            {"II33_max", num(row.II33_max)},
                            {"K_max", num(row.K_max)}});
        std::snprintf(line, sizeof line, "  %-8g %5zu %14.10f %10.2e %14.10f %14.10f %14.10f %14.10f %10.2e\n", row.value,
                      row.samples, row.grad_norm, row.grad_norm_spread, row.grad_b_norm, row.laplacian,
                      row.sub_laplacian, row.II23, row.K_max);
        s.text += line;
    }
    s.data["lambda"] = l;
    s.data["vacuous"] = r.vacuous;
    s.data["monotone"] = r.monotone;
    s.data["table"] = rows;
    json fails = json::array();
    for (const auto& lv : r.levels)
        for (const auto& f : lv.failures) fails.push_back(json{{"c", lv.value}, {"failure", f}});
    s.data["projection_failures"] = fails;
    return s;
}

Section run_critical(const ModelDecl& m, const Options& o) {
    Section s{"critical-set", {}, json::object(), {}};
    const auto c = candidate(m);
    GridSpec g;
    g.box = m.structure.chart.box;
    g.cells = o.cells;
    g.epsilon = o.epsilon;
    g.lambda = single_lambda(o);
    if (g.cells < 4) throw UsageError("--cells must be at least 4");
    if (!(g.epsilon > 0)) throw UsageError("--epsilon must be positive");

    const auto pre = check_pseudo_gradient(c, halton_samples(m.structure.chart, std::min<std::size_t>(o.samples, 64), o.seed),
                                           o.order);
    CheckEntry pe;
    pe.name = "soliton_precondition";
    pe.anchor = "candidate is a pseudo-gradient CR Yamabe soliton";
    for (const auto& e : pre.checks.entries) pe.residual = std::max(pe.residual, e.residual);
    pe.tolerance = pre.tolerance;
    pe.samples = std::min<std::size_t>(o.samples, 64);
    pe.pass = pre.pass();
    s.checks.entries.push_back(pe);

    const auto r = critical_set(c, g);
    CheckEntry curves;
    curves.name = "at_most_two_curves";
    curves.anchor = "besides surface components, the critical set contains at most two curves";
    curves.residual = r.diffeo.curves;
    curves.tolerance = 2;
    curves.samples = r.nodes;
    curves.pass = r.diffeo.curves <= 2;
    s.checks.entries.push_back(curves);

    json comps = json::array();
    for (const auto& k : r.components) {
        json bb = json::array();
        for (int a = 0; a < 3; ++a) {
            double lo = INFINITY, hi = -INFINITY;
            for (const auto& p : k.points) lo = std::min(lo, p[a]), hi = std::max(hi, p[a]);
            bb.push_back(json::array({num(lo), num(hi)}));
        }
        comps.push_back(json{{"nodes", k.points.size()},
                             {"dimension", k.dimension},
                             {"tag", k.tag},
                             {"boundary", k.boundary},
                             {"spanning", k.spanning},
                             {"pca", json::array({num(k.eigenvalues[0]), num(k.eigenvalues[1]), num(k.eigenvalues[2])})},
                             {"bounding_box", bb}});
    }
    const auto& d = r.diffeo;
    s.data["grid"] = json{{"cells", g.cells}, {"epsilon", g.epsilon}, {"lambda", g.lambda}};
    s.data["nodes"] = r.nodes;
    s.data["critical_nodes"] = r.critical_nodes;
    s.data["components"] = comps;
    s.data["diffeo"] = json{{"trivial", d.trivial},       {"curves", d.curves},         {"surfaces", d.surfaces},
                            {"excluded", d.excluded},     {"leaf", d.leaf},             {"case", d.case_label},
                            {"candidates", d.candidates}, {"concluded", d.concluded},   {"reason", d.reason},
                            {"caveat", d.caveat}};
    const auto& h = m.hypotheses;
    s.data["declared_hypotheses"] =
        json{{"complete", h.complete}, {"closed", h.closed}, {"vanishing_torsion", h.vanishing_torsion}};
    s.text = "  components " + std::to_string(r.components.size()) + ", case (" + d.case_label + "), concluded: " +
             d.concluded + (d.reason.empty() ? "" : " [" + d.reason + "]") + "; " + d.caveat + "\n";
    return s;
}

std::vector<Section> run(const std::string& cmd, const ModelDecl& m, const Options& o) {
    if (cmd == "validate") return {run_validate(m, o)};
    if (cmd == "curvature") return {run_curvature(m, o)};
    if (cmd == "check-soliton") return {run_soliton(m, o)};
    if (cmd == "harnack") return {run_harnack(m, o)};
    if (cmd == "conformal") return {run_conformal(m, o)};
    if (cmd == "adapted-metric") return {run_adapted(m, o)};
    if (cmd == "level-sets") return {run_level_sets(m, o)};
    if (cmd == "critical-set") return {run_critical(m, o)};
    // all
    std::vector<Section> out = {run_validate(m, o), run_curvature(m, o)};
    if (m.kind != PotentialKind::none) {
        out.push_back(run_soliton(m, o));
        out.push_back(run_harnack(m, o));
        if (m.kind == PotentialKind::gradient) out.push_back(run_conserved(m, o));
    }
    out.push_back(run_conformal(m, o));
    out.push_back(run_adapted(m, o));
    if (m.kind == PotentialKind::gradient) {
        out.push_back(run_level_sets(m, o));
        out.push_back(run_critical(m, o));
    }
    return out;
}

ModelDecl load(const Options& o) {
    if (!o.model.empty() && !o.model_file.empty()) throw UsageError("--model and --model-file are exclusive");
    if (o.model.empty() && o.model_file.empty()) throw UsageError("one of --model or --model-file is required");
    if (!o.model.empty()) return builtin(o.model, o.params);
    ModelDecl m = load_model(o.model_file);
    return o.params.empty() ? m : with_params(std::move(m), o.params);
}

// --name value pairs left over by the option parser become model parameters.
ParamTable collect_params(const std::vector<std::string>& extras) {
    ParamTable p;
    for (std::size_t i = 0; i < extras.size(); ++i) {
        std::string key = extras[i], value;
        if (key.rfind("--", 0) != 0 || key.size() < 3) throw UsageError("unexpected argument '" + key + "'");
        key = key.substr(2);
        const auto eq = key.find('=');
        if (eq != std::string::npos) {
            value = key.substr(eq + 1);
            key = key.substr(0, eq);
        } else {
            if (i + 1 >= extras.size()) throw UsageError("parameter --" + key + " needs a value");
            value = extras[++i];
        }
        try {
            std::size_t used = 0;
            p[key] = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw UsageError("parameter --" + key + " needs a number, got '" + value + "'");
        }
    }
    return p;
}

void apply_tolerance(std::vector<Section>& secs, std::optional<double> tol) {
    if (!tol) return;
    for (auto& s : secs)
        for (auto& e : s.checks.entries) {
            if (!e.applicable) continue;
            e.tolerance = *tol;
            e.pass = e.samples > 0 && e.residual <= *tol;
        }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"crgeo: pointwise verification of pseudohermitian 3-manifold identities"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Options o;
    bool json_flag = false;

    auto common = [&](CLI::App* sub) {
        sub->allow_extras();
        sub->add_option("--model", o.model, "built-in model name");
        sub->add_option("--model-file", o.model_file, "model declaration file");
        sub->add_option("--seed", o.seed, "Halton seed")->capture_default_str();
        sub->add_option("--samples", o.samples, "sample count")->capture_default_str()->check(CLI::PositiveNumber);
        sub->add_option("--order", o.order, "jet order")->capture_default_str()->check(CLI::Range(4, kMaxJetOrder));
        sub->add_option("--tolerance", o.tolerance, "override every check tolerance");
        auto* j = sub->add_flag("--json", json_flag, "JSON report on stdout (default)");
        sub->add_flag("--text", o.text, "plain-text report on stdout")->excludes(j);
        sub->add_option("--output", o.output, "write the report to a file instead of stdout");
    };
    const std::vector<std::pair<std::string, std::string>> cmds = {
        {"validate", "structure normalizations"},
        {"curvature", "Tanaka-Webster curvature, torsion, Cartan tensor and Q-curvature"},
        {"check-soliton", "soliton equations for the declared potential"},
        {"harnack", "Harnack quantity on contact-potential solitons"},
        {"conformal", "conformal transformation law of R_1"},
        {"adapted-metric", "curvature of the Webster adapted metrics"},
        {"level-sets", "level-surface geometry and isoparametric table"},
        {"critical-set", "critical set of the potential and the diffeomorphism report"},
        {"all", "run the full suite"},
    };
    for (const auto& [name, help] : cmds) {
        auto* sub = app.add_subcommand(name, help);
        common(sub);
        if (name == "curvature" || name == "all") sub->add_option("--point", o.point, "evaluation point x,y,t");
        if (name == "adapted-metric")
            sub->add_option("--lambda", o.lambdas, "comma-separated lambda values")->capture_default_str();
        if (name == "all")
            sub->add_option("--lambdas", o.lambdas, "lambda values for the adapted-metric section")->capture_default_str();
        if (name == "level-sets" || name == "critical-set" || name == "all")
            sub->add_option("--lambda", o.lambda, "adapted-metric lambda")->capture_default_str();
        if (name == "level-sets" || name == "all") {
            sub->add_option("--levels", o.levels, "comma-separated level values")->capture_default_str();
            sub->add_option("--level-samples", o.level_samples, "samples per level")->capture_default_str();
        }
        if (name == "critical-set" || name == "all") {
            sub->add_option("--epsilon", o.epsilon, "critical threshold on |grad phi|")->capture_default_str();
            sub->add_option("--cells", o.cells, "grid cells per axis")->capture_default_str();
        }
        if (name == "conformal" || name == "all") {
            sub->add_option("--g", o.g, "conformal factor expression (repeatable)");
            sub->add_option("--g-count", o.g_count, "random factors when no --g is given")->capture_default_str();
            sub->add_option("--conformal-samples", o.conformal_samples, "samples per factor")->capture_default_str();
        }
        sub->callback([&o, n = name] { o.command = n; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    ModelDecl model;
    std::vector<Section> secs;
    try {
        CLI::App* sub = app.get_subcommands().front();
        o.params = collect_params(sub->remaining());
        try {
            model = load(o);
        } catch (const ModelError& e) {
            std::cerr << "crgeo: " << e.what() << "\n";
            return 3;
        } catch (const StructureError& e) {
            std::cerr << "crgeo: " << e.what() << "\n";
            return 3;
        }
        secs = run(o.command, model, o);
    } catch (const UsageError& e) {
        std::cerr << "crgeo: " << e.what() << "\n";
        return 2;
    } catch (const ModelError& e) {
        std::cerr << "crgeo: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "crgeo: internal error: " << e.what() << "\n";
        return 1;
    }
    apply_tolerance(secs, o.tolerance);

    const bool prefix = secs.size() > 1;
    bool pass = true;
    std::size_t total = 0, failed = 0;
    json checks = json::array(), data = json::object();
    for (const auto& s : secs) {
        for (const auto& e : s.checks.entries) {
            json j = entry_json(e, o.seed);
            if (prefix) j["name"] = s.name + "/" + e.name;
            checks.push_back(j);
            ++total;
            if (!e.pass) ++failed, pass = false;
        }
        data[s.name] = s.data;
    }

    json report;
    report["schema"] = kSchema;
    report["tool"] = json{{"name", "crgeo"}, {"version", kVersion}};
    report["command"] = o.command;
    json params = json::object();
    for (const auto& [k, v] : model.structure.params) params[k] = v;
    report["model"] = json{{"name", model.name},
                           {"source", o.model_file.empty() ? "builtin" : o.model_file},
                           {"params", params},
                           {"potential_kind", std::string(kind_name(model.kind))},
                           {"hypotheses",
                            json{{"complete", model.hypotheses.complete},
                                 {"closed", model.hypotheses.closed},
                                 {"vanishing_torsion", model.hypotheses.vanishing_torsion}}}};
    report["config"] = json{{"seed", o.seed},
                            {"samples", o.samples},
                            {"order", o.order},
                            {"tolerance_override", o.tolerance ? json(*o.tolerance) : json(nullptr)}};
    report["checks"] = checks;
    report["data"] = data;
    report["pass"] = pass;

    std::ostringstream out;
    if (o.text) {
        out << "crgeo " << o.command << " on " << model.name << " (seed " << o.seed << ", " << o.samples
            << " samples)\n";
        for (const auto& s : secs) {
            if (prefix) out << "[" << s.name << "]\n";
            for (const auto& e : s.checks.entries) {
                char line[512];
                std::snprintf(line, sizeof line, "  %-4s %-48s %11.3e  tol %8.1e  %s\n",
                              !e.applicable ? "n/a" : (e.pass ? "ok" : "FAIL"), e.name.c_str(), e.residual,
                              e.tolerance, e.anchor.c_str());
                out << line;
                if (!e.note.empty()) out << "       note: " << e.note << "\n";
            }
            out << s.text;
        }
        out << (pass ? "PASS" : "FAIL") << "\n";
    } else {
        out << report.dump(2) << "\n";
    }
    if (o.output.empty()) {
        std::cout << out.str();
    } else {
        std::ofstream f(o.output, std::ios::binary);
        if (!f) {
            std::cerr << "crgeo: cannot write " << o.output << "\n";
            return 2;
        }
        f << out.str();
    }
    std::cerr << "crgeo " << o.command << ": " << total << " checks, " << failed << " failed: "
              << (pass ? "PASS" : "FAIL") << "\n";
    for (const auto& s : secs)
        for (const auto& e : s.checks.entries)
            if (!e.pass) std::cerr << "  FAIL " << (prefix ? s.name + "/" : "") << e.name << " residual " << e.residual << "\n";
    return pass ? 0 : 1;
}
