#include "udw/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "udw/errors.hpp"

namespace udw {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double to_double(const std::string& key, const ConfigEntry& e) {
    const char* p = e.value.c_str();
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p || trim(end).size() != 0 || std::isnan(v))
        throw ConfigError("line " + std::to_string(e.line) + ": '" + key + "' expects a number, got '" + e.value + "'",
                          e.line, key);
    return v;
}

const std::set<std::string>& scenario_keys() {
    static const std::set<std::string> k{"OmegaT",    "lambda",    "alpha",     "beta",      "log10_beta",
                                         "theta",     "spacetime", "sigma_over_T", "L_over_T", "dt_over_T",
                                         "zA_over_T", "zB_over_T", "aT",        "u0_over_T", "regime"};
    return k;
}

}  // namespace

ConfigMap parse_config(std::istream& in) {
    ConfigMap m;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'", line);
        const std::string key = trim(s.substr(0, eq)), val = trim(s.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key", line);
        if (val.empty())
            throw ConfigError("line " + std::to_string(line) + ": '" + key + "' has no value", line, key);
        if (m.count(key))
            throw ConfigError("line " + std::to_string(line) + ": '" + key + "' given twice", line, key);
        m[key] = {val, line};
    }
    return m;
}

ConfigMap parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    return parse_config(f);
}

Scenario scenario_from_config(const ConfigMap& cfg) {
    for (const auto& [k, e] : cfg)
        if (!scenario_keys().count(k))
            throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + k + "'", e.line, k);
    auto has = [&](const char* k) { return cfg.count(k) > 0; };
    auto num = [&](const char* k) { return to_double(k, cfg.at(k)); };
    auto num_or = [&](const char* k, double d) { return has(k) ? num(k) : d; };
    auto line_of = [&](const char* k) { return has(k) ? cfg.at(k).line : 0; };

    for (const char* req : {"OmegaT", "lambda"})
        if (!has(req)) throw ConfigError(std::string("missing required field '") + req + "'", 0, req);
    const int namp = has("alpha") + has("beta") + has("log10_beta");
    if (namp == 0) throw ConfigError("missing required field 'beta' (or 'alpha' / 'log10_beta')", 0, "beta");
    if (namp > 1) throw ConfigError("give only one of 'alpha', 'beta', 'log10_beta'", 0, "beta");

    Scenario s;
    DetectorParams d;
    d.Omega = num("OmegaT");
    d.lambda = num("lambda");
    d.sigma = num_or("sigma_over_T", 0.0);
    if (!(d.lambda > 0.0)) throw ConfigError("'lambda' must be positive", line_of("lambda"), "lambda");
    if (!(d.sigma >= 0.0)) throw ConfigError("'sigma_over_T' must be non-negative", line_of("sigma_over_T"), "sigma_over_T");

    const double theta = num_or("theta", 0.0);
    auto amplitude = [&](const char* k, double v) {
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string("'") + k + "' must lie in [0, 1]", line_of(k), k);
        return v;
    };
    if (has("alpha"))
        s.initial = InitialState::from_alpha(amplitude("alpha", num("alpha")), theta);
    else if (has("beta"))
        s.initial = InitialState::from_beta(amplitude("beta", num("beta")), theta);
    else
        s.initial = InitialState::from_beta(amplitude("log10_beta", std::pow(10.0, num("log10_beta"))), theta);

    const std::string st = has("spacetime") ? cfg.at("spacetime").value : "minkowski";
    if (st != "minkowski" && st != "shockwave")
        throw ConfigError("'spacetime' must be minkowski or shockwave", line_of("spacetime"), "spacetime");
    if (st == "shockwave") {
        s.spacetime = Shockwave{num_or("aT", 1.0), num_or("u0_over_T", 0.0)};
    } else {
        for (const char* k : {"aT", "u0_over_T"})
            if (has(k)) throw ConfigError(std::string("'") + k + "' only applies to the shockwave", line_of(k), k);
    }

    const double zA = num_or("zA_over_T", 0.0);
    if (has("L_over_T") && has("zB_over_T"))
        throw ConfigError("give either 'L_over_T' or 'zB_over_T'", line_of("zB_over_T"), "zB_over_T");
    double zB;
    if (has("L_over_T")) {
        const double L = num("L_over_T");
        if (!(L >= 0.0)) throw ConfigError("'L_over_T' must be non-negative", line_of("L_over_T"), "L_over_T");
        zB = zA + L;
    } else if (has("zB_over_T")) {
        zB = num("zB_over_T");
    } else {
        throw ConfigError("missing required field 'L_over_T' (or 'zB_over_T')", 0, "L_over_T");
    }

    s.detector_a = d;
    s.detector_b = d;
    s.detector_a.position = {0.0, 0.0, zA};
    s.detector_b.position = {0.0, 0.0, zB};
    s.detector_b.tau0 = num_or("dt_over_T", 0.0);
    if (has("regime")) {
        try {
            s.regime = parse_regime(cfg.at("regime").value);
        } catch (const Error& e) {
            throw ConfigError(e.what(), line_of("regime"), "regime");
        }
    }
    return s;
}

double Axis::value(int i) const { return steps == 1 ? min : min + (max - min) * i / (steps - 1); }

void SweepSpec::validate() const {
    auto check = [&](const Axis& a) {
        bool known = false;
        for (const auto& n : axis_parameters()) known |= n == a.name;
        if (!known) throw ConfigError("unknown sweep axis '" + a.name + "'", 0, a.name);
        if (a.steps < 2) throw ConfigError("axis '" + a.name + "' needs at least 2 steps", 0, a.name);
        if (fixed.count(a.name)) throw ConfigError("'" + a.name + "' is both an axis and fixed", fixed.at(a.name).line, a.name);
        if (a.name == "log10_beta")
            for (const char* k : {"alpha", "beta"})
                if (fixed.count(k)) throw ConfigError(std::string("'") + k + "' conflicts with the log10_beta axis", fixed.at(k).line, k);
    };
    check(axis1);
    if (axis2) {
        check(*axis2);
        if (axis2->name == axis1.name) throw ConfigError("both axes sweep '" + axis1.name + "'", 0, axis1.name);
    }
}

SweepSpec sweep_from_config(const ConfigMap& cfg) {
    SweepSpec s;
    auto axis = [&](const char* key) {
        const ConfigEntry& e = cfg.at(key);
        std::istringstream ss(e.value);
        Axis a;
        std::string mn, mx, st;
        if (!(ss >> a.name >> mn >> mx >> st))
            throw ConfigError("line " + std::to_string(e.line) + ": '" + key + "' expects 'name min max steps'", e.line, key);
        a.min = to_double(key, {mn, e.line});
        a.max = to_double(key, {mx, e.line});
        const double steps = to_double(key, {st, e.line});
        if (steps != std::floor(steps)) throw ConfigError("axis steps must be an integer", e.line, key);
        a.steps = static_cast<int>(steps);
        return a;
    };
    if (!cfg.count("axis1")) throw ConfigError("missing required field 'axis1'", 0, "axis1");
    s.axis1 = axis("axis1");
    if (cfg.count("axis2")) s.axis2 = axis("axis2");
    for (const auto& [k, e] : cfg) {
        if (k == "axis1" || k == "axis2") continue;
        if (k == "output") {
            s.output_path = e.value;
            continue;
        }
        if (!scenario_keys().count(k)) throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + k + "'", e.line, k);
        if (k == "regime") s.regime = e.value;
        s.fixed[k] = e;
    }
    s.validate();
    return s;
}

std::string status_of(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return "config_error";
    if (dynamic_cast<const DivergenceError*>(&e)) return "divergence";
    if (dynamic_cast<const ConvergenceError*>(&e)) return "budget_exhausted";
    if (dynamic_cast<const OverflowError*>(&e)) return "overflow";
    if (dynamic_cast<const DegenerateSeparationError*>(&e)) return "degenerate_separation";
    if (dynamic_cast<const RegimeError*>(&e)) return "regime_error";
    if (dynamic_cast<const MismatchError*>(&e)) return "mismatch";
    if (dynamic_cast<const MissingElementError*>(&e)) return "missing_element";
    return "error";
}

namespace {

const char* kCsvHeader =
    "OmegaT,lambda,sigma_over_T,L_over_T,dt_over_T,zA_over_T,zB_over_T,spacetime,aT,u0_over_T,theta,log10_beta,"
    "regime,c_initial,c_final,delta,part_initial,part_neutral,part_harvesting,part_degradation,r22r33_sqrt,"
    "r23_margin,status\n";

std::string csv_row(const std::optional<Scenario>& s, const ConcurrenceReport* r, const std::string& status,
                    const std::string& regime) {
    const std::string nan = "nan";
    std::string row;
    auto add = [&](const std::string& v) {
        row += v;
        row += ',';
    };
    if (s) {
        const auto& A = s->detector_a;
        const auto& B = s->detector_b;
        const auto* sw = std::get_if<Shockwave>(&s->spacetime);
        add(fmt17(A.Omega));
        add(fmt17(A.lambda));
        add(fmt17(A.sigma));
        add(fmt17(std::fabs(B.position[2] - A.position[2])));
        add(fmt17(B.tau0 - A.tau0));
        add(fmt17(A.position[2]));
        add(fmt17(B.position[2]));
        add(sw ? "shockwave" : "minkowski");
        add(sw ? fmt17(sw->a) : nan);
        add(sw ? fmt17(sw->u0) : nan);
        add(fmt17(s->initial.theta()));
        add(fmt17(std::log10(s->initial.beta())));
    } else {
        for (int i = 0; i < 12; ++i) add(nan);
    }
    add(regime);
    if (r) {
        for (double v : {r->c_initial, r->c_final, r->delta, r->r14_sq_parts.initial, r->r14_sq_parts.neutral,
                         r->r14_sq_parts.harvesting, r->r14_sq_parts.degradation, r->r22r33_sqrt,
                         r->r23_condition_margin})
            add(fmt17(v));
    } else {
        for (int i = 0; i < 9; ++i) add(nan);
    }
    row += status;
    row += '\n';
    return row;
}

}  // namespace

void run_sweep(const SweepSpec& spec, std::ostream& csv, const SweepOptions& opt) {
    spec.validate();
    const int n1 = spec.axis1.steps, n2 = spec.axis2 ? spec.axis2->steps : 1;
    const size_t total = static_cast<size_t>(n1) * n2;
    std::vector<std::string> rows(total);
    ElementCache cache;
    std::atomic<size_t> next{0};

    auto work = [&] {
        for (size_t idx = next++; idx < total; idx = next++) {
            const int i1 = static_cast<int>(idx % n1), i2 = static_cast<int>(idx / n1);
            ConfigMap m = spec.fixed;
            m[spec.axis1.name] = {fmt17(spec.axis1.value(i1)), 0};
            if (spec.axis2) m[spec.axis2->name] = {fmt17(spec.axis2->value(i2)), 0};
            std::optional<Scenario> sc;
            try {
                sc = scenario_from_config(m);
                const ConcurrenceReport r = evaluate(*sc, opt.elements, &cache);
                rows[idx] = csv_row(sc, &r, r.warnings.empty() ? "ok" : "ok_regime_warning", regime_name(r.regime));
            } catch (const std::exception& e) {
                rows[idx] = csv_row(sc, nullptr, status_of(e), spec.regime);
            }
        }
    };
    const int nw = std::max(1, std::min<int>(opt.workers, static_cast<int>(total)));
    std::vector<std::thread> pool;
    for (int w = 1; w < nw; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    csv << kCsvHeader;
    for (const auto& r : rows) csv << r;
}

// ---------------------------------------------------------------------------

std::vector<std::string> preset_names() { return {"fig1b", "fig2a", "fig2bc", "fig3", "fig5ai", "fig5aii", "fig5b"}; }

SweepSpec preset(const std::string& name) {
    auto fixed = [](std::initializer_list<std::pair<const char*, std::string>> kv) {
        ConfigMap m;
        for (const auto& [k, v] : kv) m[k] = {v, 0};
        return m;
    };
    const std::string pi = fmt17(3.14159265358979323846);
    SweepSpec s;
    s.output_path = name + ".csv";
    if (name == "fig1b") {
        s.fixed = fixed({{"OmegaT", "5"}, {"lambda", "0.1"}, {"log10_beta", "-15"}, {"sigma_over_T", "0"},
                         {"theta", "0"}, {"regime", "weak_beta0"}});
        s.axis1 = {"dt_over_T", -10.0, 10.0, 201};
        s.axis2 = Axis{"L_over_T", 0.05, 10.0, 201};
    } else if (name == "fig2a") {
        s.fixed = fixed({{"lambda", "0.1"}, {"L_over_T", "7"}, {"dt_over_T", "0"}, {"sigma_over_T", "0"},
                         {"theta", "0"}, {"regime", "weak_beta0"}});
        s.axis1 = {"OmegaT", 0.0, 15.0, 201};
        s.axis2 = Axis{"log10_beta", -40.0, 0.0, 201};
    } else if (name == "fig2bc") {
        s.fixed = fixed({{"OmegaT", "7"}, {"lambda", "0.1"}, {"L_over_T", "7"}, {"dt_over_T", "0"},
                         {"sigma_over_T", "0"}, {"regime", "weak_beta0"}});
        s.axis1 = {"log10_beta", -40.0, 0.0, 401};
        s.axis2 = Axis{"theta", 0.0, std::stod(pi), 2};
    } else if (name == "fig3") {
        s.fixed = fixed({{"lambda", "0.1"}, {"log10_beta", "-15"}, {"dt_over_T", "0"}, {"sigma_over_T", "0"},
                         {"theta", "0"}, {"regime", "weak_beta0"}});
        s.axis1 = {"L_over_T", 0.05, 10.0, 201};
        s.axis2 = Axis{"OmegaT", 0.0, 15.0, 201};
    } else if (name == "fig5ai") {
        s.fixed = fixed({{"spacetime", "shockwave"}, {"aT", "1"}, {"zB_over_T", "7"}, {"OmegaT", "2"},
                         {"lambda", "0.1"}, {"log10_beta", "-5"}, {"theta", "0"}, {"regime", "weak_beta0"}});
        s.axis1 = {"zA_over_T", -4.0, 8.0, 401};
    } else if (name == "fig5aii") {
        s.fixed = fixed({{"spacetime", "shockwave"}, {"aT", "1"}, {"zA_over_T", "-0.5"}, {"zB_over_T", "7"},
                         {"OmegaT", "2"}, {"lambda", "0.1"}, {"theta", "0"}, {"regime", "weak_beta0"}});
        s.axis1 = {"log10_beta", -10.0, 0.0, 401};
    } else if (name == "fig5b") {
        s.fixed = fixed({{"spacetime", "shockwave"}, {"zB_over_T", "7"}, {"OmegaT", "2"}, {"lambda", "0.1"},
                         {"beta", fmt17(std::sqrt(0.5))}, {"theta", "0"}, {"regime", "sufficient"}});
        s.axis1 = {"zA_over_T", -4.0, 8.0, 401};
        s.axis2 = Axis{"aT", 0.0, 1.0, 2};
    } else {
        throw ConfigError("unknown preset '" + name + "'", 0, "preset");
    }
    s.regime = s.fixed.at("regime").value;
    s.validate();
    return s;
}

// ---------------------------------------------------------------------------

namespace {

struct NamedElement {
    const char* name;
    std::optional<cplx> value;
};

std::vector<NamedElement> named(const MatrixElements& me) {
    std::vector<NamedElement> v{{"I_AA_mp", me.I_AA_mp}, {"I_BB_mp", me.I_BB_mp}, {"I_AA_pm", me.I_AA_pm},
                                {"I_BB_pm", me.I_BB_pm}, {"I_AB_pp", me.I_AB_pp}, {"I_AB_mm", me.I_AB_mm},
                                {"I_AB_mp", me.I_AB_mp}, {"I_BA_pm", me.I_BA_pm}, {"I_AA_mm", me.I_AA_mm},
                                {"I_BB_pp", me.I_BB_pp}, {"X_AB_pos", me.X_AB_pos}, {"X_AB_neg_conj", me.X_AB_neg_conj}};
    return v;
}

}  // namespace

void write_report_text(std::ostream& os, const Scenario& s, const ConcurrenceReport& r) {
    const Geometry g = derived_geometry(s);
    auto kv = [&](const std::string& k, const std::string& v) { os << k << " = " << v << "\n"; };
    kv("spacetime", s.is_shockwave() ? "shockwave" : "minkowski");
    if (const auto* sw = std::get_if<Shockwave>(&s.spacetime)) {
        kv("aT", fmt17(sw->a));
        kv("u0_over_T", fmt17(sw->u0));
    }
    kv("OmegaT", fmt17(s.detector_a.Omega));
    kv("lambda", fmt17(s.detector_a.lambda));
    kv("sigma_over_T", fmt17(s.detector_a.sigma));
    kv("zA_over_T", fmt17(s.detector_a.position[2]));
    kv("zB_over_T", fmt17(s.detector_b.position[2]));
    kv("alpha", fmt17(s.initial.alpha()));
    kv("beta", fmt17(s.initial.beta()));
    kv("theta", fmt17(s.initial.theta()));
    kv("L_over_T", fmt17(g.L));
    kv("dt_over_T", fmt17(g.dt));
    kv("gamma_plus", fmt17(g.gamma_plus));
    kv("gamma_minus", fmt17(g.gamma_minus));
    kv("regime", regime_name(r.regime));
    for (const auto& e : named(r.elements)) {
        if (!e.value) continue;
        kv(std::string(e.name) + ".re", fmt17(e.value->real()));
        kv(std::string(e.name) + ".im", fmt17(e.value->imag()));
        if (auto it = r.elements.abs_error.find(e.name); it != r.elements.abs_error.end())
            kv(std::string(e.name) + ".abs_error", fmt17(it->second));
    }
    for (const auto& [n, y] : {std::pair{"Y_A", r.elements.Y_A}, std::pair{"Y_B", r.elements.Y_B}}) {
        if (!y) continue;
        kv(std::string(n) + ".re", fmt17(y->re));
        kv(std::string(n) + ".im", y->im ? fmt17(*y->im) : "divergent");
    }
    kv("r11", fmt17(r.dm.r11));
    kv("r22", fmt17(r.dm.r22));
    kv("r33", fmt17(r.dm.r33));
    kv("r44", fmt17(r.dm.r44));
    kv("r23.re", fmt17(r.dm.r23.real()));
    kv("r23.im", fmt17(r.dm.r23.imag()));
    kv("part_initial", fmt17(r.r14_sq_parts.initial));
    kv("part_neutral", fmt17(r.r14_sq_parts.neutral));
    kv("part_harvesting", fmt17(r.r14_sq_parts.harvesting));
    kv("part_degradation", fmt17(r.r14_sq_parts.degradation));
    kv("r14_abs", fmt17(r.r14_abs));
    kv("r22r33_sqrt", fmt17(r.r22r33_sqrt));
    kv("r23_margin", fmt17(r.r23_condition_margin));
    kv("c_initial", fmt17(r.c_initial));
    kv("c_final", fmt17(r.c_final));
    kv("delta", fmt17(r.delta));
    for (const auto& w : r.warnings) kv("warning", w);
}

void write_report_json(std::ostream& os, const Scenario& s, const ConcurrenceReport& r) {
    using nlohmann::json;
    const Geometry g = derived_geometry(s);
    json j;
    j["spacetime"] = s.is_shockwave() ? "shockwave" : "minkowski";
    if (const auto* sw = std::get_if<Shockwave>(&s.spacetime)) j["shockwave"] = {{"aT", sw->a}, {"u0_over_T", sw->u0}};
    j["detector"] = {{"OmegaT", s.detector_a.Omega}, {"lambda", s.detector_a.lambda}, {"sigma_over_T", s.detector_a.sigma}};
    j["initial"] = {{"alpha", s.initial.alpha()}, {"beta", s.initial.beta()}, {"theta", s.initial.theta()}};
    j["geometry"] = {{"zA_over_T", s.detector_a.position[2]}, {"zB_over_T", s.detector_b.position[2]},
                     {"L_over_T", g.L}, {"dt_over_T", g.dt}, {"gamma_plus", g.gamma_plus}, {"gamma_minus", g.gamma_minus}};
    json el = json::object();
    for (const auto& e : named(r.elements)) {
        if (!e.value) continue;
        json x = {{"re", e.value->real()}, {"im", e.value->imag()}};
        if (auto it = r.elements.abs_error.find(e.name); it != r.elements.abs_error.end()) x["abs_error"] = it->second;
        el[e.name] = x;
    }
    for (const auto& [n, y] : {std::pair{"Y_A", r.elements.Y_A}, std::pair{"Y_B", r.elements.Y_B}}) {
        if (!y) continue;
        el[n] = {{"re", y->re}, {"im", y->im ? json(*y->im) : json(nullptr)}};
    }
    j["elements"] = el;
    j["density_matrix"] = {{"r11", r.dm.r11}, {"r22", r.dm.r22}, {"r33", r.dm.r33}, {"r44", r.dm.r44},
                           {"r23", {r.dm.r23.real(), r.dm.r23.imag()}}};
    j["report"] = {{"regime", regime_name(r.regime)},
                   {"c_initial", r.c_initial},
                   {"c_final", r.c_final},
                   {"delta", r.delta},
                   {"r14_sq_parts",
                    {{"initial", r.r14_sq_parts.initial},
                     {"neutral", r.r14_sq_parts.neutral},
                     {"harvesting", r.r14_sq_parts.harvesting},
                     {"degradation", r.r14_sq_parts.degradation}}},
                   {"r14_abs", r.r14_abs},
                   {"r22r33_sqrt", r.r22r33_sqrt},
                   {"r23_condition_margin", r.r23_condition_margin},
                   {"warnings", r.warnings}};
    os << j.dump(2) << "\n";
}

}  // namespace udw
