#include "skewsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "skewsim/errors.hpp"

namespace skewsim {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    throw ValidationError("config: " + path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return item.key() == k; });
        if (!known) bad(path + "." + item.key(), "unknown key");
    }
}

double num(const json& j, const std::string& path) {
    if (!j.is_number()) bad(path, "expected a number");
    return j.get<double>();
}

double num_or(const json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    return num(obj.at(key), path + "." + key);
}

long int_or(const json& obj, const std::string& path, const char* key, long fallback) {
    if (!obj.contains(key)) return fallback;
    const json& j = obj.at(key);
    if (!j.is_number_integer()) bad(path + "." + key, "expected an integer");
    return j.get<long>();
}

bool bool_or(const json& obj, const std::string& path, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& j = obj.at(key);
    if (!j.is_boolean()) bad(path + "." + key, "expected true or false");
    return j.get<bool>();
}

std::string str_or(const json& obj, const std::string& path, const char* key,
                   const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& j = obj.at(key);
    if (!j.is_string()) bad(path + "." + key, "expected a string");
    return j.get<std::string>();
}

Vec vec_of(const json& j, const std::string& path) {
    if (!j.is_array()) bad(path, "expected an array of numbers");
    Vec v;
    v.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(num(j[i], path));
    return v;
}

std::pair<double, double> band_of(const json& j, const std::string& path) {
    const Vec v = vec_of(j, path);
    if (v.size() != 2) bad(path, "expected [lo, hi]");
    return {v[0], v[1]};
}

std::vector<std::pair<double, double>> pairs_of(const json& j, const std::string& path) {
    if (!j.is_array()) bad(path, "expected an array of [radius, weight] pairs");
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(band_of(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::function<double(long)> weight_law(const json& obj, const std::string& path) {
    check_keys(obj, path, {"law", "value", "base", "amp", "ratio"});
    const std::string law = str_or(obj, path, "law", "");
    if (law == "constant") {
        const double v = num_or(obj, path, "value", 1.0);
        return [v](long) { return v; };
    }
    if (law == "geometric_bump") {
        const double base = num_or(obj, path, "base", 1.0);
        const double amp = num_or(obj, path, "amp", 1.0);
        const double ratio = num_or(obj, path, "ratio", 0.5);
        if (!(ratio > 0.0) || !(ratio < 1.0)) bad(path + ".ratio", "need 0 < ratio < 1");
        return [base, amp, ratio](long k) { return base + amp * std::pow(ratio, double(k)); };
    }
    if (law == "harmonic") {
        const double base = num_or(obj, path, "base", 0.0);
        const double amp = num_or(obj, path, "amp", 1.0);
        return [base, amp](long k) { return base + amp / double(k + 1); };
    }
    bad(path + ".law", "unknown weight law '" + law + "'");
}

FamilySide family_of(const json& obj, const std::string& path, double m0, bool inner_side) {
    check_keys(obj, path, {"radii", "k_lo", "k_hi", "ratio", "spacing", "weights"});
    FamilySide side;
    side.k_lo = int_or(obj, path, "k_lo", 0);
    side.k_hi = int_or(obj, path, "k_hi", 60);
    const std::string radii = str_or(obj, path, "radii", "dyadic");
    if (inner_side) {
        double ratio = num_or(obj, path, "ratio", 0.5);
        if (radii == "dyadic") ratio = 0.5;
        else if (radii != "geometric") bad(path + ".radii", "inner families: dyadic or geometric");
        if (!(ratio > 0.0) || !(ratio < 1.0)) bad(path + ".ratio", "need 0 < ratio < 1");
        side.radius = [m0, ratio](long k) { return m0 * (1.0 - std::pow(ratio, double(k + 1))); };
    } else {
        if (radii == "dyadic") {
            side.radius = [m0](long k) { return m0 * (1.0 + std::pow(2.0, double(k))); };
        } else if (radii == "arithmetic") {
            const double spacing = num_or(obj, path, "spacing", 1.0);
            if (!(spacing > 0.0)) bad(path + ".spacing", "need spacing > 0");
            side.radius = [m0, spacing](long k) { return m0 + double(k + 1) * spacing * m0; };
        } else {
            bad(path + ".radii", "outer families: dyadic or arithmetic");
        }
    }
    if (!obj.contains("weights")) bad(path, "family needs a weights block");
    side.weight = weight_law(obj.at("weights"), path + ".weights");
    return side;
}

DensityModel density_of(const json& obj, const std::string& path, int dim) {
    check_keys(obj, path, {"kind", "value", "a", "b", "exponent"});
    const std::string kind = str_or(obj, path, "kind", "constant");
    if (kind == "constant") return DensityModel::constant(dim, num_or(obj, path, "value", 1.0));
    if (kind == "gaussian") return DensityModel::gaussian(dim, num_or(obj, path, "a", 1.0));
    if (kind == "inverse_power")
        return DensityModel::inverse_power(dim, num_or(obj, path, "b", 2.0));
    if (kind == "pure_power")
        return DensityModel::pure_power(dim, num_or(obj, path, "exponent", 0.0));
    bad(path + ".kind", "unknown density kind '" + kind + "'");
}

MembraneSpec membranes_of(const json& obj, const std::string& path) {
    check_keys(obj, path,
               {"m0", "gamma_top", "gammabar_bottom", "inner", "outer", "inner_family",
                "outer_family", "truncation_tolerance"});
    MembraneSpec spec;
    spec.m0 = num_or(obj, path, "m0", 1.0);
    spec.gamma_top = num_or(obj, path, "gamma_top", 1.0);
    spec.gammabar_bottom = num_or(obj, path, "gammabar_bottom", 1.0);
    if (obj.contains("inner")) spec.inner = pairs_of(obj.at("inner"), path + ".inner");
    if (obj.contains("outer")) spec.outer = pairs_of(obj.at("outer"), path + ".outer");
    if (obj.contains("inner_family"))
        spec.inner_family = family_of(obj.at("inner_family"), path + ".inner_family", spec.m0, true);
    if (obj.contains("outer_family"))
        spec.outer_family =
            family_of(obj.at("outer_family"), path + ".outer_family", spec.m0, false);
    spec.truncation_tolerance = num_or(obj, path, "truncation_tolerance", 0.0);
    return spec;
}

SimConfig sim_of(const json& obj, const std::string& path, int dim) {
    check_keys(obj, path,
               {"horizon", "step", "n_paths", "seed", "shell_eps", "x0", "scheme",
                "store_stride", "track_local_time", "record_increments", "occupation_bands",
                "nonpositive", "n_threads", "mode"});
    SimConfig cfg;
    cfg.dim = dim;
    cfg.horizon = num_or(obj, path, "horizon", cfg.horizon);
    cfg.step = num_or(obj, path, "step", cfg.step);
    cfg.n_paths = std::size_t(int_or(obj, path, "n_paths", long(cfg.n_paths)));
    cfg.seed = std::uint64_t(int_or(obj, path, "seed", long(cfg.seed)));
    cfg.shell_eps = num_or(obj, path, "shell_eps", cfg.shell_eps);
    if (obj.contains("x0")) {
        const json& x0 = obj.at("x0");
        if (x0.is_number())
            cfg.x0 = {x0.get<double>()};
        else
            cfg.x0 = vec_of(x0, path + ".x0");
    }
    cfg.scheme = str_or(obj, path, "scheme", cfg.scheme);
    cfg.store_stride = std::size_t(int_or(obj, path, "store_stride", long(cfg.store_stride)));
    cfg.track_local_time = bool_or(obj, path, "track_local_time", cfg.track_local_time);
    cfg.record_increments = bool_or(obj, path, "record_increments", cfg.record_increments);
    if (obj.contains("occupation_bands")) {
        const json& bands = obj.at("occupation_bands");
        if (!bands.is_array()) bad(path + ".occupation_bands", "expected an array of [lo, hi]");
        for (std::size_t i = 0; i < bands.size(); ++i)
            cfg.occupation_bands.push_back(
                band_of(bands[i], path + ".occupation_bands[" + std::to_string(i) + "]"));
    }
    const std::string pol = str_or(obj, path, "nonpositive", "error");
    if (pol == "error")
        cfg.nonpositive = NonpositivePolicy::Error;
    else if (pol == "absorb")
        cfg.nonpositive = NonpositivePolicy::Absorb;
    else
        bad(path + ".nonpositive", "expected 'error' or 'absorb'");
    cfg.n_threads = int(int_or(obj, path, "n_threads", cfg.n_threads));
    cfg.mode = str_or(obj, path, "mode", cfg.mode);
    if (cfg.mode != "full" && cfg.mode != "radial")
        bad(path + ".mode", "expected 'full' or 'radial'");
    return cfg;
}

TestSelection tests_of(const json& obj, const std::string& path) {
    check_keys(obj, path, {"crossing", "radial_consistency", "reversibility", "occupation"});
    TestSelection t;
    if (obj.contains("crossing")) {
        const json& c = obj.at("crossing");
        const std::string p = path + ".crossing";
        check_keys(c, p, {"membrane", "eps", "eps_outer"});
        t.has_crossing = true;
        if (!c.contains("membrane")) bad(p, "needs the membrane radius");
        t.crossing_membrane = num(c.at("membrane"), p + ".membrane");
        t.crossing_eps = num_or(c, p, "eps", t.crossing_eps);
        t.crossing_eps_outer = num_or(c, p, "eps_outer", 0.0);
    }
    if (obj.contains("radial_consistency")) {
        const json& c = obj.at("radial_consistency");
        const std::string p = path + ".radial_consistency";
        check_keys(c, p, {"bessel"});
        t.has_radial_consistency = true;
        t.radial_bessel = bool_or(c, p, "bessel", true);
    }
    if (obj.contains("reversibility")) {
        const json& c = obj.at("reversibility");
        const std::string p = path + ".reversibility";
        check_keys(c, p, {"x", "y", "bandwidth"});
        t.has_reversibility = true;
        if (!c.contains("x") || !c.contains("y")) bad(p, "needs evaluation points x and y");
        t.rev_x = vec_of(c.at("x"), p + ".x");
        t.rev_y = vec_of(c.at("y"), p + ".y");
        t.rev_bandwidth = num_or(c, p, "bandwidth", 0.0);
    }
    if (obj.contains("occupation")) {
        const json& c = obj.at("occupation");
        const std::string p = path + ".occupation";
        check_keys(c, p, {"band_a", "band_b"});
        t.has_occupation = true;
        if (!c.contains("band_a") || !c.contains("band_b")) bad(p, "needs band_a and band_b");
        t.occ_a = band_of(c.at("band_a"), p + ".band_a");
        t.occ_b = band_of(c.at("band_b"), p + ".band_b");
    }
    return t;
}

AnalysisSetup analysis_of(const json& obj, const std::string& path) {
    check_keys(obj, path, {"r_grid", "trace_radius", "bump_radius", "balls"});
    AnalysisSetup a;
    if (obj.contains("r_grid")) a.r_grid = vec_of(obj.at("r_grid"), path + ".r_grid");
    a.trace_radius = num_or(obj, path, "trace_radius", 0.0);
    a.bump_radius = num_or(obj, path, "bump_radius", 0.0);
    if (obj.contains("balls")) {
        const json& balls = obj.at("balls");
        if (!balls.is_array()) bad(path + ".balls", "expected an array");
        for (std::size_t i = 0; i < balls.size(); ++i) {
            const std::string p = path + ".balls[" + std::to_string(i) + "]";
            if (!balls[i].is_object()) bad(p, "expected an object");
            check_keys(balls[i], p, {"center", "radius"});
            Ball b;
            if (balls[i].contains("center")) b.center = vec_of(balls[i].at("center"), p + ".center");
            b.radius = num_or(balls[i], p, "radius", 1.0);
            a.balls.push_back(std::move(b));
        }
    }
    return a;
}

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

} // namespace

RunSetup parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("config parse error at line " +
                              std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
    }
    if (!root.is_object()) throw ValidationError("config: top level must be an object");
    check_keys(root, "config", {"dim", "density", "membranes", "simulation", "tests", "analysis"});

    const int dim = int(int_or(root, "config", "dim", 3));
    if (dim < 1) throw ValidationError("config.dim: must be >= 1");

    DensityModel density = root.contains("density")
                               ? density_of(root.at("density"), "config.density", dim)
                               : DensityModel::constant(dim, 1.0);
    MembraneSpec spec = root.contains("membranes")
                            ? membranes_of(root.at("membranes"), "config.membranes")
                            : MembraneSpec{};
    MembraneSet membranes = build_membranes(spec); // the weights-module validation gate

    SimConfig sim = root.contains("simulation")
                        ? sim_of(root.at("simulation"), "config.simulation", dim)
                        : SimConfig{};
    sim.dim = dim;
    if (sim.x0.empty()) sim.x0 = {0.5 * (membranes.m0 > 0 ? membranes.m0 : 1.0)};

    TestSelection tests =
        root.contains("tests") ? tests_of(root.at("tests"), "config.tests") : TestSelection{};
    AnalysisSetup analysis = root.contains("analysis")
                                 ? analysis_of(root.at("analysis"), "config.analysis")
                                 : AnalysisSetup{};

    return RunSetup{dim,
                    spec,
                    WeightField{std::move(membranes), std::move(density)},
                    sim,
                    tests,
                    analysis,
                    root.dump()};
}

RunSetup load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace skewsim
