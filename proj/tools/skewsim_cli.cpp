// Batch front end. Parses a JSON config, dispatches one subcommand, writes
// artifacts plus a run manifest into the output directory.
//
//   skewsim simulate --config cfg.json [--format csv|json|bin]
//   skewsim verify   --config cfg.json [--test <name>] [--membrane R] [--eps E]
//   skewsim analyze  --config cfg.json
//   skewsim coeffs   --config cfg.json
//   skewsim validate --config cfg.json
//
// Shared flags: --seed --paths --step --horizon --out-dir (env fallback
// SKEWSIM_OUT_DIR). Exit codes: 0 pass, 1 usage, 2 validation or hypothesis
// or evaluation failure, 3 test failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "skewsim/analysis.hpp"
#include "skewsim/config.hpp"
#include "skewsim/errors.hpp"
#include "skewsim/io.hpp"
#include "skewsim/membranes.hpp"
#include "skewsim/radial_model.hpp"
#include "skewsim/simulate.hpp"
#include "skewsim/skew_table.hpp"
#include "skewsim/test_functions.hpp"
#include "skewsim/verify.hpp"

namespace {

using namespace skewsim;
using nlohmann::json;

struct Options {
    std::string config_path;
    std::string out_dir;
    std::string format = "csv";
    std::string test;
    double membrane = 0.0;
    double eps = 0.05;
    std::uint64_t seed = 0;
    std::uint64_t paths = 0;
    double step = 0.0;
    double horizon = 0.0;
};

RunSetup load_setup(const Options& opt, const CLI::App& sub) {
    RunSetup setup = load_config_file(opt.config_path);
    if (sub.count("--seed")) setup.sim.seed = opt.seed;
    if (sub.count("--paths")) setup.sim.n_paths = std::size_t(opt.paths);
    if (sub.count("--step")) setup.sim.step = opt.step;
    if (sub.count("--horizon")) setup.sim.horizon = opt.horizon;
    return setup;
}

// Collects output files and finishes with the manifest. The canonical config
// echo is itself an artifact so a run is reproducible from its directory
// alone.
class ArtifactSink {
public:
    ArtifactSink(std::string subcommand, const RunSetup& setup, const std::string& cli_out_dir)
        : dir_(resolve_out_dir(cli_out_dir)), t0_(std::chrono::steady_clock::now()) {
        std::filesystem::create_directories(dir_);
        manifest_.subcommand = std::move(subcommand);
        manifest_.seed = setup.sim.seed;
        char hex[24];
        std::snprintf(hex, sizeof hex, "%016llx",
                      (unsigned long long)fnv1a64(setup.canonical_text));
        manifest_.config_hash = hex;
        write_text("config.canonical.json", setup.canonical_text + "\n");
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void write_text(const std::string& name, const std::string& text) {
        std::ofstream os(dir_ / name, std::ios::binary);
        if (!os) throw EvaluationError("cannot open " + path(name) + " for writing");
        os << text;
        manifest_.outputs.push_back(name);
    }

    template <class Fn>
    void write_stream(const std::string& name, Fn&& fn) {
        std::ofstream os(dir_ / name, std::ios::binary);
        if (!os) throw EvaluationError("cannot open " + path(name) + " for writing");
        fn(os);
        manifest_.outputs.push_back(name);
    }

    void finish() {
        manifest_.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
        std::ofstream os(dir_ / "manifest.json", std::ios::binary);
        os << to_json(manifest_);
    }

private:
    std::filesystem::path dir_;
    RunManifest manifest_;
    std::chrono::steady_clock::time_point t0_;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

int run_simulate(const Options& opt, const CLI::App& sub) {
    RunSetup setup = load_setup(opt, sub);
    ArtifactSink sink("simulate", setup, opt.out_dir);

    PathEnsemble ens = setup.sim.mode == "radial"
                           ? simulate_radial(make_radial_model(setup.field, 0.0, kInf), setup.sim)
                           : simulate_full(setup.field, setup.sim);

    std::string traj;
    if (opt.format == "bin") {
        traj = "trajectories.sksm";
        sink.write_stream(traj, [&](std::ostream& os) { write_trajectory_binary(ens, os); });
    } else if (opt.format == "json") {
        traj = "trajectories.json";
        sink.write_stream(traj, [&](std::ostream& os) { write_trajectory_json(ens, os); });
    } else {
        traj = "trajectories.csv";
        sink.write_stream(traj, [&](std::ostream& os) { write_trajectory_csv(ens, os); });
    }
    if (!ens.tracked_radii.empty())
        sink.write_stream("local_times.csv",
                          [&](std::ostream& os) { write_local_time_csv(ens, os); });
    sink.finish();

    std::cout << "simulate: " << ens.n_paths << " paths, " << ens.n_stored()
              << " stored states, dim " << ens.dim << " -> " << sink.path(traj) << "\n";
    return 0;
}

int run_verify(const Options& opt, const CLI::App& sub) {
    RunSetup setup = load_setup(opt, sub);
    const bool filtered = sub.count("--test") > 0;
    const bool flag_membrane = sub.count("--membrane") > 0;

    auto selected = [&](std::initializer_list<const char*> names) {
        if (!filtered) return true;
        for (const char* n : names)
            if (opt.test == n) return true;
        return false;
    };

    ArtifactSink sink("verify", setup, opt.out_dir);
    std::vector<TestReport> reports;

    if (selected({"crossing"})) {
        if (flag_membrane || setup.tests.has_crossing) {
            const double a_k = flag_membrane ? opt.membrane : setup.tests.crossing_membrane;
            double eps_in = setup.tests.crossing_eps;
            double eps_out = setup.tests.crossing_eps_outer;
            if (sub.count("--eps")) {
                eps_in = opt.eps;
                eps_out = 0.0;
            }
            if (eps_out <= 0.0) eps_out = eps_in;
            const RadialModel rm = make_radial_model(setup.field, 0.0, kInf);
            reports.push_back(crossing_probability_test(rm, a_k, eps_in, eps_out, setup.sim));
        } else if (filtered) {
            throw UsageError("crossing test needs --membrane or a tests.crossing block");
        }
    }
    if (selected({"radial", "radial_consistency"}) &&
        (setup.tests.has_radial_consistency || filtered))
        reports.push_back(
            radial_consistency_test(setup.field, setup.sim, setup.tests.radial_bessel));
    if (selected({"reversibility"})) {
        if (setup.tests.has_reversibility)
            reports.push_back(reversibility_test(setup.field, setup.sim, setup.tests.rev_x,
                                                 setup.tests.rev_y, setup.tests.rev_bandwidth));
        else if (filtered)
            throw UsageError("reversibility test needs a tests.reversibility block (x and y)");
    }
    if (selected({"occupation"}) && (setup.tests.has_occupation || filtered))
        reports.push_back(
            occupation_ratio_test(setup.field, setup.sim, setup.tests.occ_a, setup.tests.occ_b));

    if (reports.empty())
        throw UsageError("config declares no tests; pass --test <name> or add a tests section");

    std::string lines;
    for (const auto& r : reports) lines += to_json_line(r) + "\n";
    sink.write_text("reports.jsonl", lines);
    sink.finish();

    if (opt.format == "json")
        std::cout << lines;
    else
        write_report_table(reports, std::cout);

    for (const auto& r : reports)
        if (!r.pass) return 3;
    return 0;
}

int run_analyze(const Options& opt, const CLI::App& sub) {
    RunSetup setup = load_setup(opt, sub);
    ArtifactSink sink("analyze", setup, opt.out_dir);
    const QuadratureConfig qc{};
    const int dim = setup.dim;
    const double m0 = setup.field.membranes.m0;

    std::vector<double> grid = setup.analysis.r_grid;
    if (grid.empty())
        for (int k = 0; k <= 24; ++k) grid.push_back(std::pow(10.0, double(k) / 12.0));
    const GrowthReport growth = growth_criteria(setup.field, grid, qc);

    std::vector<Ball> balls = setup.analysis.balls;
    if (balls.empty())
        for (const double f : {0.5, 1.0, 2.0, 4.0}) balls.push_back({Vec(dim, 0.0), f * m0});
    const A2Report a2 = a2_estimate(setup.field, balls, qc);

    const double bump_r = setup.analysis.bump_radius > 0 ? setup.analysis.bump_radius : 1.5 * m0;
    const SmoothField f = bump_field(dim, bump_r);
    const SmoothField g = plateau_field(dim, 0.5 * bump_r, 0.9 * bump_r);
    const IbpReport ibp = ibp_residual(f, g, setup.field, qc);

    const double l = setup.analysis.trace_radius;
    const bool has_trace = l > 0;
    TraceReport trace;
    if (has_trace) trace = trace_inequality_check(bump_field(dim, 2.0 * l), l, setup.field, qc);

    json j;
    j["growth"] = json::parse(to_json(growth));
    j["a2"] = json::parse(to_json(a2));
    j["ibp"] = json::parse(to_json(ibp));
    if (has_trace) j["trace"] = json::parse(to_json(trace));
    sink.write_text("analysis.json", j.dump(2) + "\n");
    sink.finish();

    char line[256];
    std::snprintf(line, sizeof line, "growth: alpha_tail %.4g (full %.4g), %s, %s\n",
                  growth.alpha_tail, growth.alpha_full,
                  growth.conservative ? "conservative" : "not conservative",
                  growth.recurrent ? "recurrent" : "transient");
    std::cout << line;
    std::snprintf(line, sizeof line, "a2: sup ratio %.4g at ball %zu (%s)\n", a2.sup_ratio,
                  a2.worst_ball, a2.converged ? "converged" : "growing under refinement");
    std::cout << line;
    std::snprintf(line, sizeof line, "ibp: residual %.3e (rel %.3e), error budget %.3e\n",
                  ibp.residual_abs, ibp.residual_rel, ibp.error_budget);
    std::cout << line;
    if (has_trace) {
        std::snprintf(line, sizeof line, "trace at l=%g: lhs %.6g rhs %.6g %s\n", l, trace.lhs,
                      trace.rhs, trace.pass ? "PASS" : "FAIL");
        std::cout << line;
    }
    return has_trace && !trace.pass ? 3 : 0;
}

int run_coeffs(const Options& opt, const CLI::App& sub) {
    RunSetup setup = load_setup(opt, sub);
    ArtifactSink sink("coeffs", setup, opt.out_dir);
    const SkewTable table = skew_coefficients(setup.field.membranes);
    std::ostringstream ss;
    write_csv(table, ss);
    sink.write_text("skew_coefficients.csv", ss.str());
    sink.finish();
    std::cout << ss.str();
    return 0;
}

int run_validate(const Options& opt, const CLI::App& sub) {
    RunSetup setup = load_setup(opt, sub);
    ArtifactSink sink("validate", setup, opt.out_dir);
    const MembraneSet& ms = setup.field.membranes;
    const double m0 = ms.m0;
    const QuadratureConfig qc{};
    json j;
    bool ok = true;

    const H1Report h1 = check_h1(ms, {0.5 * m0, m0, 2.0 * m0, 8.0 * m0});
    json jh;
    jh["increment_sum_inner"] = h1.increment_sum_inner;
    jh["increment_sum_outer"] = h1.increment_sum_outer;
    jh["truncated_tail"] = h1.truncated_tail;
    jh["probe_radii"] = h1.probe_radii;
    jh["delta"] = h1.delta;
    jh["pass"] = h1.pass;
    if (!h1.note.empty()) jh["note"] = h1.note;
    j["h1"] = jh;
    ok = ok && h1.pass;

    // Density positivity on a deterministic probe grid: along each axis, both
    // signs, radii spanning six decades. rho throws on a nonpositive value.
    json jd;
    jd["positive"] = true;
    try {
        for (int axis = 0; axis < setup.dim; ++axis)
            for (int sign = -1; sign <= 1; sign += 2)
                for (int k = 0; k <= 24; ++k) {
                    Vec x(setup.dim, 0.0);
                    x[std::size_t(axis)] = sign * std::pow(10.0, -3.0 + double(k) / 4.0);
                    (void)setup.field.psi(x);
                }
    } catch (const HypothesisError& e) {
        jd["positive"] = false;
        jd["error"] = e.what();
        ok = false;
    }
    j["density"] = jd;

    std::vector<Ball> balls = setup.analysis.balls;
    if (balls.empty())
        for (const double f : {0.5, 1.0, 2.0, 4.0}) balls.push_back({Vec(setup.dim, 0.0), f * m0});
    const A2Report a2 = a2_estimate(setup.field, balls, qc);
    j["a2"] = json::parse(to_json(a2));
    ok = ok && a2.converged;

    std::vector<double> grid = setup.analysis.r_grid;
    if (grid.empty())
        for (int k = 0; k <= 24; ++k) grid.push_back(std::pow(10.0, double(k) / 12.0));
    const GrowthReport growth = growth_criteria(setup.field, grid, qc);
    j["growth"] = json::parse(to_json(growth));
    ok = ok && growth.conservative;

    j["pass"] = ok;
    sink.write_text("validation.json", j.dump(2) + "\n");
    sink.finish();

    std::cout << "h1: " << (h1.pass ? "pass" : "FAIL") << "\n"
              << "density: " << (jd["positive"].get<bool>() ? "positive" : "FAIL") << "\n"
              << "a2: " << (a2.converged ? "pass" : "FAIL") << "\n"
              << "conservative: " << (growth.conservative ? "pass" : "FAIL") << "\n";
    return ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"distorted skew Brownian motion: simulation and verification"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "JSON config file")->required();
        sub->add_option("--seed", opt.seed, "master seed override");
        sub->add_option("--paths", opt.paths, "path count override");
        sub->add_option("--step", opt.step, "step size override");
        sub->add_option("--horizon", opt.horizon, "time horizon override");
        sub->add_option("--out-dir", opt.out_dir, "output directory (env SKEWSIM_OUT_DIR)");
        sub->add_option("--format", opt.format, "artifact format")
            ->check(CLI::IsMember({"csv", "json", "bin"}));
        return sub;
    };

    add_common(app.add_subcommand("simulate", "emit trajectories and local times"));
    CLI::App* verify = add_common(app.add_subcommand("verify", "run hypothesis tests"));
    verify->add_option("--test", opt.test, "run one test only")
        ->check(CLI::IsMember(
            {"crossing", "radial", "radial_consistency", "reversibility", "occupation"}));
    verify->add_option("--membrane", opt.membrane, "crossing test membrane radius");
    verify->add_option("--eps", opt.eps, "crossing test shell half-width");
    add_common(app.add_subcommand("analyze", "emit analysis reports"));
    add_common(app.add_subcommand("coeffs", "emit the skew coefficient table"));
    add_common(app.add_subcommand("validate", "hypothesis checks only"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const CLI::App* sub = app.get_subcommands().front();
    try {
        if (sub->get_name() == "simulate") return run_simulate(opt, *sub);
        if (sub->get_name() == "verify") return run_verify(opt, *sub);
        if (sub->get_name() == "analyze") return run_analyze(opt, *sub);
        if (sub->get_name() == "coeffs") return run_coeffs(opt, *sub);
        return run_validate(opt, *sub);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const HypothesisError& e) {
        std::cerr << "hypothesis violated: " << e.what() << "\n";
        return 2;
    } catch (const EvaluationError& e) {
        std::cerr << "evaluation failed: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
