// Python bindings: a Model wraps one validated configuration and exposes the
// main operations (coefficients, scale/exit probabilities, simulation,
// hypothesis tests, analysis reports). Arrays cross the boundary as numpy;
// reports as plain dicts.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

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

namespace py = pybind11;
using namespace skewsim;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class T>
py::array_t<T> make_array(const std::vector<T>& data, std::vector<py::ssize_t> shape) {
    py::array_t<T> arr(shape);
    if (!data.empty()) std::memcpy(arr.mutable_data(), data.data(), data.size() * sizeof(T));
    return arr;
}

py::dict ensemble_dict(const PathEnsemble& ens) {
    const auto np = py::ssize_t(ens.n_paths);
    const auto ns = py::ssize_t(ens.n_stored());
    const auto nl = py::ssize_t(ens.tracked_radii.size());
    const auto nb = py::ssize_t(ens.occupation_bands.size());
    py::dict d;
    d["dim"] = ens.dim;
    d["step"] = ens.step;
    d["times"] = make_array(ens.times, {ns});
    d["positions"] = make_array(ens.positions, {np, ns, py::ssize_t(ens.dim)});
    d["tracked_radii"] = make_array(ens.tracked_radii, {nl});
    d["local_times"] = make_array(ens.local_time, {np, nl > 0 ? ns : 0, nl});
    d["crossings"] = make_array(ens.crossings, {np, nl});
    d["occupation"] = make_array(ens.occupation, {np, nb});
    d["absorbed"] = make_array(ens.absorbed, {np});
    return d;
}

py::dict report_dict(const TestReport& r) {
    py::dict d;
    d["name"] = r.name;
    d["estimate"] = r.estimate;
    d["target"] = r.target;
    d["stderr"] = r.stderr_;
    if (r.p_value >= 0.0) d["p_value"] = r.p_value;
    d["tolerance_k"] = r.tolerance_k;
    d["p_threshold"] = r.p_threshold;
    if (r.rel_tolerance > 0.0) d["rel_tolerance"] = r.rel_tolerance;
    d["n"] = r.n;
    d["pass"] = r.pass;
    d["config"] = r.config_echo;
    if (!r.note.empty()) d["note"] = r.note;
    return d;
}

struct Model {
    RunSetup setup;

    explicit Model(const std::string& config_text) : setup(parse_config_text(config_text)) {}

    RadialModel radial_model(bool include_bessel) const {
        return make_radial_model(setup.field, 0.0, kInf, include_bessel);
    }

    void set_simulation(std::optional<std::size_t> n_paths, std::optional<double> step,
                        std::optional<double> horizon, std::optional<std::uint64_t> seed,
                        std::optional<std::string> mode, std::optional<std::vector<double>> x0,
                        std::optional<int> n_threads, std::optional<std::size_t> store_stride,
                        std::optional<bool> track_local_time) {
        SimConfig& cfg = setup.sim;
        if (n_paths) cfg.n_paths = *n_paths;
        if (step) cfg.step = *step;
        if (horizon) cfg.horizon = *horizon;
        if (seed) cfg.seed = *seed;
        if (mode) {
            if (*mode != "full" && *mode != "radial")
                throw UsageError("mode must be 'full' or 'radial'");
            cfg.mode = *mode;
        }
        if (x0) cfg.x0 = *x0;
        if (n_threads) cfg.n_threads = *n_threads;
        if (store_stride) cfg.store_stride = *store_stride;
        if (track_local_time) cfg.track_local_time = *track_local_time;
    }

    py::dict coefficients() const {
        const SkewTable table = skew_coefficients(setup.field.membranes);
        std::vector<double> radius, alpha, coeff, revuz;
        for (const auto& e : table.entries) {
            radius.push_back(e.radius);
            alpha.push_back(e.alpha);
            coeff.push_back(e.coeff);
            revuz.push_back(e.revuz_weight);
        }
        const auto n = py::ssize_t(radius.size());
        py::dict d;
        d["radius"] = make_array(radius, {n});
        d["alpha"] = make_array(alpha, {n});
        d["coeff"] = make_array(coeff, {n});
        d["revuz_weight"] = make_array(revuz, {n});
        d["m0_index"] = table.m0_index;
        return d;
    }

    py::dict simulate() const {
        py::gil_scoped_release release;
        const PathEnsemble ens =
            setup.sim.mode == "radial" ? simulate_radial(radial_model(true), setup.sim)
                                       : simulate_full(setup.field, setup.sim);
        py::gil_scoped_acquire acquire;
        return ensemble_dict(ens);
    }

    py::dict verify_crossing(double membrane, double eps, double eps_outer) const {
        const RadialModel rm = radial_model(true);
        return report_dict(crossing_probability_test(rm, membrane, eps,
                                                     eps_outer > 0 ? eps_outer : eps, setup.sim));
    }

    py::dict verify_radial_consistency(bool include_bessel) const {
        return report_dict(radial_consistency_test(setup.field, setup.sim, include_bessel));
    }

    py::dict verify_reversibility(std::vector<double> x, std::vector<double> y,
                                  double bandwidth) const {
        return report_dict(reversibility_test(setup.field, setup.sim, x, y, bandwidth));
    }

    py::dict verify_occupation(std::pair<double, double> band_a,
                               std::pair<double, double> band_b) const {
        return report_dict(occupation_ratio_test(setup.field, setup.sim, band_a, band_b));
    }

    py::dict growth(std::vector<double> r_grid) const {
        if (r_grid.empty())
            for (int k = 0; k <= 24; ++k) r_grid.push_back(std::pow(10.0, double(k) / 12.0));
        const GrowthReport g = growth_criteria(setup.field, r_grid, QuadratureConfig{});
        const auto n = py::ssize_t(g.r_grid.size());
        py::dict d;
        d["r_grid"] = make_array(g.r_grid, {n});
        d["volumes"] = make_array(g.volumes, {n});
        d["alpha_full"] = g.alpha_full;
        d["alpha_tail"] = g.alpha_tail;
        d["conservative"] = g.conservative;
        d["recurrent"] = g.recurrent;
        return d;
    }

    py::dict ibp(double bump_radius) const {
        const double R = bump_radius > 0 ? bump_radius : 1.5 * setup.field.membranes.m0;
        const SmoothField f = bump_field(setup.dim, R);
        const SmoothField g = plateau_field(setup.dim, 0.5 * R, 0.9 * R);
        const IbpReport r = ibp_residual(f, g, setup.field, QuadratureConfig{});
        py::dict d;
        d["lhs"] = r.lhs;
        d["volume_term"] = r.volume_term;
        d["surface_term"] = r.surface_term;
        d["residual_abs"] = r.residual_abs;
        d["residual_rel"] = r.residual_rel;
        d["error_budget"] = r.error_budget;
        return d;
    }

    py::dict trace(double l) const {
        const TraceReport t =
            trace_inequality_check(bump_field(setup.dim, 2.0 * l), l, setup.field,
                                   QuadratureConfig{});
        py::dict d;
        d["lhs"] = t.lhs;
        d["rhs"] = t.rhs;
        d["constant"] = t.constant;
        d["delta"] = t.delta;
        d["pass"] = t.pass;
        return d;
    }

    py::dict a2(std::vector<double> radii) const {
        std::vector<Ball> balls;
        if (radii.empty()) radii = {0.5, 1.0, 2.0, 4.0};
        for (const double r : radii) balls.push_back({Vec(std::size_t(setup.dim), 0.0), r});
        const A2Report rep = a2_estimate(setup.field, balls, QuadratureConfig{});
        py::dict d;
        d["sup_ratio"] = rep.sup_ratio;
        d["worst_ball"] = rep.worst_ball;
        d["per_ball"] = make_array(rep.per_ball, {py::ssize_t(rep.per_ball.size())});
        d["converged"] = rep.converged;
        d["refinement_growth"] = rep.refinement_growth;
        return d;
    }
};

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "simulation and verification engine for skew Brownian motion with "
              "concentric permeable membranes";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<HypothesisError>(m, "HypothesisError", PyExc_RuntimeError);
    py::register_exception<EvaluationError>(m, "EvaluationError", PyExc_RuntimeError);

    m.def("skew_alpha", &skew_alpha, py::arg("gamma_left"), py::arg("gamma_right"),
          "outward excursion probability gamma_right / (gamma_right + gamma_left)");

    py::class_<Model>(m, "Model")
        .def(py::init<const std::string&>(), py::arg("config_text"),
             "build a validated model from JSON config text")
        .def_property_readonly("dim", [](const Model& mdl) { return mdl.setup.dim; })
        .def_property_readonly("m0",
                               [](const Model& mdl) { return mdl.setup.field.membranes.m0; })
        .def_property_readonly(
            "boundaries",
            [](const Model& mdl) {
                const auto& b = mdl.setup.field.membranes.boundaries;
                return make_array(b, {py::ssize_t(b.size())});
            })
        .def_property_readonly("canonical_config",
                               [](const Model& mdl) { return mdl.setup.canonical_text; })
        .def_property_readonly("config_hash",
                               [](const Model& mdl) { return fnv1a64(mdl.setup.canonical_text); })
        .def("phi", [](const Model& mdl, double r) { return phi(mdl.setup.field.membranes, r); },
             py::arg("r"), "piecewise constant membrane weight at radius r")
        .def("psi",
             [](const Model& mdl, std::vector<double> x) { return mdl.setup.field.psi(x); },
             py::arg("x"), "simulated weight rho(x) * phi(|x|)")
        .def("scale",
             [](const Model& mdl, double r) { return scale_function(mdl.radial_model(true), r); },
             py::arg("r"), "natural scale normalized to 0 at the inner domain end")
        .def("exit_probability",
             [](const Model& mdl, double r0, double a, double b, bool include_bessel) {
                 return exit_probability(mdl.radial_model(include_bessel), r0, a, b);
             },
             py::arg("r0"), py::arg("a"), py::arg("b"), py::arg("include_bessel") = true,
             "probability of leaving (a, b) through b when started at r0")
        .def("set_simulation", &Model::set_simulation, py::arg("n_paths") = py::none(),
             py::arg("step") = py::none(), py::arg("horizon") = py::none(),
             py::arg("seed") = py::none(), py::arg("mode") = py::none(),
             py::arg("x0") = py::none(), py::arg("n_threads") = py::none(),
             py::arg("store_stride") = py::none(), py::arg("track_local_time") = py::none(),
             "override simulation parameters in place")
        .def("coefficients", &Model::coefficients,
             "per-membrane skew data as arrays: radius, alpha, coeff, revuz_weight")
        .def("simulate", &Model::simulate,
             "run the configured ensemble; positions shaped (n_paths, n_stored, dim)")
        .def("verify_crossing", &Model::verify_crossing, py::arg("membrane"),
             py::arg("eps") = 0.05, py::arg("eps_outer") = 0.0)
        .def("verify_radial_consistency", &Model::verify_radial_consistency,
             py::arg("include_bessel") = true)
        .def("verify_reversibility", &Model::verify_reversibility, py::arg("x"), py::arg("y"),
             py::arg("bandwidth") = 0.0)
        .def("verify_occupation", &Model::verify_occupation, py::arg("band_a"),
             py::arg("band_b"))
        .def("growth", &Model::growth, py::arg("r_grid") = std::vector<double>{})
        .def("ibp", &Model::ibp, py::arg("bump_radius") = 0.0)
        .def("trace", &Model::trace, py::arg("l"))
        .def("a2", &Model::a2, py::arg("radii") = std::vector<double>{});
}
