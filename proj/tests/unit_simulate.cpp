// Path simulation: the skew crossing rule, scale-function oracles, worker
// independence, local time, and the Tanaka bookkeeping.
//
// Monte Carlo checks run at fixed seeds with bands of at least 4.5 binomial
// or empirical standard errors, so they are deterministic in practice and
// loose enough to survive a reseed.

#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "skewsim/density.hpp"
#include "skewsim/ensemble.hpp"
#include "skewsim/errors.hpp"
#include "skewsim/membranes.hpp"
#include "skewsim/radial_model.hpp"
#include "skewsim/sim_config.hpp"
#include "skewsim/simulate.hpp"
#include "skewsim/skew_table.hpp"
#include "skewsim/weight_field.hpp"

using namespace skewsim;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Membrane at 0.5 with weights (1, 2); m0 carries no jump.
WeightField half_membrane_field(double g_in = 1.0, double g_out = 2.0) {
    MembraneSpec spec;
    spec.inner = {{0.5, g_in}};
    spec.gamma_top = g_out;
    spec.gammabar_bottom = g_out;
    return WeightField{build_membranes(spec), DensityModel::constant(3)};
}

// Membrane at m0 = 1 with weights (1, 2), driftless line dynamics.
RadialModel driftless_membrane_model() {
    MembraneSpec spec;
    spec.gamma_top = 1.0;
    spec.gammabar_bottom = 2.0;
    return make_radial_model(1, skew_coefficients(build_membranes(spec)),
                             [](double) { return 0.0; }, 0.0, kInf);
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (const double x : xs) s += x;
    return s / double(xs.size());
}

} // namespace

TEST_CASE("scale function: membrane kink and Bessel increments") {
    const RadialModel flat = driftless_membrane_model();
    // s' = 1 below the membrane, (1-alpha)/alpha = 1/2 above
    CHECK(scale_function(flat, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(scale_function(flat, 1.5) == doctest::Approx(1.25).epsilon(1e-9));
    CHECK(exit_probability(flat, 1.0, 0.5, 1.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(scale_increment(flat, 2.0, 1.0) ==
          doctest::Approx(-scale_increment(flat, 1.0, 2.0)).epsilon(1e-12));

    // plain d = 3 radius: s(r) = -1/r up to affine scale
    const WeightField plain{build_membranes(MembraneSpec{}), DensityModel::constant(3)};
    const RadialModel bessel = make_radial_model(plain, 0.0, kInf);
    CHECK(exit_probability(bessel, 1.0, 0.5, 2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));

    // membrane (1, 2) at 0.5, started on it, shell (0.45, 0.55):
    // below-increment 1/0.45 - 1/0.5, above-increment (1/2)(1/0.5 - 1/0.55),
    // outer probability 22/31
    const RadialModel skewed = make_radial_model(half_membrane_field(), 0.0, kInf);
    CHECK(exit_probability(skewed, 0.5, 0.45, 0.55) ==
          doctest::Approx(22.0 / 31.0).epsilon(1e-9));
    // reversed weights (2, 1): 11/29
    const RadialModel reversed = make_radial_model(half_membrane_field(2.0, 1.0), 0.0, kInf);
    CHECK(exit_probability(reversed, 0.5, 0.45, 0.55) ==
          doctest::Approx(11.0 / 29.0).epsilon(1e-9));
}

TEST_CASE("shell exits: started on the membrane, the coin matches the scale law") {
    SimConfig cfg;
    cfg.n_paths = 4000;
    cfg.step = 1e-4;
    cfg.horizon = 5.0;
    cfg.seed = 60301;
    cfg.x0 = {1.0};
    cfg.track_local_time = false;

    // driftless, membrane (1, 2) at r0 = 1, symmetric shell: alpha = 2/3
    const ShellExitResult flat = shell_exit_monte_carlo(driftless_membrane_model(), 1.0, 0.5, 1.5, cfg);
    CHECK(flat.n_timed_out < cfg.n_paths / 100);
    CHECK(std::abs(flat.outer_fraction() - 2.0 / 3.0) < 0.035);

    // d = 3 radius with the (1, 2) membrane at 0.5: 22/31 through the outer shell
    SimConfig tight = cfg;
    tight.n_paths = 3000;
    tight.step = 2e-5;
    tight.horizon = 3.0;
    tight.x0 = {0.5};
    const RadialModel skewed = make_radial_model(half_membrane_field(), 0.0, kInf);
    const ShellExitResult up = shell_exit_monte_carlo(skewed, 0.5, 0.45, 0.55, tight);
    CHECK(up.n_timed_out == 0);
    CHECK(std::abs(up.outer_fraction() - 22.0 / 31.0) < 0.038);
    CHECK(up.mean_exit_time > 0.0);

    // reversing the weights must pull the fraction to 11/29
    const RadialModel reversed = make_radial_model(half_membrane_field(2.0, 1.0), 0.0, kInf);
    const ShellExitResult dn = shell_exit_monte_carlo(reversed, 0.5, 0.45, 0.55, tight);
    CHECK(std::abs(dn.outer_fraction() - 11.0 / 29.0) < 0.038);

    CHECK_THROWS_AS(shell_exit_monte_carlo(skewed, 0.4, 0.45, 0.55, tight), ValidationError);
}

TEST_CASE("zero-coefficient membranes are invisible bit for bit") {
    SimConfig cfg;
    cfg.n_paths = 64;
    cfg.step = 1e-3;
    cfg.horizon = 0.5;
    cfg.seed = 99;
    cfg.x0 = {0.9};
    cfg.track_local_time = false;

    const WeightField bare{build_membranes(MembraneSpec{}), DensityModel::constant(3)};
    MembraneSpec ghost_spec;
    ghost_spec.inner = {{0.8, 1.0}}; // same weight on both sides: coefficient 0
    const WeightField ghost{build_membranes(ghost_spec), DensityModel::constant(3)};

    const PathEnsemble a = simulate_radial(make_radial_model(bare, 0.0, kInf), cfg);
    const PathEnsemble b = simulate_radial(make_radial_model(ghost, 0.0, kInf), cfg);
    REQUIRE(a.positions.size() == b.positions.size());
    CHECK(a.positions == b.positions);
}

TEST_CASE("results do not depend on the worker count") {
    SimConfig cfg;
    cfg.n_paths = 12;
    cfg.step = 1e-3;
    cfg.horizon = 0.05;
    cfg.seed = 3141;
    cfg.x0 = {0.7, 0.1, -0.2};
    cfg.occupation_bands = {{0.0, 0.6}, {0.6, 2.0}};
    cfg.n_threads = 1;

    MembraneSpec spec;
    spec.inner = {{0.6, 1.0}};
    spec.gamma_top = 1.8;
    spec.gammabar_bottom = 1.2;
    const WeightField wf{build_membranes(spec), DensityModel::gaussian(3, 0.5)};

    const PathEnsemble one = simulate_full(wf, cfg);
    cfg.n_threads = 3;
    const PathEnsemble three = simulate_full(wf, cfg);
    CHECK(one.positions == three.positions);
    CHECK(one.local_time == three.local_time);
    CHECK(one.crossings == three.crossings);
    CHECK(one.occupation == three.occupation);

    // occupation time is a partition of the elapsed time, never more
    for (std::size_t p = 0; p < one.n_paths; ++p) {
        const double t = one.occupation[p * 2] + one.occupation[p * 2 + 1];
        CHECK(t >= 0.0);
        CHECK(t <= cfg.horizon + cfg.step);
    }

    cfg.n_threads = 2;
    const PathEnsemble radial = simulate_radial(make_radial_model(wf, 0.0, kInf), cfg);
    cfg.n_threads = 1;
    const PathEnsemble radial1 = simulate_radial(make_radial_model(wf, 0.0, kInf), cfg);
    CHECK(radial.positions == radial1.positions);
    CHECK(radial.local_time == radial1.local_time);
}

TEST_CASE("signed grid crossings reconcile with the endpoint sides") {
    SimConfig cfg;
    cfg.n_paths = 200;
    cfg.step = 1e-3;
    cfg.horizon = 0.6;
    cfg.seed = 777;
    cfg.x0 = {0.7};
    cfg.store_stride = 0;
    // Euler can overshoot the polar origin; park those paths rather than throw.
    // The reconciliation below must hold for parked paths too.
    cfg.nonpositive = NonpositivePolicy::Absorb;

    MembraneSpec spec;
    spec.gamma_top = 1.0;
    spec.gammabar_bottom = 2.0; // membrane at m0 = 1
    const WeightField wf{build_membranes(spec), DensityModel::constant(3)};
    const PathEnsemble ens = simulate_radial(make_radial_model(wf, 0.0, kInf), cfg);
    REQUIRE(ens.tracked_radii.size() == 1);
    REQUIRE(ens.tracked_radii[0] == 1.0);

    const std::size_t last = ens.n_stored() - 1;
    for (std::size_t p = 0; p < ens.n_paths; ++p) {
        const long long net = ens.crossings[p];
        const long long expect =
            (ens.radius(p, last) > 1.0 ? 1 : 0) - (ens.radius(p, 0) > 1.0 ? 1 : 0);
        CHECK(net == expect);
    }
}

TEST_CASE("plain d = 3 radius: second moment grows like r0^2 + 3T") {
    SimConfig cfg;
    cfg.n_paths = 4000;
    cfg.step = 1e-3;
    cfg.horizon = 0.5;
    cfg.seed = 5150;
    cfg.x0 = {1.0};
    cfg.store_stride = 0;
    cfg.track_local_time = false;
    // a few of 4000 paths Euler-overshoot r = 0; parking them shifts the
    // mean by O(1e-3), far under the band below
    cfg.nonpositive = NonpositivePolicy::Absorb;

    const WeightField wf{build_membranes(MembraneSpec{}), DensityModel::constant(3)};
    const PathEnsemble ens = simulate_radial(make_radial_model(wf, 0.0, kInf), cfg);
    std::vector<double> sq;
    sq.reserve(ens.n_paths);
    for (const double r : ens.final_radii()) sq.push_back(r * r);
    // Var(r_T^2) = 3.5 here, so 4.5 s.e. is about 0.13
    CHECK(std::abs(mean_of(sq) - 2.5) < 0.14);
}

TEST_CASE("mean-reverting control on the whole line reaches its stationary law") {
    // dX = -X dt + dW has stationary variance 1/2; run as a custom-drift
    // one-dimensional model with no membranes and no domain floor
    const RadialModel ou = make_radial_model(1, SkewTable{}, [](double r) { return -r; },
                                             -kInf, kInf);
    SimConfig cfg;
    cfg.n_paths = 4000;
    cfg.step = 1e-3;
    cfg.horizon = 6.0;
    cfg.seed = 11213;
    cfg.x0 = {0.0};
    cfg.store_stride = 0;
    cfg.track_local_time = false;

    const PathEnsemble ens = simulate_radial(ou, cfg);
    std::vector<double> sq;
    for (const double r : ens.final_radii()) sq.push_back(r * r);
    CHECK(std::abs(mean_of(sq) - 0.5) < 0.05);
}

TEST_CASE("line harness: local time at 0 over a unit of time") {
    SimConfig cfg;
    cfg.n_paths = 500;
    cfg.step = 1e-3;
    cfg.horizon = 1.0;
    cfg.seed = 271828;
    cfg.x0 = {0.0};
    cfg.shell_eps = 0.05;
    cfg.store_stride = 0;

    const PathEnsemble ens = simulate_line(cfg, {0.0});
    REQUIRE(ens.tracked_radii == std::vector<double>{0.0});
    const std::size_t last = ens.n_stored() - 1;
    std::vector<double> lt;
    for (std::size_t p = 0; p < ens.n_paths; ++p)
        lt.push_back(ens.local_time_value(p, last, 0));
    // E l_1(0) = sqrt(2/pi) = 0.7978846; shell and step bias are a few percent
    CHECK(std::abs(mean_of(lt) - 0.797884560802865) < 0.12);
    for (const double v : lt) CHECK(v >= 0.0);
}

TEST_CASE("tanaka residual: exact off the level, small on it, 1d only") {
    SimConfig cfg;
    cfg.n_paths = 100;
    cfg.step = 1e-3;
    cfg.horizon = 1.0;
    cfg.seed = 1609;
    cfg.x0 = {0.0};
    cfg.shell_eps = 0.05;
    cfg.record_increments = true;

    const PathEnsemble ens = simulate_line(cfg, {0.0});

    // increments are the raw driving noise: they must rebuild the endpoint
    REQUIRE(ens.increments.size() == ens.n_paths * 1000);
    for (std::size_t p = 0; p < 5; ++p) {
        double acc = 0.0;
        for (std::size_t k = 0; k < 1000; ++k) acc += ens.increments[p * 1000 + k];
        CHECK(ens.radius(p, ens.n_stored() - 1) == doctest::Approx(acc).epsilon(1e-10));
    }

    // a level the paths never visit: the telescoping identity is exact
    for (std::size_t p = 0; p < 10; ++p)
        CHECK(std::abs(tanaka_residual(ens, p, -100.0, 0.05)) < 1e-9);

    double acc = 0.0;
    for (std::size_t p = 0; p < ens.n_paths; ++p)
        acc += std::abs(tanaka_residual(ens, p, 0.0, cfg.shell_eps));
    const double mean_abs = acc / double(ens.n_paths);
    CHECK(mean_abs > 0.0);
    // residual scale is set by the shell width (0.05) and sqrt(h) against a
    // unit path scale; an order below that scale is the honest claim here
    CHECK(mean_abs < 0.25);

    // increment recording is defined for one-dimensional runs only
    SimConfig bad = cfg;
    bad.x0 = {0.7, 0.1, -0.2};
    const WeightField wf{build_membranes(MembraneSpec{}), DensityModel::constant(3)};
    CHECK_THROWS_AS(simulate_full(wf, bad), ValidationError);
}

TEST_CASE("nonpositive policy: absorb parks at the floor, error throws") {
    const RadialModel sink = make_radial_model(1, SkewTable{}, [](double) { return -4.0; },
                                               0.0, kInf);
    SimConfig cfg;
    cfg.n_paths = 8;
    cfg.step = 1e-3;
    cfg.horizon = 1.0;
    cfg.seed = 4096;
    cfg.x0 = {0.1};
    cfg.store_stride = 0;
    cfg.track_local_time = false;
    cfg.nonpositive = NonpositivePolicy::Absorb;

    const PathEnsemble ens = simulate_radial(sink, cfg);
    const std::size_t last = ens.n_stored() - 1;
    for (std::size_t p = 0; p < ens.n_paths; ++p) {
        CHECK(ens.absorbed[p] == 1);
        CHECK(ens.radius(p, last) == 0.0);
    }

    cfg.nonpositive = NonpositivePolicy::Error;
    CHECK_THROWS_AS(simulate_radial(sink, cfg), EvaluationError);
}
