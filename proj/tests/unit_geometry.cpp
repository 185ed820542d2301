// Membrane geometry, weight fields, skew coefficients, config parsing.
// Reference values: tools/oracles.py.

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "skewsim/config.hpp"
#include "skewsim/density.hpp"
#include "skewsim/errors.hpp"
#include "skewsim/membranes.hpp"
#include "skewsim/rng.hpp"
#include "skewsim/skew_table.hpp"
#include "skewsim/weight_field.hpp"

using namespace skewsim;

namespace {

MembraneSpec one_membrane(double l, double g_in, double g_out) {
    MembraneSpec spec;
    spec.m0 = 1.0;
    spec.inner = {{l, g_in}};
    spec.gamma_top = g_out;
    spec.gammabar_bottom = g_out;
    return spec;
}

} // namespace

TEST_CASE("skew_alpha matches the weight-ratio formula exactly") {
    Rng rng(914, 0);
    for (int i = 0; i < 20; ++i) {
        const double gl = 0.1 + 5.0 * rng.uniform();
        const double gr = 0.1 + 5.0 * rng.uniform();
        const double alpha = skew_alpha(gl, gr);
        CHECK(alpha == doctest::Approx(gr / (gr + gl)).epsilon(1e-15));
        CHECK(alpha > 0.0);
        CHECK(alpha < 1.0);
        // power-of-two rescaling only shifts exponents; the quotient is bit-identical
        CHECK(skew_alpha(gl * 0x1p20, gr * 0x1p20) == alpha);
        CHECK(skew_alpha(gl * 0x1p-30, gr * 0x1p-30) == alpha);
    }
    CHECK(skew_alpha(1.0, 2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-16));
    CHECK_THROWS_AS(skew_alpha(0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(skew_alpha(1.0, -2.0), ValidationError);
}

TEST_CASE("build_membranes flattens boundaries with m0 and per-annulus weights") {
    MembraneSpec spec;
    spec.m0 = 1.0;
    spec.inner = {{0.25, 2.0}, {0.5, 3.0}};
    spec.gamma_top = 4.0;
    spec.outer = {{2.0, 5.0}};
    spec.gammabar_bottom = 4.5;
    const MembraneSet ms = build_membranes(spec);

    CHECK(ms.boundaries == std::vector<double>{0.25, 0.5, 1.0, 2.0});
    CHECK(ms.weights == std::vector<double>{2.0, 3.0, 4.0, 4.5, 5.0});
    CHECK(ms.m0_index == 2);
    CHECK(ms.phi_min() == 2.0);
    CHECK(ms.phi_max() == 5.0);

    // strictly inside an annulus; exact average on a membrane
    CHECK(phi(ms, 0.1) == 2.0);
    CHECK(phi(ms, 0.3) == 3.0);
    CHECK(phi(ms, 0.25) == 2.5);
    CHECK(phi(ms, 1.0) == doctest::Approx(4.25).epsilon(1e-16));
    CHECK(phi(ms, 10.0) == 5.0);
}

TEST_CASE("build_membranes rejects bad geometry") {
    MembraneSpec spec = one_membrane(0.5, 1.0, 2.0);
    spec.inner = {{0.5, 1.0}, {0.4, 1.0}}; // not increasing
    CHECK_THROWS_AS(build_membranes(spec), ValidationError);

    spec = one_membrane(1.5, 1.0, 2.0); // inner radius above m0
    CHECK_THROWS_AS(build_membranes(spec), ValidationError);

    spec = one_membrane(0.5, -1.0, 2.0); // nonpositive weight
    CHECK_THROWS_AS(build_membranes(spec), ValidationError);

    spec = one_membrane(0.5, 1.0, 2.0);
    spec.outer = {{0.9, 1.0}}; // outer radius below m0
    CHECK_THROWS_AS(build_membranes(spec), ValidationError);
}

TEST_CASE("skew table carries alpha, coeff and revuz weight per boundary") {
    const MembraneSet ms = build_membranes(one_membrane(0.5, 1.0, 2.0));
    const SkewTable table = skew_coefficients(ms);

    REQUIRE(table.entries.size() == 2); // membrane + m0
    const SkewEntry* e = table.find(0.5);
    REQUIRE(e != nullptr);
    CHECK(e->alpha == doctest::Approx(2.0 / 3.0).epsilon(1e-16));
    CHECK(e->coeff == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(e->revuz_weight == doctest::Approx(1.5).epsilon(1e-16));

    // m0 separates equal weights here: invisible membrane
    CHECK(table.entries[table.m0_index].coeff == 0.0);
    CHECK(table.find(0.75) == nullptr);

    std::ostringstream os;
    write_csv(table, os);
    CHECK(os.str().rfind("radius,alpha,coeff,revuz_weight\n", 0) == 0);
    CHECK(os.str().find("0.66666666666666") != std::string::npos);
}

TEST_CASE("dyadic family truncation keeps exactly the eight leading membranes") {
    // l_k = 1 - 2^-(k+1), weight 1 + 2^-k inside l_k, tolerance 1e-3:
    // |coeff_k| = 2^-(k-... drops below 1e-3 first at k = 8 (oracle: retained 0..7).
    MembraneSpec spec;
    spec.m0 = 1.0;
    spec.gamma_top = 1.0;
    spec.gammabar_bottom = 1.0;
    spec.inner_family.radius = [](long k) { return 1.0 - std::pow(0.5, double(k + 1)); };
    spec.inner_family.weight = [](long k) { return 1.0 + std::pow(0.5, double(k)); };
    spec.inner_family.k_lo = 0;
    spec.inner_family.k_hi = 60;
    spec.truncation_tolerance = 1e-3;
    const MembraneSet ms = build_membranes(spec);

    CHECK(ms.inner.size() == 8);
    CHECK(ms.truncation_note.dropped == 53);
    // tail jumps telescope: sum over dropped |increments| = 2^-8 exactly
    CHECK(ms.truncation_note.dropped_weight_increment ==
          doctest::Approx(0.00390625).epsilon(1e-12));

    // the merged last jump conserves the total increment sum at 1
    const H1Report h1 = check_h1(ms, {0.5, 1.0, 2.0});
    CHECK(h1.increment_sum_inner == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h1.truncated_tail == doctest::Approx(0.00390625).epsilon(1e-12));
    CHECK(h1.pass);
    // probe 0.5 sits on the first membrane: only the two innermost annuli
    // (weights 2 and 1.5) bound it from below; wider probes see gamma_top = 1
    REQUIRE(h1.delta.size() == 3);
    CHECK(h1.delta[0] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(h1.delta[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h1.delta[2] == doctest::Approx(1.0).epsilon(1e-12));

    // retained coefficients follow the analytic family until the merge point
    const SkewTable table = skew_coefficients(ms);
    for (std::size_t k = 0; k + 1 < 8; ++k) {
        const double gl = 1.0 + std::pow(0.5, double(k));
        const double gr = 1.0 + std::pow(0.5, double(k + 1));
        CHECK(table.entries[k].coeff ==
              doctest::Approx((gr - gl) / (gr + gl)).epsilon(1e-14));
    }
}

TEST_CASE("family whose weight increments stop decaying is rejected") {
    // radii accumulate at m0 but the weights keep oscillating by 0.5
    MembraneSpec spec;
    spec.m0 = 1.0;
    spec.inner_family.radius = [](long k) { return 1.0 - std::pow(0.5, double(k + 1)); };
    spec.inner_family.weight = [](long k) { return k % 2 == 0 ? 1.0 : 1.5; };
    spec.inner_family.k_lo = 0;
    spec.inner_family.k_hi = 40;
    CHECK_THROWS_AS(build_membranes(spec), HypothesisError);
}

TEST_CASE("harmonic weight family has summable increments and passes h1") {
    MembraneSpec spec;
    spec.m0 = 1.0;
    spec.inner_family.radius = [](long k) { return 1.0 - std::pow(0.5, double(k + 1)); };
    spec.inner_family.weight = [](long k) { return 1.0 + 1.0 / double(k + 1); };
    spec.inner_family.k_lo = 0;
    spec.inner_family.k_hi = 40;
    spec.truncation_tolerance = 1e-6;
    const MembraneSet ms = build_membranes(spec);
    const H1Report h1 = check_h1(ms, {1.0, 4.0});
    CHECK(h1.pass);
    // consecutive jumps telescope to 1 - 1/41; the final jump onto gamma_top
    // restores the 1/41, so the flattened sum is exactly 1
    CHECK(h1.increment_sum_inner == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("density models expose rho, gradient and log-density drift") {
    const DensityModel inv = DensityModel::inverse_power(3, 2.0);
    const Vec x{1.0, 1.0, 0.0};
    CHECK(inv.rho(x) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    const Vec mu = inv.drift_ac(x); // -x/(1+|x|^2) (oracle)
    CHECK(mu[0] == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK(mu[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK(mu[2] == doctest::Approx(0.0).epsilon(1e-12));

    const DensityModel gauss = DensityModel::gaussian(3, 1.0);
    const Vec mg = gauss.drift_ac(x); // grad rho / 2 rho = -x
    CHECK(mg[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(mg[2] == doctest::Approx(0.0).epsilon(1e-12));

    const DensityModel c = DensityModel::constant(3, 2.5);
    CHECK(c.zero_drift());
    CHECK(c.rho({0.1, 0.2, 0.3}) == 2.5);

    // pure power |x|^b needs -dim < b < dim for local integrability of psi and 1/psi
    CHECK_THROWS_AS(DensityModel::pure_power(3, 3.5), ValidationError);
    const DensityModel p = DensityModel::pure_power(3, -2.0);
    CHECK(p.rho({2.0, 0.0, 0.0}) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("weight field combines density and membrane weight") {
    WeightField wf{build_membranes(one_membrane(0.5, 1.0, 2.0)),
                   DensityModel::inverse_power(3, 2.0)};
    CHECK(wf.dim() == 3);
    CHECK(wf.radial());
    // psi(x) = phi(|x|) rho(|x|); at r=0.25: 1 * 1/(1+1/16)
    CHECK(wf.psi_radial(0.25) == doctest::Approx(16.0 / 17.0).epsilon(1e-14));
    CHECK(wf.psi({0.25, 0.0, 0.0}) == doctest::Approx(16.0 / 17.0).epsilon(1e-14));
    // just above the membrane the weight doubles
    CHECK(wf.psi_radial(0.75) == doctest::Approx(2.0 / (1.0 + 0.5625)).epsilon(1e-14));
}

TEST_CASE("a2 diagnostic reproduces the closed form for psi = |x|") {
    // (avg |x|)(avg 1/|x|) over any origin ball in d=3: (3R/4)(3/2R) = 9/8
    WeightField wf{build_membranes(MembraneSpec{}), DensityModel::pure_power(3, 1.0)};
    const A2Report rep = a2_estimate(wf, {{Vec{0.0, 0.0, 0.0}, 0.7}, {Vec{0.0, 0.0, 0.0}, 2.0}},
                                     QuadratureConfig{});
    REQUIRE(rep.per_ball.size() == 2);
    CHECK(rep.per_ball[0] == doctest::Approx(1.125).epsilon(1e-8));
    CHECK(rep.per_ball[1] == doctest::Approx(1.125).epsilon(1e-8));
    CHECK(rep.sup_ratio == doctest::Approx(1.125).epsilon(1e-8));
    CHECK(rep.converged);
}

TEST_CASE("config round trip: canonical text re-parses to the same model") {
    const std::string text = R"({
        "dim": 3,
        "density": {"kind": "gaussian", "a": 1.0},
        "membranes": {"m0": 1.0, "inner": [[0.5, 1.0]], "gamma_top": 2.0},
        "simulation": {"n_paths": 10, "step": 0.001, "horizon": 0.5, "seed": 3,
                       "mode": "radial"},
        "tests": {"crossing": {"membrane": 0.5, "eps": 0.04}}
    })";
    const RunSetup a = parse_config_text(text);
    const RunSetup b = parse_config_text(a.canonical_text);
    CHECK(a.canonical_text == b.canonical_text);
    CHECK(a.dim == b.dim);
    CHECK(a.sim.mode == "radial");
    CHECK(a.sim.seed == 3);
    CHECK(a.tests.has_crossing);
    CHECK(a.tests.crossing_membrane == 0.5);
    CHECK(a.field.membranes.boundaries == b.field.membranes.boundaries);
    CHECK(a.field.membranes.weights == b.field.membranes.weights);
}

TEST_CASE("config rejects unknown keys with a dotted path") {
    const std::string text = R"({"dim": 3, "membranes": {"m0": 1.0, "gama_top": 2.0}})";
    try {
        parse_config_text(text);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("membranes") != std::string::npos);
        CHECK(msg.find("gama_top") != std::string::npos);
    }
}

TEST_CASE("config reports the parse error line") {
    try {
        parse_config_text("{\n  \"dim\": 3,\n  bogus\n}");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("config defaults: constant density, start at half m0") {
    const RunSetup s = parse_config_text(R"({"dim": 3, "membranes": {"m0": 2.0}})");
    CHECK(s.field.density.name() == "constant");
    REQUIRE(s.sim.x0.size() == 1);
    CHECK(s.sim.x0[0] == 1.0);
    CHECK(s.sim.mode == "full");
}

TEST_CASE("config validates simulation.mode") {
    CHECK_THROWS_AS(parse_config_text(R"({"dim": 3, "membranes": {"m0": 1.0},
        "simulation": {"mode": "sideways"}})"),
                    ValidationError);
}
