#ifndef SKEWSIM_CONFIG_HPP
#define SKEWSIM_CONFIG_HPP

#include <string>
#include <utility>
#include <vector>

#include "skewsim/membranes.hpp"
#include "skewsim/sim_config.hpp"
#include "skewsim/weight_field.hpp"

namespace skewsim {

/**
 * Config file: one JSON object with sections
 *   dim          integer >= 3 for full runs (1 allowed for line harnesses)
 *   density      {"kind": "constant"|"gaussian"|"inverse_power"|"pure_power", ...}
 *   membranes    m0, gamma_top, gammabar_bottom, explicit inner/outer pairs
 *                [[radius, weight], ...] or per-side families
 *                {"radii": "dyadic"|"geometric", "k_lo", "k_hi",
 *                 "weights": {"law": "constant"|"geometric_bump"|"harmonic", ...}},
 *                truncation_tolerance
 *   simulation   SimConfig fields (x0 may be a number = start radius)
 *   tests        per-test parameter blocks (crossing, radial_consistency,
 *                reversibility, occupation)
 *   analysis     r_grid, trace_radius, bump_radius, balls
 * Unknown keys anywhere are errors (drift protection), reported with their
 * dotted path; parse errors carry the line number.
 */
struct TestSelection {
    bool has_crossing = false;
    double crossing_membrane = 0.0;
    double crossing_eps = 0.05;
    double crossing_eps_outer = 0.0; // 0 = symmetric shell

    bool has_radial_consistency = false;
    bool radial_bessel = true;

    bool has_reversibility = false;
    Vec rev_x, rev_y;
    double rev_bandwidth = 0.0;

    bool has_occupation = false;
    std::pair<double, double> occ_a{1.0, 2.0};
    std::pair<double, double> occ_b{2.0, 3.0};
};

struct AnalysisSetup {
    std::vector<double> r_grid;  // empty: caller builds a default decade grid
    double trace_radius = 0.0;   // 0 = skip the trace check
    double bump_radius = 0.0;    // test-function support; 0 = derive from geometry
    std::vector<Ball> balls;     // empty: default origin balls
};

struct RunSetup {
    int dim = 3;
    MembraneSpec membrane_spec;
    WeightField field; // membranes validated by build_membranes
    SimConfig sim;
    TestSelection tests;
    AnalysisSetup analysis;
    std::string canonical_text; // sorted-key compact dump; hash this
};

RunSetup parse_config_text(const std::string& text);
RunSetup load_config_file(const std::string& path);

} // namespace skewsim

#endif
