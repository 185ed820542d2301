#ifndef SKEWSIM_SIM_CONFIG_HPP
#define SKEWSIM_SIM_CONFIG_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "skewsim/vec.hpp"

namespace skewsim {

/** What to do when a radial path reaches radius <= 0. Error is the default
 *  (it signals a step size too large for the drift); Absorb parks the path at
 *  0 and is meant for negative controls whose dynamics genuinely hit 0.
 *  Reflect folds the proposal back across the domain end: the modulus of the
 *  full-dimensional step does exactly this at the origin, so it is the
 *  faithful opt-in for long recurrent radial runs. The fold is not re-checked
 *  against membranes; keep them clear of the ends by the overshoot scale. */
enum class NonpositivePolicy { Error, Absorb, Reflect };

struct SimConfig {
    int dim = 3;
    double horizon = 1.0; // T; the effective horizon is n_steps * step
    double step = 1e-3;   // h
    std::size_t n_paths = 1;
    std::uint64_t seed = 1;
    double shell_eps = 0.05; // local-time shell half-width
    Vec x0;                  // full: dim entries; radial/line: 1 entry (or dim, norm taken)
    std::string scheme = "euler-skew";

    std::size_t store_stride = 1; // keep every k-th grid state; 0 = endpoints only
    bool track_local_time = true;
    bool record_increments = false; // retain driving Brownian increments per step
    std::vector<std::pair<double, double>> occupation_bands; // accumulated time per radial band
    NonpositivePolicy nonpositive = NonpositivePolicy::Error;
    int n_threads = 1; // worker count; results are independent of it

    std::string mode = "full"; // batch dispatch: "full" or "radial"
};

} // namespace skewsim

#endif
