#ifndef SKEWSIM_SIMULATE_HPP
#define SKEWSIM_SIMULATE_HPP

#include <cstddef>
#include <vector>

#include "skewsim/ensemble.hpp"
#include "skewsim/radial_model.hpp"
#include "skewsim/sim_config.hpp"
#include "skewsim/weight_field.hpp"

namespace skewsim {

/**
 * Radius process on (rm.domain_lo, rm.domain_hi). Every proposed move that
 * lands across a membrane is resolved by drawing the post-move side (outside
 * with probability alpha) and keeping the remaining travel distance on that
 * side; membranes with zero coefficient are invisible and draw nothing.
 * Local time at every membrane radius, signed grid crossings and band
 * occupation are accumulated on the full step grid.
 */
PathEnsemble simulate_radial(const RadialModel& rm, const SimConfig& cfg);

/**
 * Full d-dimensional process: Euler proposal with the absolutely continuous
 * drift, then the radius of the proposal is folded through the membranes by
 * the same rule as the radial scheme and the point is rescaled onto the
 * resolved radius. The Bessel part is implicit in the geometry here, not an
 * added drift term.
 */
PathEnsemble simulate_full(const WeightField& wf, const SimConfig& cfg);

/**
 * Driftless, membrane-free line process (plain Brownian motion); the local
 * time harness for calibrating the shell estimator. `levels` are the
 * tracked local-time levels.
 */
PathEnsemble simulate_line(const SimConfig& cfg, std::vector<double> levels);

struct ShellExitResult {
    std::size_t n_outer = 0;     // exited through b
    std::size_t n_timed_out = 0; // still inside at the horizon
    std::size_t n_paths = 0;
    double mean_exit_time = 0.0; // over exited paths

    double outer_fraction() const {
        const std::size_t n = n_paths - n_timed_out;
        return n ? double(n_outer) / double(n) : 0.0;
    }
};

/**
 * Runs paths from r0 until they leave (a, b); cfg.horizon is the per-path
 * time cap. Exits are detected at grid points, so cfg.step should be small
 * against (b - a)^2.
 */
ShellExitResult shell_exit_monte_carlo(const RadialModel& rm, double r0, double a, double b,
                                       const SimConfig& cfg);

/**
 * |r_T - a| - |r_0 - a| - sum sign(r_k - a)(r_{k+1} - r_k) - shell estimate,
 * with sign(0) = 0 and the shell estimate (step / 2 eps) sum 1{|r_k - a| < eps}
 * over post-step points. Needs a one-dimensional ensemble with every step
 * stored.
 */
double tanaka_residual(const PathEnsemble& ens, std::size_t path, double level, double eps);

} // namespace skewsim

#endif
