#ifndef SKEWSIM_VERIFY_HPP
#define SKEWSIM_VERIFY_HPP

#include <string>
#include <utility>

#include "skewsim/radial_model.hpp"
#include "skewsim/sim_config.hpp"
#include "skewsim/weight_field.hpp"

namespace skewsim {

/**
 * One hypothesis-test outcome. pass is recomputable from the fields alone:
 * a p-value test passes iff p_value >= p_threshold; otherwise the estimate
 * must sit within tolerance_k standard errors of the target, or within
 * rel_tolerance * max(|target|, 1) when rel_tolerance is set.
 */
struct TestReport {
    std::string name;
    double estimate = 0.0;
    double target = 0.0;
    double stderr_ = 0.0;
    double p_value = -1.0;      // < 0 means not a p-value test
    double tolerance_k = 3.0;
    double p_threshold = 0.01;
    double rel_tolerance = 0.0; // 0 means unused
    std::size_t n = 0;
    bool pass = false;
    std::string config_echo; // JSON snippet of the run parameters
    std::string note;
};

/**
 * Starts paths on the membrane and compares the fraction leaving the shell
 * (a_k - eps_inner, a_k + eps_outer) through the top against the exit
 * probability oracle (the drift-corrected skew fraction). Binomial stderr.
 */
TestReport crossing_probability_test(const RadialModel& rm, double a_k, double eps_inner,
                                     double eps_outer, const SimConfig& cfg);
TestReport crossing_probability_test(const RadialModel& rm, double a_k, double eps,
                                     const SimConfig& cfg);

/**
 * Two-sample KS between final norms of the full process and final points of
 * the radial reduction. include_bessel = false is the documented negative
 * control (run it with the Absorb policy); it must fail.
 */
TestReport radial_consistency_test(const WeightField& wf, const SimConfig& cfg,
                                   bool include_bessel = true);

/**
 * Kernel-density check of p_T(x, y) / psi(y) = p_T(y, x) / psi(x); estimate
 * is the ratio, target 1, bootstrap stderr, and a 10% relative band (kernel
 * smoothing bias dominates the Monte Carlo error at large n).
 * bandwidth <= 0 selects Silverman's rule on the pooled sample.
 */
TestReport reversibility_test(const WeightField& wf, const SimConfig& cfg, const Vec& x,
                              const Vec& y, double bandwidth = 0.0);

/**
 * Ratio of time spent in annulus A over annulus B against the psi-mass
 * ratio; refuses transient configurations (volume-growth diagnostic).
 * Generous 25% band: null-recurrent ratio convergence is slow.
 */
TestReport occupation_ratio_test(const WeightField& wf, const SimConfig& cfg,
                                 std::pair<double, double> band_a,
                                 std::pair<double, double> band_b);

} // namespace skewsim

#endif
