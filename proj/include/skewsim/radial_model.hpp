#ifndef SKEWSIM_RADIAL_MODEL_HPP
#define SKEWSIM_RADIAL_MODEL_HPP

#include <functional>

#include "skewsim/skew_table.hpp"
#include "skewsim/weight_field.hpp"

namespace skewsim {

/**
 * Radial reduction: 1d diffusion on (domain_lo, domain_hi) with drift
 * (dim-1)/(2r) + g'(r)/(2 g(r)) and the membrane skew data. The Bessel part
 * is optional so the norm-consistency negative control can omit it.
 */
struct RadialModel {
    int dim = 3;
    SkewTable skew;
    std::function<double(double)> drift;
    double domain_lo = 0.0;
    double domain_hi = 1.0;
    bool includes_bessel = true;
    double quad_tol = 1e-10; // absolute tolerance of the scale quadratures
};

RadialModel make_radial_model(const WeightField& wf, double domain_lo, double domain_hi,
                              bool include_bessel = true);

/** Custom drift variant (used by controls and the line harness tests). */
RadialModel make_radial_model(int dim, SkewTable skew, std::function<double(double)> drift,
                              double domain_lo, double domain_hi);

/**
 * s(to) - s(from) where s' = exp(-2 int drift) times the product of
 * (1-alpha)/alpha over membranes already crossed outward. Adaptive composite
 * Gauss per membrane segment; throws EvaluationError when the integrand is
 * not integrable on the range.
 */
double scale_increment(const RadialModel& rm, double from, double to);

/** Scale function normalized to s(domain_lo) = 0. */
double scale_function(const RadialModel& rm, double r);

/**
 * P(exit at b before a | start r0) = (s(r0)-s(a)) / (s(b)-s(a)), computed
 * from increments over [a,b] only, so a singular domain endpoint outside
 * [a,b] is harmless.
 */
double exit_probability(const RadialModel& rm, double r0, double a, double b);

} // namespace skewsim

#endif
