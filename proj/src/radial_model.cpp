#include "skewsim/radial_model.hpp"

#include <cmath>
#include <utility>

#include "skewsim/errors.hpp"
#include "skewsim/quadrature.hpp"

namespace skewsim {

RadialModel make_radial_model(const WeightField& wf, double domain_lo, double domain_hi,
                              bool include_bessel) {
    if (!wf.radial())
        throw UsageError("radial model needs a density with a radial profile");
    if (!(domain_lo >= 0.0) || !(domain_hi > domain_lo))
        throw ValidationError("radial model: need 0 <= domain_lo < domain_hi");
    RadialModel rm;
    rm.dim = wf.dim();
    rm.skew = skew_coefficients(wf.membranes);
    rm.domain_lo = domain_lo;
    rm.domain_hi = domain_hi;
    rm.includes_bessel = include_bessel;
    const RadialProfile prof = *wf.density.radial();
    const double bessel = include_bessel ? 0.5 * (wf.dim() - 1) : 0.0;
    rm.drift = [prof, bessel](double r) {
        return bessel / r + prof.deriv(r) / (2.0 * prof.value(r));
    };
    return rm;
}

RadialModel make_radial_model(int dim, SkewTable skew, std::function<double(double)> drift,
                              double domain_lo, double domain_hi) {
    if (!(domain_hi > domain_lo))
        throw ValidationError("radial model: need domain_lo < domain_hi");
    RadialModel rm;
    rm.dim = dim;
    rm.skew = std::move(skew);
    rm.drift = std::move(drift);
    rm.domain_lo = domain_lo;
    rm.domain_hi = domain_hi;
    rm.includes_bessel = false;
    return rm;
}

namespace {

// Integral of the scale density over one membrane-free segment [p, q],
// given D = int drift over [from, p] and the accumulated slope factor.
double segment_scale_integral(const RadialModel& rm, double p, double q,
                              double d_at_p, double slope) {
    const double prefactor = slope * std::exp(-2.0 * d_at_p);
    const auto integrand = [&](double u) {
        const double a = adaptive_integrate(rm.drift, p, u, rm.quad_tol);
        return std::exp(-2.0 * a);
    };
    return prefactor * adaptive_integrate(integrand, p, q, rm.quad_tol);
}

} // namespace

double scale_increment(const RadialModel& rm, double from, double to) {
    if (from == to) return 0.0;
    if (from > to) return -scale_increment(rm, to, from);
    if (from < rm.domain_lo || to > rm.domain_hi)
        throw UsageError("scale_increment: range leaves the model domain");

    double total = 0.0;
    double d_accum = 0.0; // int drift over [from, current point]
    double slope = 1.0;   // product of (1 - alpha)/alpha over crossed membranes
    double p = from;
    for (const SkewEntry& e : rm.skew.entries) {
        if (e.radius <= from) continue;
        if (e.radius >= to) break;
        total += segment_scale_integral(rm, p, e.radius, d_accum, slope);
        d_accum += adaptive_integrate(rm.drift, p, e.radius, rm.quad_tol);
        slope *= (1.0 - e.alpha) / e.alpha;
        p = e.radius;
    }
    total += segment_scale_integral(rm, p, to, d_accum, slope);
    return total;
}

double scale_function(const RadialModel& rm, double r) {
    if (r < rm.domain_lo || r > rm.domain_hi)
        throw UsageError("scale_function: radius outside the model domain");
    return scale_increment(rm, rm.domain_lo, r);
}

double exit_probability(const RadialModel& rm, double r0, double a, double b) {
    if (!(a < b) || r0 < a || r0 > b)
        throw UsageError("exit_probability: need a <= r0 <= b with a < b");
    if (a < rm.domain_lo || b > rm.domain_hi)
        throw UsageError("exit_probability: [a,b] leaves the model domain");
    if (r0 == a) return 0.0;
    if (r0 == b) return 1.0;
    // Both increments from a so drift integral and slope product share one
    // reference point (they are only defined up to a common constant factor).
    const double lower = scale_increment(rm, a, r0);
    const double whole = scale_increment(rm, a, b);
    return lower / whole;
}

} // namespace skewsim
