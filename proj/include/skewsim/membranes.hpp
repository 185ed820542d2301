#ifndef SKEWSIM_MEMBRANES_HPP
#define SKEWSIM_MEMBRANES_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace skewsim {

/**
 * One side of an analytically specified membrane family: radius(k) strictly
 * increasing over the integer range [k_lo, k_hi]. For the inner side,
 * weight(k) is the weight on the annulus just INSIDE radius(k); for the
 * outer side it is the weight just OUTSIDE radius(k). Empty when k_lo > k_hi.
 */
struct FamilySide {
    std::function<double(long)> radius;
    std::function<double(long)> weight;
    long k_lo = 0;
    long k_hi = -1;
    bool empty() const { return k_lo > k_hi; }
};

struct MembraneSpec {
    double m0 = 1.0;
    // Explicit membranes; for each inner pair (l, g), g is the weight on the
    // annulus just inside l. For each outer pair (r, g), g is the weight on
    // the annulus just outside r.
    std::vector<std::pair<double, double>> inner;
    double gamma_top = 1.0;       // weight on (l_last, m0)
    std::vector<std::pair<double, double>> outer;
    double gammabar_bottom = 1.0; // weight on (m0, r_first)
    // Analytic alternative per side; a side may not be both explicit and analytic.
    FamilySide inner_family;
    FamilySide outer_family;
    double truncation_tolerance = 0.0;
};

struct TruncationNote {
    std::size_t dropped = 0;
    double dropped_coeff_mass = 0.0;       // sum of |2 alpha - 1| over dropped membranes
    double dropped_weight_increment = 0.0; // sum of |gamma_right - gamma_left| over dropped
};

struct MembraneSet {
    double m0 = 1.0;
    std::vector<std::pair<double, double>> inner; // retained, same convention as spec
    double gamma_top = 1.0;
    std::vector<std::pair<double, double>> outer;
    double gammabar_bottom = 1.0;
    TruncationNote truncation_note;

    // Flattened geometry: boundaries = inner radii, m0, outer radii (ascending);
    // weights has one entry per open annulus, boundaries.size() + 1 of them.
    std::vector<double> boundaries;
    std::vector<double> weights;
    std::size_t m0_index = 0;

    // Tail diagnostics, meaningful only for generator-built sets. The inner
    // limit is the estimated weight limit at the 0-accumulation; it is 0 with
    // converged=false when the family still decays at the enumeration floor.
    bool from_generator = false;
    double inner_limit_weight = -1.0;
    bool inner_limit_converged = true;

    double phi_min() const;
    double phi_max() const;
};

/**
 * Validate and assemble a membrane set. Radii must be strictly increasing and
 * inside their side's interval, weights positive. Membranes whose skew
 * coefficient magnitude falls below truncation_tolerance are dropped and
 * accounted for in truncation_note. Analytic families whose weight increments
 * stop decaying toward an accumulation point (so the increment sum cannot
 * converge) raise HypothesisError.
 */
MembraneSet build_membranes(const MembraneSpec& spec);

/**
 * Piecewise-constant weight at radius r: the annulus weight strictly inside
 * an annulus, the average of the two adjacent annulus weights exactly on a
 * membrane radius.
 */
double phi(const MembraneSet& ms, double r);

struct H1Report {
    double increment_sum_inner = 0.0; // retained inner |weight jumps|, m0 jump excluded
    double increment_sum_outer = 0.0;
    double truncated_tail = 0.0;      // dropped |weight jumps| from truncation
    std::vector<double> probe_radii;
    std::vector<double> delta;        // inf of phi over B_r per probe
    bool pass = false;
    std::string note;
};

/**
 * Summability and local-positivity diagnostics: finite increment sums plus
 * delta_r = inf of phi over B_r for each probe. For generator-built sets the
 * infimum includes the estimated weight limit at the inner accumulation
 * point (see MembraneSet tail fields); a non-converged limit reports 0.
 */
H1Report check_h1(const MembraneSet& ms, const std::vector<double>& probe_radii);

} // namespace skewsim

#endif
