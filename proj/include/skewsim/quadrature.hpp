#ifndef SKEWSIM_QUADRATURE_HPP
#define SKEWSIM_QUADRATURE_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "skewsim/vec.hpp"

namespace skewsim {

struct QuadratureConfig {
    int radial_nodes = 64;   // Gauss-Legendre nodes per radial segment
    int polar_nodes = 32;    // Gauss-Legendre nodes in cos(theta)
    int azimuth_nodes = 64;  // uniform nodes in phi (exact for trig polynomials)
    double abs_tol = 1e-10;  // adaptive 1d quadrature tolerance
    std::size_t mc_samples = 200000; // fallback sample count for d > 3
    std::uint64_t mc_seed = 914237;

    QuadratureConfig refined(int factor = 2) const {
        QuadratureConfig q = *this;
        q.radial_nodes *= factor;
        q.polar_nodes *= factor;
        q.azimuth_nodes *= factor;
        q.mc_samples *= static_cast<std::size_t>(factor);
        return q;
    }
};

struct GlRule {
    std::vector<double> x; // nodes on [-1,1], ascending
    std::vector<double> w;
};

/** Cached Gauss-Legendre rule with n nodes (Newton on the Legendre recurrence). */
const GlRule& gauss_legendre(int n);

double gl_integrate(const std::function<double(double)>& f, double a, double b, int n);

/**
 * Adaptive composite Gauss quadrature on [a,b] with absolute tolerance.
 * Bisects where a 10-node and a 21-node estimate disagree. Throws
 * EvaluationError when the recursion depth is exhausted without convergence
 * or the integrand evaluates to a non-finite value (non-integrable input).
 */
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth = 26);

/** Surface area of the unit sphere in R^d. */
double unit_sphere_area(int dim);

/**
 * Surface integral over the sphere of given radius in R^3:
 * Gauss-Legendre in the polar cosine x uniform azimuth grid.
 */
double sphere_integral(const std::function<double(const Vec&)>& f, double radius,
                       const QuadratureConfig& qc);

/** Volume integral of a radial integrand g(r) over {r_lo < |x| < r_hi} in R^d. */
double radial_volume_integral(const std::function<double(double)>& g, int dim,
                              double r_lo, double r_hi, int nodes);

/**
 * Volume integral of a general integrand over the annulus {r_lo < |x| < r_hi}
 * in R^3 (radial Gauss x sphere rule). Segment at weight discontinuities by
 * calling once per segment.
 */
double annulus_integral(const std::function<double(const Vec&)>& f,
                        double r_lo, double r_hi, const QuadratureConfig& qc);

struct McEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

/** Monte Carlo annulus integral for d > 3 (or as a cross-check); deterministic seed. */
McEstimate annulus_integral_mc(const std::function<double(const Vec&)>& f, int dim,
                               double r_lo, double r_hi, const QuadratureConfig& qc);

} // namespace skewsim

#endif
