#include "skewsim/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "skewsim/errors.hpp"
#include "skewsim/rng.hpp"

namespace skewsim {

namespace {

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    p = (n == 0) ? 1.0 : (n == 1 ? x : p1);
    dp = (n == 0) ? 0.0 : n * (x * p - p0) / (x * x - 1.0);
    if (n == 1) dp = 1.0;
}

GlRule build_rule(int n) {
    GlRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev-type initial guess, then Newton.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double p = 0.0, dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            legendre(n, x, p, dp);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        legendre(n, x, p, dp);
        rule.x[n - 1 - i] = x; // ascending order
        rule.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

} // namespace

const GlRule& gauss_legendre(int n) {
    if (n < 1) throw UsageError("gauss_legendre: node count must be positive");
    static std::map<int, GlRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

double gl_integrate(const std::function<double(double)>& f, double a, double b, int n) {
    const GlRule& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += rule.w[i] * f(mid + half * rule.x[i]);
    return s * half;
}

namespace {

double adaptive_rec(const std::function<double(double)>& f, double a, double b,
                    double tol, int depth, int max_depth) {
    const double coarse = gl_integrate(f, a, b, 10);
    const double fine = gl_integrate(f, a, b, 21);
    if (!std::isfinite(fine) || !std::isfinite(coarse))
        throw EvaluationError("adaptive quadrature: integrand is not finite on the interval");
    if (std::abs(fine - coarse) <= tol) return fine;
    if (depth >= max_depth)
        throw EvaluationError("adaptive quadrature: tolerance not reached (integrand may not be integrable)");
    const double mid = 0.5 * (a + b);
    return adaptive_rec(f, a, mid, 0.5 * tol, depth + 1, max_depth) +
           adaptive_rec(f, mid, b, 0.5 * tol, depth + 1, max_depth);
}

} // namespace

double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    if (a > b) return -adaptive_integrate(f, b, a, abs_tol, max_depth);
    return adaptive_rec(f, a, b, abs_tol, 0, max_depth);
}

double unit_sphere_area(int dim) {
    if (dim < 1) throw UsageError("unit_sphere_area: dim must be >= 1");
    return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

double sphere_integral(const std::function<double(const Vec&)>& f, double radius,
                       const QuadratureConfig& qc) {
    const GlRule& polar = gauss_legendre(qc.polar_nodes);
    const int m = qc.azimuth_nodes;
    const double dphi = 2.0 * std::numbers::pi / m;
    Vec x(3);
    double s = 0.0;
    for (int i = 0; i < qc.polar_nodes; ++i) {
        const double u = polar.x[i]; // cos(theta)
        const double st = std::sqrt(std::max(0.0, 1.0 - u * u));
        double ring = 0.0;
        for (int j = 0; j < m; ++j) {
            const double phi = (j + 0.5) * dphi;
            x[0] = radius * st * std::cos(phi);
            x[1] = radius * st * std::sin(phi);
            x[2] = radius * u;
            ring += f(x);
        }
        s += polar.w[i] * ring * dphi;
    }
    return s * radius * radius;
}

double radial_volume_integral(const std::function<double(double)>& g, int dim,
                              double r_lo, double r_hi, int nodes) {
    const double area = unit_sphere_area(dim);
    return gl_integrate([&](double r) { return g(r) * std::pow(r, dim - 1) * area; },
                        r_lo, r_hi, nodes);
}

double annulus_integral(const std::function<double(const Vec&)>& f,
                        double r_lo, double r_hi, const QuadratureConfig& qc) {
    // d = 3 product rule; sphere_integral already carries the r^2 factor.
    return gl_integrate([&](double r) { return sphere_integral(f, r, qc); },
                        r_lo, r_hi, qc.radial_nodes);
}

McEstimate annulus_integral_mc(const std::function<double(const Vec&)>& f, int dim,
                               double r_lo, double r_hi, const QuadratureConfig& qc) {
    if (dim < 1) throw UsageError("annulus_integral_mc: dim must be >= 1");
    Rng rng(qc.mc_seed, 0);
    const double lo_d = std::pow(r_lo, dim);
    const double hi_d = std::pow(r_hi, dim);
    const double volume = unit_sphere_area(dim) / dim * (hi_d - lo_d);
    Vec x(dim);
    double sum = 0.0, sum2 = 0.0;
    const std::size_t n = qc.mc_samples;
    for (std::size_t k = 0; k < n; ++k) {
        // Direction from a normalized Gaussian, radius from the r^{d-1} law.
        double nrm2 = 0.0;
        for (int i = 0; i < dim; ++i) {
            x[i] = rng.normal();
            nrm2 += x[i] * x[i];
        }
        const double nrm = std::sqrt(nrm2);
        const double r = std::pow(lo_d + rng.uniform() * (hi_d - lo_d), 1.0 / dim);
        for (int i = 0; i < dim; ++i) x[i] *= r / nrm;
        const double v = f(x);
        sum += v;
        sum2 += v * v;
    }
    McEstimate est;
    est.value = volume * sum / static_cast<double>(n);
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, sum2 / static_cast<double>(n) - mean * mean);
    est.stderr_ = volume * std::sqrt(var / static_cast<double>(n));
    return est;
}

} // namespace skewsim
