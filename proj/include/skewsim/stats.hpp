#ifndef SKEWSIM_STATS_HPP
#define SKEWSIM_STATS_HPP

#include <cstddef>
#include <vector>

#include "skewsim/rng.hpp"
#include "skewsim/vec.hpp"

namespace skewsim {

/** Tail of the Kolmogorov distribution: Q(z) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 z^2). */
double kolmogorov_q(double z);

struct Ks2Result {
    double d_stat = 0.0;
    double p_value = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

/**
 * Two-sample Kolmogorov-Smirnov test. Asymptotic p-value with the standard
 * small-sample correction z = (sqrt(ne) + 0.12 + 0.11/sqrt(ne)) * D,
 * ne = n1 n2 / (n1 + n2).
 */
Ks2Result ks_two_sample(std::vector<double> a, std::vector<double> b);

/** Regularized upper incomplete gamma Q(a,x); series/continued-fraction split. */
double gamma_q(double a, double x);

/** Chi-square survival function with df degrees of freedom. */
double chi2_sf(double x, int df);

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

MeanStderr mean_stderr(const std::vector<double>& xs);

/**
 * Per-component Silverman bandwidths for a d-dimensional Gaussian product
 * kernel: h_j = sigma_j (4/(d+2))^{1/(d+4)} n^{-1/(d+4)}.
 * data is flattened row-major, n rows of dim entries.
 */
Vec silverman_bandwidth(const std::vector<double>& data, std::size_t n, int dim);

/** Gaussian product-kernel density estimate at a point. */
double kde_at(const std::vector<double>& data, std::size_t n, int dim,
              const Vec& point, const Vec& bandwidth);

/**
 * Per-sample kernel weights at a point (kde_at is their mean); lets a
 * bootstrap resample the weights instead of re-evaluating kernels.
 */
std::vector<double> kde_weights(const std::vector<double>& data, std::size_t n, int dim,
                                const Vec& point, const Vec& bandwidth);

/** Stderr of the mean of xs under resampling with replacement (B resamples). */
double bootstrap_mean_stderr(const std::vector<double>& xs, int b_resamples, Rng& rng);

} // namespace skewsim

#endif
