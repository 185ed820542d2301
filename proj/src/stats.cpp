#include "skewsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "skewsim/errors.hpp"

namespace skewsim {

double kolmogorov_q(double z) {
    if (z <= 0.0) return 1.0;
    if (z < 0.2) return 1.0; // series converges to 1 from below; avoid cancellation
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * z * z);
        sum += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

Ks2Result ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw UsageError("ks_two_sample: both samples must be non-empty");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t n1 = a.size(), n2 = b.size();
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < n1 && j < n2) {
        const double x = std::min(a[i], b[j]);
        while (i < n1 && a[i] <= x) ++i;
        while (j < n2 && b[j] <= x) ++j;
        const double f1 = static_cast<double>(i) / static_cast<double>(n1);
        const double f2 = static_cast<double>(j) / static_cast<double>(n2);
        d = std::max(d, std::abs(f1 - f2));
    }
    const double ne = static_cast<double>(n1) * static_cast<double>(n2) /
                      static_cast<double>(n1 + n2);
    const double z = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    Ks2Result r;
    r.d_stat = d;
    r.p_value = kolmogorov_q(z);
    r.n1 = n1;
    r.n2 = n2;
    return r;
}

namespace {

// Regularized incomplete gamma, split as in Numerical Recipes: series for
// x < a + 1, Lentz continued fraction otherwise.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw UsageError("gamma_q: need a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi2_sf(double x, int df) {
    if (df < 1) throw UsageError("chi2_sf: df must be >= 1");
    if (x <= 0.0) return 1.0;
    return gamma_q(0.5 * df, 0.5 * x);
}

MeanStderr mean_stderr(const std::vector<double>& xs) {
    MeanStderr r;
    r.n = xs.size();
    if (xs.empty()) return r;
    double s = 0.0;
    for (double v : xs) s += v;
    r.mean = s / static_cast<double>(xs.size());
    double q = 0.0;
    for (double v : xs) q += (v - r.mean) * (v - r.mean);
    if (xs.size() > 1)
        r.stderr_ = std::sqrt(q / (static_cast<double>(xs.size() - 1) *
                                   static_cast<double>(xs.size())));
    return r;
}

Vec silverman_bandwidth(const std::vector<double>& data, std::size_t n, int dim) {
    if (n < 2 || dim < 1 || data.size() != n * static_cast<std::size_t>(dim))
        throw UsageError("silverman_bandwidth: bad sample shape");
    Vec h(dim);
    const double factor = std::pow(4.0 / (dim + 2.0), 1.0 / (dim + 4.0)) *
                          std::pow(static_cast<double>(n), -1.0 / (dim + 4.0));
    for (int j = 0; j < dim; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += data[i * dim + j];
        mean /= static_cast<double>(n);
        double q = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = data[i * dim + j] - mean;
            q += c * c;
        }
        const double sigma = std::sqrt(q / static_cast<double>(n - 1));
        h[j] = sigma * factor;
        if (h[j] <= 0.0) throw EvaluationError("silverman_bandwidth: degenerate component");
    }
    return h;
}

std::vector<double> kde_weights(const std::vector<double>& data, std::size_t n, int dim,
                                const Vec& point, const Vec& bandwidth) {
    std::vector<double> w(n);
    double norm_c = 1.0;
    for (int j = 0; j < dim; ++j)
        norm_c /= bandwidth[j] * std::sqrt(2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < n; ++i) {
        double e = 0.0;
        for (int j = 0; j < dim; ++j) {
            const double z = (data[i * dim + j] - point[j]) / bandwidth[j];
            e += z * z;
        }
        w[i] = norm_c * std::exp(-0.5 * e);
    }
    return w;
}

double kde_at(const std::vector<double>& data, std::size_t n, int dim,
              const Vec& point, const Vec& bandwidth) {
    const std::vector<double> w = kde_weights(data, n, dim, point, bandwidth);
    double s = 0.0;
    for (double v : w) s += v;
    return s / static_cast<double>(n);
}

double bootstrap_mean_stderr(const std::vector<double>& xs, int b_resamples, Rng& rng) {
    if (xs.empty() || b_resamples < 2)
        throw UsageError("bootstrap_mean_stderr: need data and >= 2 resamples");
    const std::size_t n = xs.size();
    std::vector<double> means;
    means.reserve(b_resamples);
    for (int b = 0; b < b_resamples; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += xs[rng.below(n)];
        means.push_back(s / static_cast<double>(n));
    }
    double m = 0.0;
    for (double v : means) m += v;
    m /= means.size();
    double q = 0.0;
    for (double v : means) q += (v - m) * (v - m);
    return std::sqrt(q / (means.size() - 1.0));
}

} // namespace skewsim
