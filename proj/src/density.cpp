#include "skewsim/density.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "skewsim/errors.hpp"

namespace skewsim {

DensityModel::DensityModel(int dim, std::string name,
                           std::function<double(const Vec&)> rho,
                           std::function<Vec(const Vec&)> grad,
                           std::optional<RadialProfile> radial)
    : dim_(dim), name_(std::move(name)), rho_(std::move(rho)),
      grad_(std::move(grad)), radial_(std::move(radial)) {
    if (dim_ < 3) throw ValidationError("density: dim must be >= 3");
    if (!rho_) throw ValidationError("density: rho callable required");
    gradient_is_fd_ = !grad_ && !radial_;
}

double DensityModel::rho(const Vec& x) const {
    const double v = rho_(x);
    if (!std::isfinite(v) || v <= 0.0) {
        std::ostringstream os;
        os << "density '" << name_ << "' is not positive at a sampled point (value " << v << ")";
        throw HypothesisError(os.str());
    }
    return v;
}

Vec DensityModel::grad_rho(const Vec& x) const {
    if (grad_) return grad_(x);
    if (radial_) {
        const double r = norm(x);
        Vec g(x.size(), 0.0);
        if (r < 1e-300) return g; // radial smooth density has vanishing gradient at 0
        const double s = radial_->deriv(r) / r;
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = s * x[i];
        return g;
    }
    // Central finite difference, step scaled by position.
    const double h = 1e-5 * (1.0 + norm(x));
    Vec g(x.size());
    Vec xp = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        const double up = rho(xp);
        xp[i] = x[i] - h;
        const double dn = rho(xp);
        xp[i] = x[i];
        g[i] = (up - dn) / (2.0 * h);
    }
    return g;
}

Vec DensityModel::drift_ac(const Vec& x) const {
    Vec g = grad_rho(x);
    const double r = rho(x);
    for (double& v : g) v /= 2.0 * r;
    return g;
}

void DensityModel::drift_ac_into(const double* x, double* out) const {
    if (zero_drift_) {
        for (int i = 0; i < dim_; ++i) out[i] = 0.0;
        return;
    }
    if (radial_) {
        double r2 = 0.0;
        for (int i = 0; i < dim_; ++i) r2 += x[i] * x[i];
        const double r = std::sqrt(r2);
        if (r < 1e-300) {
            for (int i = 0; i < dim_; ++i) out[i] = 0.0;
            return;
        }
        const double g = radial_->value(r);
        const double s = radial_->deriv(r) / (2.0 * g * r);
        if (!std::isfinite(s))
            throw EvaluationError("density gradient singular at a sampled radius");
        for (int i = 0; i < dim_; ++i) out[i] = s * x[i];
        return;
    }
    Vec xv(x, x + dim_);
    Vec d = drift_ac(xv);
    for (int i = 0; i < dim_; ++i) out[i] = d[i];
}

DensityModel DensityModel::constant(int dim, double c) {
    if (!(c > 0.0)) throw ValidationError("constant density must be positive");
    RadialProfile rp{[c](double) { return c; }, [](double) { return 0.0; }};
    DensityModel dm(dim, "constant", [c](const Vec&) { return c; }, nullptr, rp);
    dm.zero_drift_ = true;
    return dm;
}

DensityModel DensityModel::gaussian(int dim, double a) {
    if (!(a > 0.0)) throw ValidationError("gaussian density needs a > 0");
    RadialProfile rp{[a](double r) { return std::exp(-a * r * r); },
                     [a](double r) { return -2.0 * a * r * std::exp(-a * r * r); }};
    return DensityModel(
        dim, "gaussian",
        [a](const Vec& x) { return std::exp(-a * dot(x, x)); }, nullptr, rp);
}

DensityModel DensityModel::inverse_power(int dim, double b) {
    if (!std::isfinite(b)) throw ValidationError("inverse_power exponent must be finite");
    RadialProfile rp{
        [b](double r) { return std::pow(1.0 + r * r, -0.5 * b); },
        [b](double r) { return -b * r * std::pow(1.0 + r * r, -0.5 * b - 1.0); }};
    return DensityModel(
        dim, "inverse_power",
        [b](const Vec& x) { return std::pow(1.0 + dot(x, x), -0.5 * b); }, nullptr, rp);
}

DensityModel DensityModel::pure_power(int dim, double b) {
    // -dim < b < dim keeps rho and 1/rho locally integrable.
    if (!(b > -dim && b < dim))
        throw ValidationError("pure_power exponent must satisfy -dim < b < dim");
    RadialProfile rp{[b](double r) { return std::pow(r, b); },
                     [b](double r) { return b * std::pow(r, b - 1.0); }};
    return DensityModel(
        dim, "pure_power",
        [b](const Vec& x) { return std::pow(norm(x), b); }, nullptr, rp);
}

} // namespace skewsim
