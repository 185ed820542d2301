#ifndef SKEWSIM_DENSITY_HPP
#define SKEWSIM_DENSITY_HPP

#include <functional>
#include <optional>
#include <string>

#include "skewsim/vec.hpp"

namespace skewsim {

/** Radial profile g with rho(x) = g(|x|); deriv is g'. */
struct RadialProfile {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
};

/**
 * Strictly positive density with a gradient. Gradient resolution order:
 * explicit vector gradient, then the radial profile (g'(r) x / r), then a
 * central finite difference with step 1e-5 (1 + |x|), flagged on the model.
 */
class DensityModel {
public:
    DensityModel(int dim, std::string name,
                 std::function<double(const Vec&)> rho,
                 std::function<Vec(const Vec&)> grad = nullptr,
                 std::optional<RadialProfile> radial = std::nullopt);

    static DensityModel constant(int dim, double c = 1.0);
    static DensityModel gaussian(int dim, double a);      // exp(-a |x|^2), a > 0
    static DensityModel inverse_power(int dim, double b); // (1 + |x|^2)^{-b/2}
    static DensityModel pure_power(int dim, double b);    // |x|^b, -dim < b < dim

    int dim() const { return dim_; }
    const std::string& name() const { return name_; }

    double rho(const Vec& x) const; // throws HypothesisError on rho <= 0
    Vec grad_rho(const Vec& x) const;
    Vec drift_ac(const Vec& x) const; // grad rho / (2 rho)

    /** Allocation-free drift for stepping loops; x and out have dim entries. */
    void drift_ac_into(const double* x, double* out) const;

    bool gradient_is_fd() const { return gradient_is_fd_; }
    bool zero_drift() const { return zero_drift_; }
    const std::optional<RadialProfile>& radial() const { return radial_; }

private:
    int dim_;
    std::string name_;
    std::function<double(const Vec&)> rho_;
    std::function<Vec(const Vec&)> grad_;
    std::optional<RadialProfile> radial_;
    bool gradient_is_fd_ = false;
    bool zero_drift_ = false;
};

} // namespace skewsim

#endif
