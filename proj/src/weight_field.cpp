#include "skewsim/weight_field.hpp"

#include <cmath>

#include "skewsim/errors.hpp"
#include "skewsim/rng.hpp"

namespace skewsim {

double WeightField::psi(const Vec& x) const {
    return density.rho(x) * phi(membranes, norm(x));
}

double WeightField::psi_radial(double r) const {
    if (!radial()) throw UsageError("psi_radial: density has no radial profile");
    const double g = density.radial()->value(r);
    if (!std::isfinite(g) || g <= 0.0)
        throw HypothesisError("density is not positive at a sampled radius");
    return g * phi(membranes, r);
}

namespace {

// Averages of f over an origin-centered ball for a radial integrand,
// segmented at the membrane radii inside the ball.
double radial_ball_average(const WeightField& wf,
                           const std::function<double(double)>& f, double radius,
                           int nodes) {
    const int d = wf.dim();
    std::vector<double> cuts{0.0};
    for (double b : wf.membranes.boundaries)
        if (b < radius) cuts.push_back(b);
    cuts.push_back(radius);
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        integral += radial_volume_integral(f, d, cuts[i], cuts[i + 1], nodes);
    const double volume = unit_sphere_area(d) / d * std::pow(radius, d);
    return integral / volume;
}

double ball_ratio(const WeightField& wf, const Ball& ball, const QuadratureConfig& qc,
                  std::uint64_t ball_index) {
    const bool centered = norm(ball.center) == 0.0;
    if (centered && wf.radial()) {
        const auto psi = [&](double r) { return wf.psi_radial(r); };
        const auto inv = [&](double r) { return 1.0 / wf.psi_radial(r); };
        return radial_ball_average(wf, psi, ball.radius, qc.radial_nodes) *
               radial_ball_average(wf, inv, ball.radius, qc.radial_nodes);
    }
    // Uniform sampling in the ball; deterministic per (seed, ball index).
    const int d = wf.dim();
    Rng rng(qc.mc_seed, ball_index);
    Vec x(d);
    double s = 0.0, si = 0.0;
    for (std::size_t k = 0; k < qc.mc_samples; ++k) {
        double n2 = 0.0;
        for (int i = 0; i < d; ++i) {
            x[i] = rng.normal();
            n2 += x[i] * x[i];
        }
        const double r = ball.radius * std::pow(rng.uniform(), 1.0 / d) / std::sqrt(n2);
        for (int i = 0; i < d; ++i) x[i] = ball.center[i] + r * x[i];
        const double v = wf.psi(x);
        s += v;
        si += 1.0 / v;
    }
    const double n = static_cast<double>(qc.mc_samples);
    return (s / n) * (si / n);
}

} // namespace

A2Report a2_estimate(const WeightField& wf, const std::vector<Ball>& balls,
                     const QuadratureConfig& qc) {
    if (balls.empty()) throw UsageError("a2_estimate: need at least one ball");
    A2Report rep;
    rep.per_ball.reserve(balls.size());
    for (std::size_t i = 0; i < balls.size(); ++i) {
        const Ball& b = balls[i];
        if (!(b.radius > 0.0)) throw UsageError("a2_estimate: ball radius must be positive");
        if (static_cast<int>(b.center.size()) != wf.dim())
            throw UsageError("a2_estimate: ball center has the wrong dimension");
        const double ratio = ball_ratio(wf, b, qc, i);
        rep.per_ball.push_back(ratio);
        if (ratio > rep.sup_ratio) {
            rep.sup_ratio = ratio;
            rep.worst_ball = i;
        }
    }
    // Refinement probe on the worst ball: a diverging average keeps growing
    // as nodes move toward the singularity.
    const double refined =
        ball_ratio(wf, balls[rep.worst_ball], qc.refined(2), rep.worst_ball);
    rep.refinement_growth = refined / rep.sup_ratio;
    rep.converged = rep.refinement_growth < 1.02;
    return rep;
}

} // namespace skewsim
