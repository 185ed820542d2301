#ifndef SKEWSIM_ANALYSIS_HPP
#define SKEWSIM_ANALYSIS_HPP

#include <vector>

#include "skewsim/quadrature.hpp"
#include "skewsim/test_functions.hpp"
#include "skewsim/weight_field.hpp"

namespace skewsim {

struct QuadValue {
    double value = 0.0;
    double abs_error = 0.0; // refinement difference, or MC standard error
};

/**
 * (1/2) int grad f . grad g  rho phi dx, annulus by annulus (product rule in
 * d = 3, Monte Carlo fallback above). Both fields must be compactly
 * supported; vanishing outside the stated support is spot-checked.
 */
QuadValue dirichlet_form(const SmoothField& f, const SmoothField& g, const WeightField& wf,
                         const QuadratureConfig& qc);

struct IbpReport {
    double lhs = 0.0;          // -dirichlet_form(f, g)
    double volume_term = 0.0;  // int (Lf) g rho phi dx
    double surface_term = 0.0; // sum over membranes of (gamma_out - gamma_in)/2 x flux
    double residual_abs = 0.0;
    double residual_rel = 0.0;
    double error_budget = 0.0; // quadrature refinement diff + dropped-tail allowance
};

/**
 * Integration-by-parts residual: lhs = -E(f, g) against the volume term with
 * drift (grad rho)/(2 rho) plus one surface term per retained membrane with
 * coefficient (gamma_outside - gamma_inside)/2. The truncated tail's weight
 * increment enters the error budget, not the residual.
 */
IbpReport ibp_residual(const SmoothField& f, const SmoothField& g, const WeightField& wf,
                       const QuadratureConfig& qc);

struct TraceReport {
    double lhs = 0.0;      // int_{boundary of B_l} |f| rho dsigma
    double rhs = 0.0;      // C(l) (energy + mass)^{1/2}
    double constant = 0.0; // C(l) = sqrt(8/delta_l) (rho(B_l)^{1/2} + |grad sqrt(rho)|_{L2})
    double delta = 0.0;    // inf of phi over B_l
    bool pass = false;     // lhs <= rhs, the inequality exactly as stated
};

/**
 * Literal check of the boundary-trace bound with its explicit constant.
 * delta_l comes from the membrane positivity diagnostic; a zero delta (weight
 * limit not converged) leaves the constant undefined and raises
 * HypothesisError.
 */
TraceReport trace_inequality_check(const SmoothField& f, double l, const WeightField& wf,
                                   const QuadratureConfig& qc);

/** Integral of psi = rho phi over the annulus lo < |x| < hi. */
QuadValue psi_annulus_mass(const WeightField& wf, double lo, double hi,
                           const QuadratureConfig& qc);

struct GrowthReport {
    std::vector<double> r_grid;
    std::vector<double> volumes;    // psi dx (B_r)
    double alpha_full = 0.0;        // log-log slope over the whole grid
    double alpha_tail = 0.0;        // slope over the top decade (the diagnostic one)
    bool conservative = false;      // finite fitted exponent => heuristic PASS
    bool recurrent = false;         // alpha_tail <= 2 => heuristic PASS
};

/**
 * Volume growth of psi dx(B_r) on the grid with fitted log-log exponents.
 * Divergence of the integral criteria is reported as an exponent heuristic,
 * never as a proof.
 */
GrowthReport growth_criteria(const WeightField& wf, const std::vector<double>& r_grid,
                             const QuadratureConfig& qc = QuadratureConfig{});

} // namespace skewsim

#endif
