#ifndef SKEWSIM_WEIGHT_FIELD_HPP
#define SKEWSIM_WEIGHT_FIELD_HPP

#include <vector>

#include "skewsim/density.hpp"
#include "skewsim/membranes.hpp"
#include "skewsim/quadrature.hpp"

namespace skewsim {

/** The simulated weight psi = rho * phi. */
struct WeightField {
    MembraneSet membranes;
    DensityModel density;

    int dim() const { return density.dim(); }
    bool radial() const { return density.radial().has_value(); }

    double psi(const Vec& x) const;
    double psi_radial(double r) const; // requires a radial density
};

struct Ball {
    Vec center;
    double radius = 1.0;
};

struct A2Report {
    double sup_ratio = 0.0;          // max over balls of (avg psi)(avg 1/psi)
    std::size_t worst_ball = 0;
    std::vector<double> per_ball;
    bool converged = true;           // worst ratio stable under node refinement
    double refinement_growth = 1.0;  // worst ratio at refined nodes / coarse
};

/**
 * Muckenhoupt-style diagnostic: per ball the product of the psi average and
 * the 1/psi average. Origin-centered balls with a radial density use exact
 * membrane-segmented radial quadrature; other balls use deterministic Monte
 * Carlo sampling. Diagnostic only; a growing ratio under refinement flags a
 * non-integrable psi or 1/psi.
 */
A2Report a2_estimate(const WeightField& wf, const std::vector<Ball>& balls,
                     const QuadratureConfig& qc);

} // namespace skewsim

#endif
