#ifndef SKEWSIM_TEST_FUNCTIONS_HPP
#define SKEWSIM_TEST_FUNCTIONS_HPP

#include <functional>
#include <string>

#include "skewsim/vec.hpp"

namespace skewsim {

/** Smooth test function with hand-written derivatives. */
struct SmoothField {
    std::string name;
    double support_radius = 0.0; // 0 = not compactly supported
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    std::function<double(const Vec&)> laplacian;
};

/** exp(1 - 1/(1 - |x/R|^2)) inside |x| < R, zero outside; C^infinity. */
SmoothField bump_field(int dim, double radius);

/** Radial cutoff: 1 on [0, inner], exp-smoothstep down to 0 at outer. */
SmoothField plateau_field(int dim, double inner, double outer);

/** x_axis times the bump; breaks radial symmetry. */
SmoothField coordinate_bump_field(int dim, double radius, int axis);

} // namespace skewsim

#endif
