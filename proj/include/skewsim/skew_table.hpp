#ifndef SKEWSIM_SKEW_TABLE_HPP
#define SKEWSIM_SKEW_TABLE_HPP

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "skewsim/membranes.hpp"

namespace skewsim {

struct SkewEntry {
    double radius = 0.0;
    double gamma_left = 1.0;  // annulus weight just inside
    double gamma_right = 1.0; // annulus weight just outside
    double alpha = 0.5;       // gamma_right / (gamma_right + gamma_left)
    double coeff = 0.0;       // 2 alpha - 1 = (gamma_right - gamma_left) / (sum)
    double revuz_weight = 1.0;// (gamma_right + gamma_left) / 2
};

struct SkewTable {
    std::vector<SkewEntry> entries; // ascending radius; always contains m0
    std::size_t m0_index = 0;

    const SkewEntry* find(double radius) const;
};

/** Outward excursion probability for a weight pair. */
double skew_alpha(double gamma_left, double gamma_right);

/** One entry per retained membrane plus the m0 entry. */
SkewTable skew_coefficients(const MembraneSet& ms);

/** CSV columns: radius,alpha,coeff,revuz_weight (17 significant digits). */
void write_csv(const SkewTable& table, std::ostream& os);

} // namespace skewsim

#endif
