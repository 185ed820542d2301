#include "skewsim/skew_table.hpp"

#include <cstdio>
#include <ostream>

#include "skewsim/errors.hpp"

namespace skewsim {

double skew_alpha(double gamma_left, double gamma_right) {
    if (!(gamma_left > 0.0) || !(gamma_right > 0.0))
        throw ValidationError("skew_alpha: weights must be positive");
    return gamma_right / (gamma_right + gamma_left);
}

const SkewEntry* SkewTable::find(double radius) const {
    for (const SkewEntry& e : entries)
        if (e.radius == radius) return &e;
    return nullptr;
}

SkewTable skew_coefficients(const MembraneSet& ms) {
    SkewTable table;
    table.entries.reserve(ms.boundaries.size());
    for (std::size_t i = 0; i < ms.boundaries.size(); ++i) {
        SkewEntry e;
        e.radius = ms.boundaries[i];
        e.gamma_left = ms.weights[i];
        e.gamma_right = ms.weights[i + 1];
        e.alpha = skew_alpha(e.gamma_left, e.gamma_right);
        e.coeff = 2.0 * e.alpha - 1.0;
        e.revuz_weight = 0.5 * (e.gamma_right + e.gamma_left);
        if (i == ms.m0_index) table.m0_index = table.entries.size();
        table.entries.push_back(e);
    }
    return table;
}

void write_csv(const SkewTable& table, std::ostream& os) {
    os << "radius,alpha,coeff,revuz_weight\n";
    char buf[160];
    for (const SkewEntry& e : table.entries) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n",
                      e.radius, e.alpha, e.coeff, e.revuz_weight);
        os << buf;
    }
}

} // namespace skewsim
