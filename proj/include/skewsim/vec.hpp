#ifndef SKEWSIM_VEC_HPP
#define SKEWSIM_VEC_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace skewsim {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

} // namespace skewsim

#endif
