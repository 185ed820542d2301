#ifndef SKEWSIM_ENSEMBLE_HPP
#define SKEWSIM_ENSEMBLE_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "skewsim/vec.hpp"

namespace skewsim {

/**
 * Simulated paths in struct-of-arrays form. All per-path series are stored
 * flattened with the path index slowest, so writers fill disjoint slices and
 * the result is independent of how paths were assigned to workers.
 */
struct PathEnsemble {
    int dim = 1; // 1 for radial and line paths
    std::size_t n_paths = 0;
    double step = 0.0;
    double shell_eps = 0.0;
    std::string scheme;

    std::vector<double> times;             // stored time grid (shared by all paths)
    std::vector<std::size_t> stored_steps; // step index of each stored slot
    std::vector<double> positions;         // [path][slot][dim]

    std::vector<double> tracked_radii;     // local-time levels
    std::vector<double> local_time;        // [path][slot][level], running estimator
    std::vector<long long> crossings;      // [path][level], signed grid-step crossings

    std::vector<std::pair<double, double>> occupation_bands;
    std::vector<double> occupation;        // [path][band], time spent in band

    std::vector<double> increments;        // optional [path][step][dim] driving increments
    std::vector<std::uint8_t> absorbed;    // per path: parked at 0 (Absorb policy)

    std::size_t n_stored() const { return times.size(); }

    double position(std::size_t path, std::size_t slot, int j) const {
        return positions[(path * n_stored() + slot) * dim + j];
    }

    double radius(std::size_t path, std::size_t slot) const {
        if (dim == 1) return position(path, slot, 0);
        double s = 0.0;
        for (int j = 0; j < dim; ++j) {
            const double v = position(path, slot, j);
            s += v * v;
        }
        return std::sqrt(s);
    }

    double local_time_value(std::size_t path, std::size_t slot, std::size_t level) const {
        return local_time[(path * n_stored() + slot) * tracked_radii.size() + level];
    }

    std::vector<double> final_radii() const;
    std::vector<double> final_positions() const; // flattened n_paths x dim
    std::vector<double> local_time_series(std::size_t path, double level_radius) const;
};

} // namespace skewsim

#endif
