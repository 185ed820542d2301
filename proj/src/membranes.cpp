#include "skewsim/membranes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "skewsim/errors.hpp"

namespace skewsim {

namespace {

std::vector<std::pair<double, double>> materialize(const FamilySide& fam) {
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(fam.k_hi - fam.k_lo + 1));
    for (long k = fam.k_lo; k <= fam.k_hi; ++k)
        out.emplace_back(fam.radius(k), fam.weight(k));
    return out;
}

void validate_side(const std::vector<std::pair<double, double>>& side,
                   double lo, double hi, const char* label) {
    double prev = lo;
    for (const auto& [r, g] : side) {
        if (!std::isfinite(r) || r <= prev) {
            std::ostringstream os;
            os << label << " radii must be strictly increasing inside ("
               << lo << ", " << (std::isfinite(hi) ? std::to_string(hi) : "inf")
               << "); offending radius " << r;
            throw ValidationError(os.str());
        }
        if (std::isfinite(hi) && r >= hi) {
            std::ostringstream os;
            os << label << " radius " << r << " is not below " << hi;
            throw ValidationError(os.str());
        }
        if (!std::isfinite(g) || g <= 0.0) {
            std::ostringstream os;
            os << label << " weight at radius " << r << " must be positive, got " << g;
            throw ValidationError(os.str());
        }
        prev = r;
    }
}

double mean_abs_step(const std::function<double(long)>& f, long k_from, long k_to) {
    // mean |f(k+1)-f(k)| over [k_from, k_to); assumes k_from < k_to
    double s = 0.0;
    for (long k = k_from; k < k_to; ++k) s += std::abs(f(k + 1) - f(k));
    return s / static_cast<double>(k_to - k_from);
}

// An end of the index range is an accumulation end when the radius gaps keep
// shrinking toward it. Only there does summability constrain the weights.
bool accumulating_end(const FamilySide& fam, bool high_end) {
    const long span = fam.k_hi - fam.k_lo;
    if (span < 8) return false;
    const long mid = fam.k_lo + span / 2;
    const double gap_mid = mean_abs_step(fam.radius, mid - 2, mid + 2);
    const double gap_end = high_end ? mean_abs_step(fam.radius, fam.k_hi - 4, fam.k_hi)
                                    : mean_abs_step(fam.radius, fam.k_lo, fam.k_lo + 4);
    return gap_end < 0.25 * gap_mid;
}

// Weight increments must decay toward an accumulation end or the increment
// sum cannot converge. Compares the mean |step| in the last window against
// the mean |step| half way out.
void require_increment_decay(const FamilySide& fam, bool high_end, const char* label) {
    const long span = fam.k_hi - fam.k_lo;
    const long mid = fam.k_lo + span / 2;
    const double w_mid = mean_abs_step(fam.weight, mid - 2, mid + 2);
    const double w_end = high_end ? mean_abs_step(fam.weight, fam.k_hi - 4, fam.k_hi)
                                  : mean_abs_step(fam.weight, fam.k_lo, fam.k_lo + 4);
    const double scale = std::abs(fam.weight(mid)) + 1.0;
    if (w_end < 1e-12 * scale) return;
    if (w_end > 0.5 * w_mid) {
        std::ostringstream os;
        os << label << " family: weight increments do not decay toward the "
           << (high_end ? "upper" : "lower")
           << " accumulation point (increment sum diverges)";
        throw HypothesisError(os.str());
    }
}

struct SideResult {
    std::vector<std::pair<double, double>> retained;
    TruncationNote note;
};

// Enumerated family radii collide in floating point near an accumulation
// point once their spacing drops under one ulp; such entries cannot stand as
// distinct membranes. Fold them into the truncation note (same increment
// bookkeeping as truncate_side) before the geometric validation sees them.
// Only near-collisions (within a few ulps of the boundary or the previous
// radius) fold; anything further off stays for validation to reject loudly.
SideResult fold_fp_collisions(std::vector<std::pair<double, double>> pairs, double lo,
                              double hi, double before, double after,
                              bool weight_is_inside) {
    SideResult res;
    constexpr double kUlps = 16.0 * std::numeric_limits<double>::epsilon();
    double prev = lo;
    const std::size_t n = pairs.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double r = pairs[i].first;
        const bool at_hi =
            std::isfinite(hi) && r >= hi && r <= hi + kUlps * std::abs(hi);
        const bool at_prev = std::isfinite(r) && r <= prev &&
                             r >= prev - kUlps * std::max(std::abs(prev), 1.0);
        if (!at_hi && !at_prev) {
            res.retained.push_back(pairs[i]);
            prev = r;
            continue;
        }
        double gl, gr;
        if (weight_is_inside) {
            gl = pairs[i].second;
            gr = (i + 1 < n) ? pairs[i + 1].second : after;
        } else {
            gl = (i == 0) ? before : pairs[i - 1].second;
            gr = pairs[i].second;
        }
        res.note.dropped += 1;
        res.note.dropped_coeff_mass += std::abs((gr - gl) / (gr + gl));
        res.note.dropped_weight_increment += std::abs(gr - gl);
    }
    return res;
}

// Filter by the skew coefficient of consecutive analytic pairs. terminal is
// the weight just beyond the last membrane (gamma_top / the side's limit).
SideResult truncate_side(const std::vector<std::pair<double, double>>& pairs,
                         double before, double after, bool weight_is_inside,
                         double tol) {
    SideResult res;
    const std::size_t n = pairs.size();
    for (std::size_t i = 0; i < n; ++i) {
        double gl, gr;
        if (weight_is_inside) {
            gl = pairs[i].second;
            gr = (i + 1 < n) ? pairs[i + 1].second : after;
        } else {
            gl = (i == 0) ? before : pairs[i - 1].second;
            gr = pairs[i].second;
        }
        const double coeff = (gr - gl) / (gr + gl);
        if (std::abs(coeff) < tol) {
            res.note.dropped += 1;
            res.note.dropped_coeff_mass += std::abs(coeff);
            res.note.dropped_weight_increment += std::abs(gr - gl);
        } else {
            res.retained.push_back(pairs[i]);
        }
    }
    return res;
}

} // namespace

double MembraneSet::phi_min() const {
    return *std::min_element(weights.begin(), weights.end());
}

double MembraneSet::phi_max() const {
    return *std::max_element(weights.begin(), weights.end());
}

MembraneSet build_membranes(const MembraneSpec& spec) {
    if (!std::isfinite(spec.m0) || spec.m0 <= 0.0)
        throw ValidationError("m0 must be positive and finite");
    if (!std::isfinite(spec.gamma_top) || spec.gamma_top <= 0.0)
        throw ValidationError("gamma_top must be positive");
    if (!std::isfinite(spec.gammabar_bottom) || spec.gammabar_bottom <= 0.0)
        throw ValidationError("gammabar_bottom must be positive");
    if (!spec.inner_family.empty() && !spec.inner.empty())
        throw ValidationError("inner membranes given both explicitly and as a family");
    if (!spec.outer_family.empty() && !spec.outer.empty())
        throw ValidationError("outer membranes given both explicitly and as a family");
    if (spec.truncation_tolerance < 0.0)
        throw ValidationError("truncation_tolerance must be >= 0");

    std::vector<std::pair<double, double>> inner =
        spec.inner_family.empty() ? spec.inner : materialize(spec.inner_family);
    std::vector<std::pair<double, double>> outer =
        spec.outer_family.empty() ? spec.outer : materialize(spec.outer_family);

    // Deep family enumerations can outrun double resolution near m0. Explicit
    // pairs never fold: a user-given radius on the boundary is an error.
    TruncationNote fp_note;
    const auto merge = [&fp_note](const TruncationNote& n) {
        fp_note.dropped += n.dropped;
        fp_note.dropped_coeff_mass += n.dropped_coeff_mass;
        fp_note.dropped_weight_increment += n.dropped_weight_increment;
    };
    if (!spec.inner_family.empty()) {
        SideResult folded = fold_fp_collisions(std::move(inner), 0.0, spec.m0, 0.0,
                                               spec.gamma_top, true);
        inner = std::move(folded.retained);
        merge(folded.note);
    }
    if (!spec.outer_family.empty()) {
        SideResult folded = fold_fp_collisions(
            std::move(outer), spec.m0, std::numeric_limits<double>::infinity(),
            spec.gammabar_bottom, 0.0, false);
        outer = std::move(folded.retained);
        merge(folded.note);
    }
    validate_side(inner, 0.0, spec.m0, "inner");
    validate_side(outer, spec.m0, std::numeric_limits<double>::infinity(), "outer");

    MembraneSet ms;
    ms.m0 = spec.m0;
    ms.gamma_top = spec.gamma_top;
    ms.gammabar_bottom = spec.gammabar_bottom;
    ms.from_generator = !spec.inner_family.empty() || !spec.outer_family.empty();

    // Tail checks on analytic families at their accumulation ends.
    if (!spec.inner_family.empty()) {
        const FamilySide& fam = spec.inner_family;
        if (accumulating_end(fam, true)) require_increment_decay(fam, true, "inner");
        if (accumulating_end(fam, false)) {
            require_increment_decay(fam, false, "inner");
            // Weight limit estimate at the 0-accumulation: converged when the
            // value barely moves over the last few indices.
            const double w_end = fam.weight(fam.k_lo);
            const double w_probe = fam.weight(fam.k_lo + 4);
            const double scale = std::max(std::abs(w_end), 1e-12);
            if (std::abs(w_end - w_probe) <= 0.05 * scale) {
                ms.inner_limit_weight = w_end;
                ms.inner_limit_converged = true;
            } else {
                ms.inner_limit_weight = 0.0;
                ms.inner_limit_converged = false;
            }
        }
    }
    if (!spec.outer_family.empty() && accumulating_end(spec.outer_family, false))
        require_increment_decay(spec.outer_family, false, "outer");

    SideResult in_res = truncate_side(inner, 0.0, spec.gamma_top, true,
                                      spec.truncation_tolerance);
    SideResult out_res = truncate_side(outer, spec.gammabar_bottom, 0.0, false,
                                       spec.truncation_tolerance);
    ms.inner = std::move(in_res.retained);
    ms.outer = std::move(out_res.retained);
    ms.truncation_note.dropped = fp_note.dropped + in_res.note.dropped + out_res.note.dropped;
    ms.truncation_note.dropped_coeff_mass = fp_note.dropped_coeff_mass +
                                            in_res.note.dropped_coeff_mass +
                                            out_res.note.dropped_coeff_mass;
    ms.truncation_note.dropped_weight_increment = fp_note.dropped_weight_increment +
                                                  in_res.note.dropped_weight_increment +
                                                  out_res.note.dropped_weight_increment;

    // Flattened geometry. weights[i] is the weight on (boundaries[i-1], boundaries[i])
    // with implicit 0 below and infinity above.
    ms.boundaries.reserve(ms.inner.size() + 1 + ms.outer.size());
    ms.weights.reserve(ms.inner.size() + ms.outer.size() + 2);
    for (const auto& [l, g] : ms.inner) {
        ms.boundaries.push_back(l);
        ms.weights.push_back(g);
    }
    ms.m0_index = ms.boundaries.size();
    ms.boundaries.push_back(spec.m0);
    ms.weights.push_back(spec.gamma_top);
    ms.weights.push_back(spec.gammabar_bottom);
    for (const auto& [r, g] : ms.outer) {
        ms.boundaries.push_back(r);
        ms.weights.push_back(g);
    }
    return ms;
}

double phi(const MembraneSet& ms, double r) {
    if (!(r >= 0.0)) throw UsageError("phi: radius must be >= 0");
    const auto it = std::upper_bound(ms.boundaries.begin(), ms.boundaries.end(), r);
    const std::size_t idx = static_cast<std::size_t>(it - ms.boundaries.begin());
    if (idx > 0 && ms.boundaries[idx - 1] == r)
        return 0.5 * (ms.weights[idx - 1] + ms.weights[idx]);
    return ms.weights[idx];
}

H1Report check_h1(const MembraneSet& ms, const std::vector<double>& probe_radii) {
    H1Report rep;
    rep.probe_radii = probe_radii;
    const std::size_t k = ms.inner.size(); // weights[0..k] is the inner side + gamma_top
    for (std::size_t i = 0; i + 1 <= k; ++i)
        rep.increment_sum_inner += std::abs(ms.weights[i + 1] - ms.weights[i]);
    for (std::size_t i = k + 1; i + 1 < ms.weights.size(); ++i)
        rep.increment_sum_outer += std::abs(ms.weights[i + 1] - ms.weights[i]);
    rep.truncated_tail = ms.truncation_note.dropped_weight_increment;

    bool all_positive = true;
    for (double r : probe_radii) {
        if (!(r > 0.0)) throw UsageError("check_h1: probe radii must be positive");
        const auto it = std::upper_bound(ms.boundaries.begin(), ms.boundaries.end(), r);
        const std::size_t idx = static_cast<std::size_t>(it - ms.boundaries.begin());
        double d = ms.weights[0];
        for (std::size_t i = 1; i <= idx && i < ms.weights.size(); ++i)
            d = std::min(d, ms.weights[i]);
        if (ms.from_generator && ms.inner_limit_weight >= 0.0)
            d = std::min(d, ms.inner_limit_converged ? ms.inner_limit_weight : 0.0);
        rep.delta.push_back(d);
        all_positive = all_positive && d > 0.0;
    }
    rep.pass = all_positive;
    if (!all_positive && ms.from_generator && !ms.inner_limit_converged)
        rep.note = "weight limit at the inner accumulation did not converge over "
                   "the enumerated range; infimum reported as 0";
    return rep;
}

} // namespace skewsim
