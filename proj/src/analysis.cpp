#include "skewsim/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "skewsim/errors.hpp"
#include "skewsim/rng.hpp"
#include "skewsim/skew_table.hpp"

namespace skewsim {

namespace {

// Cut points of (lo, hi) at the membrane radii, endpoints included.
std::vector<double> segment_cuts(const MembraneSet& ms, double lo, double hi) {
    std::vector<double> cuts{lo};
    for (const double b : ms.boundaries)
        if (b > lo && b < hi) cuts.push_back(b);
    cuts.push_back(hi);
    return cuts;
}

// int over B_R of fn(x) phi(|x|) dx; fn carries rho itself when needed.
QuadValue weighted_ball_integral(const WeightField& wf, double R,
                                 const std::function<double(const Vec&)>& fn,
                                 const QuadratureConfig& qc) {
    const auto cuts = segment_cuts(wf.membranes, 0.0, R);
    QuadValue out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        const double w = phi(wf.membranes, mid);
        if (wf.dim() == 3) {
            out.value += w * annulus_integral(fn, cuts[i], cuts[i + 1], qc);
        } else {
            const McEstimate e = annulus_integral_mc(fn, wf.dim(), cuts[i], cuts[i + 1], qc);
            out.value += w * e.value;
            out.abs_error += w * e.stderr_; // conservative: straight sum
        }
    }
    return out;
}

// Surface integral over the sphere of given radius; MC above d = 3.
double surface_integral(const WeightField& wf, double radius,
                        const std::function<double(const Vec&)>& fn,
                        const QuadratureConfig& qc) {
    if (wf.dim() == 3) return sphere_integral(fn, radius, qc);
    const int d = wf.dim();
    Rng rng(qc.mc_seed, 7000u + std::uint64_t(radius * 4096.0));
    double sum = 0.0;
    Vec x(d);
    for (std::size_t s = 0; s < qc.mc_samples; ++s) {
        double n2 = 0.0;
        for (int j = 0; j < d; ++j) {
            x[j] = rng.normal();
            n2 += x[j] * x[j];
        }
        const double scale = radius / std::sqrt(n2);
        for (int j = 0; j < d; ++j) x[j] *= scale;
        sum += fn(x);
    }
    return sum / double(qc.mc_samples) * unit_sphere_area(d) * std::pow(radius, d - 1);
}

void require_supported(const SmoothField& f, int dim) {
    if (!(f.support_radius > 0.0))
        throw ValidationError("test function '" + f.name + "' must be compactly supported");
    // spot-check the vanishing just outside the stated support
    const double r = f.support_radius * (1.0 + 1e-9);
    Vec x(dim, 0.0);
    for (int j = 0; j < dim; ++j) {
        std::fill(x.begin(), x.end(), 0.0);
        x[j] = r;
        if (std::abs(f.value(x)) > 1e-12)
            throw ValidationError("test function '" + f.name + "' does not vanish at its support radius");
    }
}

double fit_loglog_slope(const std::vector<double>& r, const std::vector<double>& v,
                        std::size_t begin) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = double(r.size() - begin);
    if (n < 2.0) throw UsageError("exponent fit needs at least two grid points");
    for (std::size_t i = begin; i < r.size(); ++i) {
        if (!(v[i] > 0.0)) throw EvaluationError("volume must be positive for the log fit");
        const double lx = std::log(r[i]), ly = std::log(v[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (denom <= 0.0) throw EvaluationError("degenerate grid for the exponent fit");
    return (n * sxy - sx * sy) / denom;
}

} // namespace

QuadValue dirichlet_form(const SmoothField& f, const SmoothField& g, const WeightField& wf,
                         const QuadratureConfig& qc) {
    require_supported(f, wf.dim());
    require_supported(g, wf.dim());
    const double R = std::min(f.support_radius, g.support_radius);
    const auto integrand = [&](const Vec& x) {
        const Vec gf = f.gradient(x);
        const Vec gg = g.gradient(x);
        return 0.5 * dot(gf, gg) * wf.density.rho(x);
    };
    const QuadValue coarse = weighted_ball_integral(wf, R, integrand, qc);
    if (wf.dim() != 3) return coarse; // MC error already attached
    const QuadValue fine = weighted_ball_integral(wf, R, integrand, qc.refined(2));
    return {fine.value, std::abs(fine.value - coarse.value)};
}

IbpReport ibp_residual(const SmoothField& f, const SmoothField& g, const WeightField& wf,
                       const QuadratureConfig& qc) {
    require_supported(f, wf.dim());
    require_supported(g, wf.dim());
    const double R = std::min(f.support_radius, g.support_radius);
    const DensityModel& rho = wf.density;

    // (1/2 lap f + grad f . grad rho / 2 rho) g rho phi
    const auto volume_fn = [&](const Vec& x) {
        double term = 0.5 * f.laplacian(x);
        const Vec gf = f.gradient(x);
        const Vec mu = rho.drift_ac(x);
        term += dot(gf, mu);
        return term * g.value(x) * rho.rho(x);
    };
    // grad f . nu  g rho on a sphere (nu = outward radial unit normal)
    const auto flux_fn = [&](const Vec& x) {
        const double r = norm(x);
        const Vec gf = f.gradient(x);
        return dot(gf, x) / r * g.value(x) * rho.rho(x);
    };

    const SkewTable table = skew_coefficients(wf.membranes);
    const auto evaluate = [&](const QuadratureConfig& q) {
        double volume = weighted_ball_integral(wf, R, volume_fn, q).value;
        double surface = 0.0;
        for (const auto& e : table.entries) {
            if (e.radius >= R) continue; // f or g vanish on this sphere
            surface += 0.5 * (e.gamma_right - e.gamma_left) * surface_integral(wf, e.radius, flux_fn, q);
        }
        return std::pair<double, double>{volume, surface};
    };

    const auto [vol_c, sur_c] = evaluate(qc);
    double vol = vol_c, sur = sur_c, refine_err = 0.0;
    if (wf.dim() == 3) {
        const auto [vol_f, sur_f] = evaluate(qc.refined(2));
        refine_err = std::abs(vol_f - vol_c) + std::abs(sur_f - sur_c);
        vol = vol_f;
        sur = sur_f;
    }

    IbpReport rep;
    rep.lhs = -dirichlet_form(f, g, wf, qc).value;
    rep.volume_term = vol;
    rep.surface_term = sur;
    rep.residual_abs = std::abs(rep.lhs - (vol + sur));
    const double scale = std::max({std::abs(rep.lhs), std::abs(vol) + std::abs(sur), 1e-300});
    rep.residual_rel = rep.residual_abs / scale;

    // dropped membranes: bound their flux by the largest retained-sphere flux
    double flux_bound = 0.0;
    for (const auto& e : table.entries) {
        if (e.radius >= R) continue;
        flux_bound = std::max(flux_bound,
                              std::abs(surface_integral(wf, e.radius, flux_fn, qc)));
    }
    rep.error_budget =
        refine_err + 0.5 * wf.membranes.truncation_note.dropped_weight_increment * flux_bound;
    return rep;
}

TraceReport trace_inequality_check(const SmoothField& f, double l, const WeightField& wf,
                                   const QuadratureConfig& qc) {
    if (!(l > 0.0)) throw ValidationError("trace radius must be positive");
    const DensityModel& rho = wf.density;

    TraceReport rep;
    rep.delta = check_h1(wf.membranes, {l}).delta.at(0);
    if (!(rep.delta > 0.0))
        throw HypothesisError("phi has no positive lower bound on the ball; the trace constant is undefined");

    rep.lhs = surface_integral(
        wf, l, [&](const Vec& x) { return std::abs(f.value(x)) * rho.rho(x); }, qc);

    const double energy =
        weighted_ball_integral(
            wf, l, [&](const Vec& x) { const Vec gf = f.gradient(x); return dot(gf, gf) * rho.rho(x); }, qc)
            .value;
    const double mass =
        weighted_ball_integral(
            wf, l, [&](const Vec& x) { const double v = f.value(x); return v * v * rho.rho(x); }, qc)
            .value;

    // C(l) pieces carry rho alone (no phi): the mass of rho and the Dirichlet
    // energy of xi = sqrt(rho) on the ball.
    double rho_mass = 0.0, xi_energy = 0.0;
    {
        const auto cuts = segment_cuts(wf.membranes, 0.0, l);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            if (wf.dim() == 3) {
                rho_mass += annulus_integral([&](const Vec& x) { return rho.rho(x); },
                                             cuts[i], cuts[i + 1], qc);
                xi_energy += annulus_integral(
                    [&](const Vec& x) {
                        const Vec gr = rho.grad_rho(x);
                        return dot(gr, gr) / (4.0 * rho.rho(x));
                    },
                    cuts[i], cuts[i + 1], qc);
            } else {
                rho_mass += annulus_integral_mc([&](const Vec& x) { return rho.rho(x); },
                                                wf.dim(), cuts[i], cuts[i + 1], qc)
                                .value;
                xi_energy += annulus_integral_mc(
                                 [&](const Vec& x) {
                                     const Vec gr = rho.grad_rho(x);
                                     return dot(gr, gr) / (4.0 * rho.rho(x));
                                 },
                                 wf.dim(), cuts[i], cuts[i + 1], qc)
                                 .value;
            }
        }
    }

    rep.constant = std::sqrt(8.0 / rep.delta) * (std::sqrt(rho_mass) + std::sqrt(xi_energy));
    rep.rhs = rep.constant * std::sqrt(energy + mass);
    rep.pass = rep.lhs <= rep.rhs;
    return rep;
}

QuadValue psi_annulus_mass(const WeightField& wf, double lo, double hi,
                           const QuadratureConfig& qc) {
    if (!(0.0 <= lo) || !(lo < hi)) throw ValidationError("annulus needs 0 <= lo < hi");
    const int d = wf.dim();
    const auto cuts = segment_cuts(wf.membranes, lo, hi);
    QuadValue out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double w = phi(wf.membranes, 0.5 * (cuts[i] + cuts[i + 1]));
        if (wf.radial()) {
            out.value += w * unit_sphere_area(d) *
                         adaptive_integrate(
                             [&](double u) {
                                 return wf.density.radial()->value(u) * std::pow(u, d - 1);
                             },
                             cuts[i], cuts[i + 1], qc.abs_tol);
        } else if (d == 3) {
            out.value += w * annulus_integral([&](const Vec& x) { return wf.density.rho(x); },
                                              cuts[i], cuts[i + 1], qc);
        } else {
            const McEstimate e = annulus_integral_mc(
                [&](const Vec& x) { return wf.density.rho(x); }, d, cuts[i], cuts[i + 1], qc);
            out.value += w * e.value;
            out.abs_error += w * e.stderr_;
        }
    }
    return out;
}

GrowthReport growth_criteria(const WeightField& wf, const std::vector<double>& r_grid,
                             const QuadratureConfig& qc) {
    if (r_grid.size() < 2) throw ValidationError("growth grid needs at least two radii");
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        if (!(r_grid[i] > 0.0)) throw ValidationError("growth radii must be positive");
        if (i && !(r_grid[i] > r_grid[i - 1]))
            throw ValidationError("growth grid must be strictly increasing");
    }

    GrowthReport rep;
    rep.r_grid = r_grid;
    rep.volumes.reserve(r_grid.size());

    const int d = wf.dim();
    double acc = 0.0, prev = 0.0;
    for (const double r : r_grid) {
        if (wf.radial()) {
            // increment over (prev, r], segmented at membranes, prefix-summed
            const auto cuts = segment_cuts(wf.membranes, prev, r);
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                const double w = phi(wf.membranes, 0.5 * (cuts[i] + cuts[i + 1]));
                acc += w * unit_sphere_area(d) *
                       adaptive_integrate(
                           [&](double u) {
                               return wf.density.radial()->value(u) * std::pow(u, d - 1);
                           },
                           cuts[i], cuts[i + 1], qc.abs_tol);
            }
        } else {
            acc = weighted_ball_integral(wf, r,
                                         [&](const Vec& x) { return wf.density.rho(x); }, qc)
                      .value;
        }
        prev = r;
        rep.volumes.push_back(acc);
    }

    rep.alpha_full = fit_loglog_slope(r_grid, rep.volumes, 0);
    const double r_hi = r_grid.back();
    std::size_t tail_begin = 0;
    for (std::size_t i = 0; i < r_grid.size(); ++i)
        if (r_grid[i] >= 0.1 * r_hi) {
            tail_begin = i;
            break;
        }
    if (r_grid.size() - tail_begin < 3) tail_begin = r_grid.size() >= 3 ? r_grid.size() - 3 : 0;
    rep.alpha_tail = fit_loglog_slope(r_grid, rep.volumes, tail_begin);

    rep.conservative = std::isfinite(rep.alpha_tail);
    rep.recurrent = rep.alpha_tail <= 2.0 + 1e-9;
    return rep;
}

} // namespace skewsim
