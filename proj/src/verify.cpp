#include "skewsim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "skewsim/analysis.hpp"
#include "skewsim/errors.hpp"
#include "skewsim/simulate.hpp"
#include "skewsim/stats.hpp"

namespace skewsim {

namespace {

void finalize(TestReport& r) {
    bool ok;
    if (r.p_value >= 0.0) {
        ok = r.p_value >= r.p_threshold;
    } else {
        ok = std::abs(r.estimate - r.target) <= r.tolerance_k * r.stderr_;
        if (!ok && r.rel_tolerance > 0.0)
            ok = std::abs(r.estimate - r.target) <=
                 r.rel_tolerance * std::max(std::abs(r.target), 1.0);
    }
    r.pass = ok;
}

std::string echo_base(const SimConfig& cfg) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "{\"n_paths\":%zu,\"step\":%.17g,\"horizon\":%.17g,\"seed\":%llu",
                  cfg.n_paths, cfg.step, cfg.horizon,
                  static_cast<unsigned long long>(cfg.seed));
    return buf;
}

} // namespace

TestReport crossing_probability_test(const RadialModel& rm, double a_k, double eps_inner,
                                     double eps_outer, const SimConfig& cfg) {
    const SkewEntry* entry = rm.skew.find(a_k);
    if (entry == nullptr) throw ValidationError("a_k is not a retained membrane radius");
    if (!(eps_inner > 0.0) || !(eps_outer > 0.0))
        throw ValidationError("shell widths must be positive");
    const double lo = a_k - eps_inner, hi = a_k + eps_outer;
    if (!(lo > rm.domain_lo) || !(hi < rm.domain_hi))
        throw ValidationError("shell leaves the model domain");
    for (const auto& e : rm.skew.entries)
        if (e.radius != a_k && e.coeff != 0.0 && e.radius >= lo && e.radius <= hi)
            throw ValidationError("shell overlaps another biased membrane");

    SimConfig run = cfg;
    run.x0 = {a_k};
    const ShellExitResult sim = shell_exit_monte_carlo(rm, a_k, lo, hi, run);
    const std::size_t n = sim.n_paths - sim.n_timed_out;
    if (n == 0) throw EvaluationError("every path timed out; raise the horizon");

    TestReport r;
    r.name = "crossing-probability";
    r.target = exit_probability(rm, a_k, lo, hi);
    r.estimate = sim.outer_fraction();
    r.stderr_ = std::sqrt(r.target * (1.0 - r.target) / double(n));
    r.n = n;
    char extra[192];
    std::snprintf(extra, sizeof extra,
                  ",\"a_k\":%.17g,\"eps_inner\":%.17g,\"eps_outer\":%.17g,\"alpha\":%.17g}",
                  a_k, eps_inner, eps_outer, entry->alpha);
    r.config_echo = echo_base(run) + extra;
    if (sim.n_timed_out)
        r.note = std::to_string(sim.n_timed_out) + " paths timed out and were excluded";
    finalize(r);
    return r;
}

TestReport crossing_probability_test(const RadialModel& rm, double a_k, double eps,
                                     const SimConfig& cfg) {
    return crossing_probability_test(rm, a_k, eps, eps, cfg);
}

TestReport radial_consistency_test(const WeightField& wf, const SimConfig& cfg,
                                   bool include_bessel) {
    if (cfg.n_paths < 100) throw ValidationError("radial consistency needs n_paths >= 100");

    SimConfig full_cfg = cfg;
    full_cfg.store_stride = 0;
    full_cfg.track_local_time = false;
    // The full leg's modulus cannot leave (0, inf); a radial-leg origin
    // overshoot is a discretization artifact, not a distributional
    // difference. Both legs park such paths and the comparison conditions
    // on survival; parked counts are reported in the note.
    full_cfg.nonpositive = NonpositivePolicy::Absorb;
    const PathEnsemble full = simulate_full(wf, full_cfg);

    const RadialModel rm = make_radial_model(
        wf, 0.0, std::numeric_limits<double>::infinity(), include_bessel);
    SimConfig rad_cfg = full_cfg;
    rad_cfg.x0 = {cfg.x0.size() == 1 ? cfg.x0[0] : norm(cfg.x0)};
    const PathEnsemble radial = simulate_radial(rm, rad_cfg);

    const auto survivors = [](const PathEnsemble& e) {
        const std::vector<double> fin = e.final_radii();
        std::vector<double> out;
        out.reserve(fin.size());
        for (std::size_t p = 0; p < e.n_paths; ++p)
            if (!e.absorbed[p]) out.push_back(fin[p]);
        return out;
    };
    const std::vector<double> full_r = survivors(full);
    const std::vector<double> radial_r = survivors(radial);
    if (full_r.size() < 100 || radial_r.size() < 100)
        throw ValidationError("radial consistency: fewer than 100 surviving paths");

    const Ks2Result ks = ks_two_sample(full_r, radial_r);

    TestReport r;
    r.name = "radial-consistency";
    r.estimate = ks.d_stat;
    r.target = 0.0;
    r.p_value = ks.p_value;
    r.n = cfg.n_paths;
    r.config_echo = echo_base(cfg) + std::string(",\"bessel\":") +
                    (include_bessel ? "true}" : "false}");
    if (!include_bessel) r.note = "negative control: radial correction term omitted";
    const std::size_t parked =
        (full.n_paths - full_r.size()) + (radial.n_paths - radial_r.size());
    if (parked)
        r.note += (r.note.empty() ? "" : "; ") + std::to_string(parked) +
                  " paths parked at 0 were excluded";
    finalize(r);
    return r;
}

TestReport reversibility_test(const WeightField& wf, const SimConfig& cfg, const Vec& x,
                              const Vec& y, double bandwidth) {
    const int d = wf.dim();
    if (x.size() != std::size_t(d) || y.size() != std::size_t(d))
        throw ValidationError("x and y must have dim entries");
    if (x == y) throw ValidationError("x and y must differ");
    for (const double b : wf.membranes.boundaries)
        if (norm(x) == b || norm(y) == b)
            throw ValidationError("evaluation points must sit off the membranes");

    SimConfig cfg_a = cfg;
    cfg_a.x0 = x;
    cfg_a.store_stride = 0;
    cfg_a.track_local_time = false;
    SimConfig cfg_b = cfg_a;
    cfg_b.x0 = y;
    cfg_b.seed = cfg.seed + 1; // independent draws for the reverse direction

    const std::vector<double> sample_a = simulate_full(wf, cfg_a).final_positions();
    const std::vector<double> sample_b = simulate_full(wf, cfg_b).final_positions();
    const std::size_t n = cfg.n_paths;

    Vec h(d);
    if (bandwidth > 0.0) {
        std::fill(h.begin(), h.end(), bandwidth);
    } else {
        std::vector<double> pooled = sample_a;
        pooled.insert(pooled.end(), sample_b.begin(), sample_b.end());
        h = silverman_bandwidth(pooled, 2 * n, d);
    }

    const auto window_count = [&](const std::vector<double>& s, const Vec& at) {
        std::size_t c = 0;
        for (std::size_t i = 0; i < n; ++i) {
            bool in = true;
            for (int j = 0; j < d; ++j)
                if (std::abs(s[i * d + j] - at[j]) > 2.0 * h[j]) {
                    in = false;
                    break;
                }
            c += in;
        }
        return c;
    };
    if (window_count(sample_a, y) < 30 || window_count(sample_b, x) < 30)
        throw EvaluationError("too few samples near the evaluation point; widen the bandwidth");

    const std::vector<double> wa = kde_weights(sample_a, n, d, y, h);
    const std::vector<double> wb = kde_weights(sample_b, n, d, x, h);
    const MeanStderr ma = mean_stderr(wa);
    const MeanStderr mb = mean_stderr(wb);
    if (!(ma.mean > 0.0) || !(mb.mean > 0.0))
        throw EvaluationError("kernel density vanished at the evaluation point");

    Rng boot_rng(cfg.seed, 0x7ab00u);
    const double se_a = bootstrap_mean_stderr(wa, 200, boot_rng);
    const double se_b = bootstrap_mean_stderr(wb, 200, boot_rng);

    TestReport r;
    r.name = "reversibility";
    r.estimate = (ma.mean / wf.psi(y)) / (mb.mean / wf.psi(x));
    r.target = 1.0;
    r.stderr_ = r.estimate * std::sqrt(se_a * se_a / (ma.mean * ma.mean) +
                                       se_b * se_b / (mb.mean * mb.mean));
    r.rel_tolerance = 0.10;
    r.n = n;
    char extra[128];
    std::snprintf(extra, sizeof extra, ",\"bandwidth\":%.17g}", h[0]);
    r.config_echo = echo_base(cfg) + extra;
    finalize(r);
    return r;
}

TestReport occupation_ratio_test(const WeightField& wf, const SimConfig& cfg,
                                 std::pair<double, double> band_a,
                                 std::pair<double, double> band_b) {
    for (const auto& band : {band_a, band_b})
        if (!(0.0 <= band.first) || !(band.first < band.second) || !std::isfinite(band.second))
            throw ValidationError("bands must be finite annuli with lo < hi");

    // recurrence screen on a decade-spanning grid
    std::vector<double> grid;
    for (int i = 0; i <= 24; ++i) grid.push_back(std::pow(10.0, 2.0 * i / 24.0));
    const GrowthReport growth = growth_criteria(wf, grid);
    if (!growth.recurrent) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "volume-growth exponent %.3f > 2: transient configuration, "
                      "occupation ratios do not converge",
                      growth.alpha_tail);
        throw HypothesisError(msg);
    }

    SimConfig run = cfg;
    run.occupation_bands = {band_a, band_b};
    run.track_local_time = false;
    run.store_stride = 0;

    PathEnsemble ens;
    if (wf.radial()) {
        const RadialModel rm =
            make_radial_model(wf, 0.0, std::numeric_limits<double>::infinity(), true);
        SimConfig rc = run;
        rc.x0 = {run.x0.size() == 1 ? run.x0[0] : norm(run.x0)};
        // recurrent horizons make an eventual origin overshoot certain; fold
        // it back the way the full-dimensional modulus would
        rc.nonpositive = NonpositivePolicy::Reflect;
        ens = simulate_radial(rm, rc);
    } else {
        ens = simulate_full(wf, run);
    }

    std::vector<double> ratios;
    ratios.reserve(cfg.n_paths);
    for (std::size_t p = 0; p < cfg.n_paths; ++p) {
        const double ta = ens.occupation[p * 2 + 0];
        const double tb = ens.occupation[p * 2 + 1];
        if (!(tb > 0.0))
            throw EvaluationError("a path never visited the reference band; extend the horizon");
        ratios.push_back(ta / tb);
    }
    const MeanStderr ms = mean_stderr(ratios);

    const QuadratureConfig qc;
    const double mass_a = psi_annulus_mass(wf, band_a.first, band_a.second, qc).value;
    const double mass_b = psi_annulus_mass(wf, band_b.first, band_b.second, qc).value;

    TestReport r;
    r.name = "occupation-ratio";
    r.estimate = ms.mean;
    r.stderr_ = ms.stderr_;
    r.target = mass_a / mass_b;
    r.rel_tolerance = 0.25;
    r.n = cfg.n_paths;
    char extra[192];
    std::snprintf(extra, sizeof extra,
                  ",\"band_a\":[%.17g,%.17g],\"band_b\":[%.17g,%.17g],\"alpha_tail\":%.3f}",
                  band_a.first, band_a.second, band_b.first, band_b.second,
                  growth.alpha_tail);
    r.config_echo = echo_base(cfg) + extra;
    finalize(r);
    return r;
}

} // namespace skewsim
