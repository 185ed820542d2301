#include "skewsim/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

#include "skewsim/errors.hpp"
#include "skewsim/rng.hpp"

namespace skewsim {

namespace {

constexpr int kMaxHalve = 20;  // drift-limited sub-stepping depth
constexpr int kMaxBisect = 40; // multi-crossing refinement depth
constexpr int kMaxFold = 100000;

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

struct Level {
    double a;
    double alpha;
};

/** Biased membranes only; zero-coefficient ones never enter, so adding one
 *  cannot change a path or the draw sequence. */
struct LevelSet {
    std::vector<Level> levels; // ascending

    static LevelSet from_table(const SkewTable& table) {
        LevelSet ls;
        for (const auto& e : table.entries)
            if (e.coeff != 0.0) ls.levels.push_back({e.radius, e.alpha});
        return ls;
    }

    const Level* at(double r) const {
        auto it = std::lower_bound(levels.begin(), levels.end(), r,
                                   [](const Level& l, double v) { return l.a < v; });
        return (it != levels.end() && it->a == r) ? &*it : nullptr;
    }

    // First membrane strictly between r and y, walking from r.
    const Level* first_between(double r, double y) const {
        if (y > r) {
            auto it = std::upper_bound(levels.begin(), levels.end(), r,
                                       [](double v, const Level& l) { return v < l.a; });
            return (it != levels.end() && it->a < y) ? &*it : nullptr;
        }
        if (y < r) {
            auto it = std::lower_bound(levels.begin(), levels.end(), r,
                                       [](const Level& l, double v) { return l.a < v; });
            if (it == levels.begin()) return nullptr;
            --it;
            return (it->a > y) ? &*it : nullptr;
        }
        return nullptr;
    }

    int count_between(double r, double y) const {
        const double lo = std::min(r, y), hi = std::max(r, y);
        auto i0 = std::upper_bound(levels.begin(), levels.end(), lo,
                                   [](double v, const Level& l) { return v < l.a; });
        auto i1 = std::lower_bound(i0, levels.end(), hi,
                                   [](const Level& l, double v) { return l.a < v; });
        return int(i1 - i0);
    }

    /**
     * Resolves the proposed move r -> y. A start exactly on a membrane means
     * the departing excursion draws its side first; after that every membrane
     * met along the way redraws the side, preserving the remaining distance.
     */
    double resolve(double r, double y, Rng& rng) const {
        if (y != r) {
            if (const Level* m = at(r)) {
                const double d = std::abs(y - r);
                y = rng.uniform() < m->alpha ? r + d : r - d;
            }
        }
        for (int it = 0; it < kMaxFold; ++it) {
            const Level* m = first_between(r, y);
            if (m == nullptr) return y;
            const double over = std::abs(y - m->a);
            y = rng.uniform() < m->alpha ? m->a + over : m->a - over;
            r = m->a;
            if (y == r) return y; // overshoot underflowed: rest on the membrane
        }
        throw EvaluationError("membrane fold did not settle; the step is too large for the membrane spacing");
    }
};

struct StepOut {
    double r;
    bool dead;
};

struct Stepper1D {
    LevelSet membranes;
    std::function<double(double)> drift; // empty = zero
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    NonpositivePolicy policy = NonpositivePolicy::Error;

    static Stepper1D from_model(const RadialModel& rm, NonpositivePolicy pol) {
        Stepper1D st;
        st.membranes = LevelSet::from_table(rm.skew);
        st.drift = rm.drift;
        st.lo = rm.domain_lo;
        st.hi = rm.domain_hi;
        st.policy = pol;
        return st;
    }

    double drift_at(double r) const { return drift ? drift(r) : 0.0; }

    StepOut leave_domain(double z) const {
        if (policy == NonpositivePolicy::Absorb)
            return {z <= lo ? lo : hi, true};
        if (policy == NonpositivePolicy::Reflect) {
            for (int i = 0; i < 64 && (z <= lo || z >= hi); ++i)
                z = z <= lo ? 2.0 * lo - z : 2.0 * hi - z;
            // a proposal landing exactly on an end is nudged one ulp inside
            // so the next drift evaluation stays finite
            if (z <= lo) z = std::nextafter(lo, hi);
            if (z >= hi) z = std::nextafter(hi, lo);
            return {z, false};
        }
        throw EvaluationError(
            "path left the domain; reduce the step or keep the radial correction term");
    }

    /**
     * One sub-step of size dt. Halves while the drift move dominates the
     * noise scale; a proposal across several membranes is redrawn over two
     * half steps while depth allows, otherwise resolved sequentially.
     */
    StepOut advance(double r, double dt, Rng& rng, int depth, double* w_sum) const {
        const double mu = drift_at(r);
        const double sd = std::sqrt(dt);
        if (std::abs(mu) * dt > 0.5 * sd && depth < kMaxHalve) {
            const StepOut half = advance(r, 0.5 * dt, rng, depth + 1, w_sum);
            if (half.dead) return half;
            return advance(half.r, 0.5 * dt, rng, depth + 1, w_sum);
        }
        const double dw = sd * rng.normal();
        const double y = r + mu * dt + dw;
        if (membranes.count_between(r, y) >= 2 && depth < kMaxBisect) {
            const StepOut half = advance(r, 0.5 * dt, rng, depth + 1, w_sum);
            if (half.dead) return half;
            return advance(half.r, 0.5 * dt, rng, depth + 1, w_sum);
        }
        if (w_sum != nullptr) *w_sum += dw;
        const double z = membranes.resolve(r, y, rng);
        if ((std::isfinite(lo) && z <= lo) || (std::isfinite(hi) && z >= hi))
            return leave_domain(z);
        return {z, false};
    }
};

struct StepperFull {
    LevelSet membranes;
    const DensityModel* density = nullptr;
    int dim = 3;
    NonpositivePolicy policy = NonpositivePolicy::Error;

    struct Scratch {
        std::vector<double> mu, y;
        explicit Scratch(int dim) : mu(dim), y(dim) {}
    };

    static double norm_of(const double* x, int dim) {
        double s = 0.0;
        for (int j = 0; j < dim; ++j) s += x[j] * x[j];
        return std::sqrt(s);
    }

    // Updates x in place; returns false when the radius left (0, inf).
    bool advance(double* x, double dt, Rng& rng, int depth, Scratch& sc) const {
        density->drift_ac_into(x, sc.mu.data());
        const double mn = norm_of(sc.mu.data(), dim);
        const double sd = std::sqrt(dt);
        if (mn * dt > 0.5 * sd && depth < kMaxHalve) {
            if (!advance(x, 0.5 * dt, rng, depth + 1, sc)) return false;
            return advance(x, 0.5 * dt, rng, depth + 1, sc);
        }
        for (int j = 0; j < dim; ++j) sc.y[j] = x[j] + sc.mu[j] * dt + sd * rng.normal();
        const double r = norm_of(x, dim);
        const double ry = norm_of(sc.y.data(), dim);
        if (membranes.count_between(r, ry) >= 2 && depth < kMaxBisect) {
            if (!advance(x, 0.5 * dt, rng, depth + 1, sc)) return false;
            return advance(x, 0.5 * dt, rng, depth + 1, sc);
        }
        double rres = membranes.resolve(r, ry, rng);
        if (rres <= 0.0 || !std::isfinite(rres)) {
            if (policy == NonpositivePolicy::Absorb) {
                for (int j = 0; j < dim; ++j) x[j] = 0.0;
                return false;
            }
            throw EvaluationError("radius left (0, inf); reduce the step size");
        }
        if (rres != ry && ry > 0.0) {
            const double scale = rres / ry;
            for (int j = 0; j < dim; ++j) sc.y[j] *= scale;
        }
        for (int j = 0; j < dim; ++j) x[j] = sc.y[j];
        return true;
    }
};

template <class Body>
void parallel_paths(std::size_t n, int threads, const Body& body) {
    if (threads <= 1 || n < 2) {
        for (std::size_t p = 0; p < n; ++p) body(p);
        return;
    }
    const std::size_t nt = std::min<std::size_t>(std::size_t(threads), n);
    const std::size_t chunk = (n + nt - 1) / nt;
    std::vector<std::thread> pool;
    std::mutex err_mu;
    std::exception_ptr err;
    for (std::size_t t = 0; t < nt; ++t) {
        const std::size_t b = t * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&, b, e] {
            try {
                for (std::size_t p = b; p < e; ++p) body(p);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

struct GridPlan {
    std::size_t n_steps = 1;
    std::vector<std::size_t> stored;
    std::vector<double> times;
};

GridPlan plan_grid(const SimConfig& cfg) {
    const double raw = cfg.horizon / cfg.step;
    if (!(raw > 0.0) || raw > 2.0e9)
        throw ValidationError("horizon / step must be a sane positive step count");
    GridPlan g;
    g.n_steps = std::max<std::size_t>(1, std::size_t(std::llround(raw)));
    const std::size_t stride = cfg.store_stride == 0 ? g.n_steps : cfg.store_stride;
    for (std::size_t k = 0; k <= g.n_steps; k += stride) g.stored.push_back(k);
    if (g.stored.back() != g.n_steps) g.stored.push_back(g.n_steps);
    g.times.reserve(g.stored.size());
    for (const std::size_t k : g.stored) g.times.push_back(double(k) * cfg.step);
    return g;
}

void validate_common(const SimConfig& cfg) {
    if (!(cfg.step > 0.0) || !std::isfinite(cfg.step))
        throw ValidationError("step must be positive");
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon))
        throw ValidationError("horizon must be positive");
    if (cfg.n_paths == 0) throw ValidationError("n_paths must be at least 1");
    if (cfg.scheme != "euler-skew")
        throw ValidationError("unknown scheme '" + cfg.scheme + "' (only euler-skew)");
    if (cfg.track_local_time && !(cfg.shell_eps > 0.0))
        throw ValidationError("shell_eps must be positive when local time is tracked");
    for (const auto& b : cfg.occupation_bands)
        if (!(b.first < b.second))
            throw ValidationError("occupation bands need lo < hi");
}

/** Per-path radius bookkeeping on the full step grid. */
struct Bookkeeper {
    const std::vector<double>* tracked;
    const std::vector<std::pair<double, double>>* bands;
    double eps, step;
    std::vector<double> lt;
    std::vector<int> last_sign;
    long long* crossings;
    double* occupation;

    Bookkeeper(PathEnsemble& ens, std::size_t path, double r0)
        : tracked(&ens.tracked_radii),
          bands(&ens.occupation_bands),
          eps(ens.shell_eps),
          step(ens.step),
          lt(tracked->size(), 0.0),
          last_sign(tracked->size(), 0),
          crossings(tracked->empty() ? nullptr : &ens.crossings[path * tracked->size()]),
          occupation(bands->empty() ? nullptr : &ens.occupation[path * bands->size()]) {
        for (std::size_t i = 0; i < tracked->size(); ++i)
            last_sign[i] = sign_of(r0 - (*tracked)[i]);
    }

    void update(double r) {
        for (std::size_t i = 0; i < tracked->size(); ++i) {
            const double a = (*tracked)[i];
            if (std::abs(r - a) < eps) lt[i] += step / (2.0 * eps);
            const int s = sign_of(r - a);
            if (s != 0) {
                if (last_sign[i] != 0 && s != last_sign[i]) crossings[i] += s;
                last_sign[i] = s;
            }
        }
        for (std::size_t j = 0; j < bands->size(); ++j)
            if ((*bands)[j].first <= r && r < (*bands)[j].second) occupation[j] += step;
    }
};

PathEnsemble make_ensemble(const SimConfig& cfg, int dim, const GridPlan& plan,
                           std::vector<double> tracked) {
    PathEnsemble ens;
    ens.dim = dim;
    ens.n_paths = cfg.n_paths;
    ens.step = cfg.step;
    ens.shell_eps = cfg.shell_eps;
    ens.scheme = cfg.scheme;
    ens.times = plan.times;
    ens.stored_steps = plan.stored;
    ens.tracked_radii = cfg.track_local_time ? std::move(tracked) : std::vector<double>{};
    ens.occupation_bands = cfg.occupation_bands;
    const std::size_t slots = ens.times.size();
    ens.positions.assign(cfg.n_paths * slots * std::size_t(dim), 0.0);
    ens.local_time.assign(cfg.n_paths * slots * ens.tracked_radii.size(), 0.0);
    ens.crossings.assign(cfg.n_paths * ens.tracked_radii.size(), 0);
    ens.occupation.assign(cfg.n_paths * ens.occupation_bands.size(), 0.0);
    ens.absorbed.assign(cfg.n_paths, 0);
    if (cfg.record_increments) {
        if (dim != 1)
            throw ValidationError("increment recording is only kept for one-dimensional runs");
        ens.increments.assign(cfg.n_paths * plan.n_steps, 0.0);
    }
    return ens;
}

double radial_start(const SimConfig& cfg) {
    if (cfg.x0.empty()) throw ValidationError("x0 is required");
    if (cfg.x0.size() == 1) return cfg.x0[0];
    return norm(cfg.x0);
}

PathEnsemble run_1d(const Stepper1D& st, const SimConfig& cfg, double r0,
                    std::vector<double> tracked) {
    validate_common(cfg);
    if (!(r0 > st.lo) || !(r0 < st.hi))
        throw ValidationError("start point is outside the domain");
    const GridPlan plan = plan_grid(cfg);
    PathEnsemble ens = make_ensemble(cfg, 1, plan, std::move(tracked));
    const std::size_t slots = ens.times.size();
    const std::size_t n_levels = ens.tracked_radii.size();

    parallel_paths(cfg.n_paths, cfg.n_threads, [&](std::size_t p) {
        Rng rng(cfg.seed, p);
        double r = r0;
        Bookkeeper bk(ens, p, r0);
        double* pos = &ens.positions[p * slots];
        double* lt_slab = n_levels ? &ens.local_time[p * slots * n_levels] : nullptr;
        double* inc = ens.increments.empty() ? nullptr : &ens.increments[p * plan.n_steps];
        bool dead = false;
        std::size_t cursor = 0;
        pos[0] = r; // slot 0 is the start; local time there stays zero
        ++cursor;
        for (std::size_t k = 1; k <= plan.n_steps; ++k) {
            if (!dead) {
                double w_acc = 0.0;
                const StepOut o = st.advance(r, cfg.step, rng, 0, inc ? &w_acc : nullptr);
                if (inc) inc[k - 1] = w_acc;
                r = o.r;
                if (o.dead) {
                    dead = true;
                    ens.absorbed[p] = 1;
                }
                // the transition onto the parking position is still part of
                // the path: crossings stay reconciled with the endpoint side
                bk.update(r);
            }
            if (cursor < slots && ens.stored_steps[cursor] == k) {
                pos[cursor] = r;
                for (std::size_t i = 0; i < n_levels; ++i)
                    lt_slab[cursor * n_levels + i] = bk.lt[i];
                ++cursor;
            }
        }
    });
    return ens;
}

} // namespace

PathEnsemble simulate_radial(const RadialModel& rm, const SimConfig& cfg) {
    const Stepper1D st = Stepper1D::from_model(rm, cfg.nonpositive);
    std::vector<double> tracked;
    tracked.reserve(rm.skew.entries.size());
    for (const auto& e : rm.skew.entries) tracked.push_back(e.radius);
    return run_1d(st, cfg, radial_start(cfg), std::move(tracked));
}

PathEnsemble simulate_line(const SimConfig& cfg, std::vector<double> levels) {
    Stepper1D st; // no membranes, no drift, whole line
    st.policy = cfg.nonpositive;
    if (cfg.x0.size() != 1) throw ValidationError("line runs take a single-entry x0");
    std::sort(levels.begin(), levels.end());
    return run_1d(st, cfg, cfg.x0[0], std::move(levels));
}

PathEnsemble simulate_full(const WeightField& wf, const SimConfig& cfg) {
    validate_common(cfg);
    const int dim = wf.dim();
    Vec x0;
    if (cfg.x0.size() == std::size_t(dim)) {
        x0 = cfg.x0;
    } else if (cfg.x0.size() == 1) {
        x0.assign(dim, 0.0);
        x0[0] = cfg.x0[0];
    } else {
        throw ValidationError("x0 must have dim entries (or one entry for a radius)");
    }

    StepperFull st;
    st.membranes = LevelSet::from_table(skew_coefficients(wf.membranes));
    st.density = &wf.density;
    st.dim = dim;
    st.policy = cfg.nonpositive;

    const GridPlan plan = plan_grid(cfg);
    PathEnsemble ens = make_ensemble(cfg, dim, plan, wf.membranes.boundaries);
    const std::size_t slots = ens.times.size();
    const std::size_t n_levels = ens.tracked_radii.size();
    const double r_start = norm(x0);

    parallel_paths(cfg.n_paths, cfg.n_threads, [&](std::size_t p) {
        Rng rng(cfg.seed, p);
        StepperFull::Scratch sc(dim);
        Vec x = x0;
        Bookkeeper bk(ens, p, r_start);
        double* pos = &ens.positions[p * slots * std::size_t(dim)];
        double* lt_slab = n_levels ? &ens.local_time[p * slots * n_levels] : nullptr;
        bool dead = false;
        std::size_t cursor = 0;
        for (int j = 0; j < dim; ++j) pos[j] = x[j];
        ++cursor;
        for (std::size_t k = 1; k <= plan.n_steps; ++k) {
            if (!dead) {
                if (!st.advance(x.data(), cfg.step, rng, 0, sc)) {
                    dead = true;
                    ens.absorbed[p] = 1;
                }
                bk.update(StepperFull::norm_of(x.data(), dim));
            }
            if (cursor < slots && ens.stored_steps[cursor] == k) {
                for (int j = 0; j < dim; ++j) pos[cursor * dim + j] = x[j];
                for (std::size_t i = 0; i < n_levels; ++i)
                    lt_slab[cursor * n_levels + i] = bk.lt[i];
                ++cursor;
            }
        }
    });
    return ens;
}

ShellExitResult shell_exit_monte_carlo(const RadialModel& rm, double r0, double a, double b,
                                       const SimConfig& cfg) {
    validate_common(cfg);
    if (!(a < r0) || !(r0 < b)) throw ValidationError("need a < r0 < b");
    if (!(a >= rm.domain_lo) || !(b <= rm.domain_hi))
        throw ValidationError("shell must sit inside the model domain");
    const Stepper1D st = Stepper1D::from_model(rm, cfg.nonpositive);
    const std::size_t max_steps = plan_grid(cfg).n_steps;

    // outcome per path: +1 outer, -1 inner, 0 timeout; exit step count
    std::vector<int> outcome(cfg.n_paths, 0);
    std::vector<std::size_t> exit_step(cfg.n_paths, 0);
    parallel_paths(cfg.n_paths, cfg.n_threads, [&](std::size_t p) {
        Rng rng(cfg.seed, p);
        double r = r0;
        for (std::size_t k = 1; k <= max_steps; ++k) {
            const StepOut o = st.advance(r, cfg.step, rng, 0, nullptr);
            r = o.r;
            if (r <= a || o.dead) {
                outcome[p] = -1;
                exit_step[p] = k;
                return;
            }
            if (r >= b) {
                outcome[p] = +1;
                exit_step[p] = k;
                return;
            }
        }
    });

    ShellExitResult res;
    res.n_paths = cfg.n_paths;
    double t_sum = 0.0;
    std::size_t n_exited = 0;
    for (std::size_t p = 0; p < cfg.n_paths; ++p) {
        if (outcome[p] == 0) {
            ++res.n_timed_out;
            continue;
        }
        if (outcome[p] > 0) ++res.n_outer;
        t_sum += double(exit_step[p]) * cfg.step;
        ++n_exited;
    }
    res.mean_exit_time = n_exited ? t_sum / double(n_exited) : 0.0;
    return res;
}

double tanaka_residual(const PathEnsemble& ens, std::size_t path, double level, double eps) {
    if (ens.dim != 1) throw UsageError("tanaka_residual needs a one-dimensional ensemble");
    const std::size_t n = ens.n_stored();
    if (n < 2 || ens.stored_steps.back() != n - 1)
        throw UsageError("tanaka_residual needs every step stored (store_stride 1)");
    if (!(eps > 0.0)) throw UsageError("eps must be positive");
    double mart = 0.0, lt = 0.0;
    double r_prev = ens.position(path, 0, 0);
    const double r0 = r_prev;
    for (std::size_t k = 1; k < n; ++k) {
        const double r = ens.position(path, k, 0);
        mart += double(sign_of(r_prev - level)) * (r - r_prev);
        if (std::abs(r - level) < eps) lt += ens.step / (2.0 * eps);
        r_prev = r;
    }
    return std::abs(r_prev - level) - std::abs(r0 - level) - mart - lt;
}

std::vector<double> PathEnsemble::final_radii() const {
    std::vector<double> out(n_paths);
    const std::size_t last = n_stored() - 1;
    for (std::size_t p = 0; p < n_paths; ++p) out[p] = radius(p, last);
    return out;
}

std::vector<double> PathEnsemble::final_positions() const {
    std::vector<double> out(n_paths * std::size_t(dim));
    const std::size_t last = n_stored() - 1;
    for (std::size_t p = 0; p < n_paths; ++p)
        for (int j = 0; j < dim; ++j) out[p * dim + j] = position(p, last, j);
    return out;
}

std::vector<double> PathEnsemble::local_time_series(std::size_t path, double level_radius) const {
    std::size_t idx = tracked_radii.size();
    for (std::size_t i = 0; i < tracked_radii.size(); ++i)
        if (tracked_radii[i] == level_radius) {
            idx = i;
            break;
        }
    if (idx == tracked_radii.size())
        throw UsageError("level is not tracked by this ensemble");
    std::vector<double> out(n_stored());
    for (std::size_t s = 0; s < out.size(); ++s) out[s] = local_time_value(path, s, idx);
    return out;
}

} // namespace skewsim
