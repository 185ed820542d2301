#include "skewsim/test_functions.hpp"

#include <cmath>

#include "skewsim/errors.hpp"

namespace skewsim {

namespace {

// F(t) = exp(1 - 1/(1-t)) on t in [0, 1), with F' and F'' in terms of u = 1-t:
// F' = -F/u^2, F'' = F (1 - 2u)/u^4.
struct BumpProfile {
    double f = 0.0, d1 = 0.0, d2 = 0.0;
    explicit BumpProfile(double t) {
        if (t >= 1.0) return;
        const double u = 1.0 - t;
        f = std::exp(1.0 - 1.0 / u);
        if (f == 0.0) return; // underflow region: derivatives vanish too
        d1 = -f / (u * u);
        d2 = f * (1.0 - 2.0 * u) / (u * u * u * u);
    }
};

double sq_norm(const Vec& x) {
    double s = 0.0;
    for (const double v : x) s += v * v;
    return s;
}

// exp-smoothstep q on [0,1]: q(0)=0, q(1)=1, all derivatives vanish at both ends.
struct Smoothstep {
    double q = 0.0, d1 = 0.0, d2 = 0.0;
    explicit Smoothstep(double t) {
        if (t <= 0.0) return;
        if (t >= 1.0) {
            q = 1.0;
            return;
        }
        const double a = std::exp(-1.0 / t);
        const double b = std::exp(-1.0 / (1.0 - t));
        if (a == 0.0) return;
        if (b == 0.0) {
            q = 1.0;
            return;
        }
        const double t2 = t * t, s = 1.0 - t, s2 = s * s;
        const double da = a / t2;
        const double db = -b / s2;
        const double dda = a * (1.0 - 2.0 * t) / (t2 * t2);
        const double ddb = b * (2.0 * t - 1.0) / (s2 * s2);
        const double sum = a + b;
        q = a / sum;
        d1 = (da * b - a * db) / (sum * sum);
        d2 = ((dda * b - a * ddb) * sum - 2.0 * (da * b - a * db) * (da + db)) /
             (sum * sum * sum);
    }
};

} // namespace

SmoothField bump_field(int dim, double radius) {
    if (dim < 1 || !(radius > 0.0)) throw ValidationError("bump needs dim >= 1, radius > 0");
    const double R2 = radius * radius;
    SmoothField sf;
    sf.name = "bump";
    sf.support_radius = radius;
    sf.value = [R2](const Vec& x) { return BumpProfile(sq_norm(x) / R2).f; };
    // f = F(t), t = |x|^2/R^2: grad = F' 2x/R^2, lap = F'' 4|x|^2/R^4 + F' 2d/R^2
    sf.gradient = [R2](const Vec& x) {
        const BumpProfile p(sq_norm(x) / R2);
        Vec g(x.size(), 0.0);
        for (std::size_t j = 0; j < x.size(); ++j) g[j] = p.d1 * 2.0 * x[j] / R2;
        return g;
    };
    sf.laplacian = [R2, dim](const Vec& x) {
        const double n2 = sq_norm(x);
        const BumpProfile p(n2 / R2);
        return p.d2 * 4.0 * n2 / (R2 * R2) + p.d1 * 2.0 * double(dim) / R2;
    };
    return sf;
}

SmoothField plateau_field(int dim, double inner, double outer) {
    if (dim < 1 || !(0.0 < inner) || !(inner < outer))
        throw ValidationError("plateau needs 0 < inner < outer");
    const double L = outer - inner;
    // xi(r) = q((outer - r)/L); radial, so grad = xi' x/r, lap = xi'' + (d-1) xi'/r
    auto radial = [outer, L](double r) {
        const Smoothstep s((outer - r) / L);
        struct {
            double v, d1, d2;
        } out{s.q, -s.d1 / L, s.d2 / (L * L)};
        return out;
    };
    SmoothField sf;
    sf.name = "plateau";
    sf.support_radius = outer;
    sf.value = [radial](const Vec& x) { return radial(norm(x)).v; };
    sf.gradient = [radial](const Vec& x) {
        const double r = norm(x);
        Vec g(x.size(), 0.0);
        if (r < 1e-300) return g;
        const double d1 = radial(r).d1;
        for (std::size_t j = 0; j < x.size(); ++j) g[j] = d1 * x[j] / r;
        return g;
    };
    sf.laplacian = [radial, dim](const Vec& x) {
        const double r = norm(x);
        if (r < 1e-300) return 0.0; // flat at the plateau center
        const auto p = radial(r);
        return p.d2 + double(dim - 1) * p.d1 / r;
    };
    return sf;
}

SmoothField coordinate_bump_field(int dim, double radius, int axis) {
    if (axis < 0 || axis >= dim) throw ValidationError("axis out of range");
    const SmoothField b = bump_field(dim, radius);
    SmoothField sf;
    sf.name = "coordinate-bump";
    sf.support_radius = radius;
    sf.value = [b, axis](const Vec& x) { return x[axis] * b.value(x); };
    sf.gradient = [b, axis](const Vec& x) {
        Vec g = b.gradient(x);
        const double bv = b.value(x);
        for (std::size_t j = 0; j < x.size(); ++j) g[j] *= x[axis];
        g[axis] += bv;
        return g;
    };
    // lap(x_a B) = x_a lap B + 2 dB/dx_a
    sf.laplacian = [b, axis](const Vec& x) {
        return x[axis] * b.laplacian(x) + 2.0 * b.gradient(x)[axis];
    };
    return sf;
}

} // namespace skewsim
