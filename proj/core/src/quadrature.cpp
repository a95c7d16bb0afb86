#include "tfe/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "tfe/errors.hpp"

namespace tfe {

namespace {

using Rule = boost::math::quadrature::gauss<double, 20>;

template <class F>
double panel(const F& f, double lo, double hi) {
    return Rule::integrate(f, lo, hi);
}

template <class F>
double uniform_panels(const F& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double lo = a + k * h;
        const double hi = (k + 1 == panels) ? b : lo + h;
        sum += panel(f, lo, hi);
    }
    return sum;
}

// Integral over r in (0, R] of F(r), where F(r) ~ g r^p as r -> 0. Panels shrink
// geometrically toward r = 0; the last cell [0, w] is integrated exactly in
// u = r^(1+p) with g frozen at r = w.
template <class F>
double graded_to_zero(const F& fr, double R, double p, const QuadratureOptions& opts) {
    double sum = 0.0;
    double hi = R;
    const double floor_width = 1e-300;
    for (int level = 0; level < opts.graded_levels; ++level) {
        const double lo = hi * opts.graded_ratio;
        if (lo < floor_width) break;
        sum += panel(fr, lo, hi);
        hi = lo;
    }
    const double q = 1.0 + p;
    sum += fr(hi) * hi / q;
    return sum;
}

void check_args(double a, double b, const QuadratureOptions& opts) {
    if (!(b > a)) fail(ErrorKind::InvalidArgument, "integrate needs a < b");
    if (opts.panels < 1) fail(ErrorKind::InvalidArgument, "integrate needs panels >= 1");
}

void check_exponent(double p) {
    if (!(p > -1.0)) fail(ErrorKind::NonIntegrable, "singularity exponent must be > -1");
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 std::optional<double> singularity_exponent, const QuadratureOptions& opts) {
    check_args(a, b, opts);
    if (!singularity_exponent) return uniform_panels(f, a, b, opts.panels);

    const double p = *singularity_exponent;
    check_exponent(p);
    const double mid = a + 0.5 * (b - a);
    double sum = uniform_panels(f, a, mid, std::max(1, opts.panels / 2));

    // f sees only x, so b - x carries a relative error ulp(b)/r; stop grading at
    // r ~ 1e-8, which balances that against the O(w^(2+p)) error of the frozen-g cell.
    QuadratureOptions o = opts;
    const double resolvable = 1e-8 * std::max(1.0, std::abs(b));
    const double R = b - mid;
    int levels = 0;
    for (double w = R; w * o.graded_ratio >= resolvable && levels < o.graded_levels; w *= o.graded_ratio) ++levels;
    o.graded_levels = levels;
    sum += graded_to_zero([&](double r) { return f(b - r); }, R, p, o);
    return sum;
}

double integrate_weighted(const std::function<double(double)>& g, double p, double a, double b,
                          const QuadratureOptions& opts) {
    check_args(a, b, opts);
    check_exponent(p);
    const double mid = a + 0.5 * (b - a);
    double sum = uniform_panels([&](double x) { return g(x) * std::pow(b - x, p); }, a, mid,
                                std::max(1, opts.panels / 2));
    sum += graded_to_zero([&](double r) { return g(b - r) * std::pow(r, p); }, b - mid, p, opts);
    return sum;
}

double integrate(const Profile& f, double a, double b) {
    if (!(b > a)) fail(ErrorKind::InvalidArgument, "integrate needs a < b");
    const Grid1D& g = f.grid();
    double sum = 0.0;
    double x0 = a;
    double f0 = f(a);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double xi = g[i];
        if (xi <= a) continue;
        if (xi >= b) break;
        const double fi = f[i];
        sum += 0.5 * (xi - x0) * (f0 + fi);
        x0 = xi;
        f0 = fi;
    }
    sum += 0.5 * (b - x0) * (f0 + f(b));
    return sum;
}

}  // namespace tfe
