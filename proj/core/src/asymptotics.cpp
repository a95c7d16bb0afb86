#include "tfe/asymptotics.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <string>

#include "tfe/banded.hpp"
#include "tfe/errors.hpp"
#include "tfe/ode.hpp"
#include "tfe/quadrature.hpp"

namespace tfe {

namespace {

using Gauss = boost::math::quadrature::gauss<double, 20>;

bool is_resonant(double n) { return std::abs(n - 1.5) < 1e-9; }

// int over s in [s_lo, s_hi] (0 < s_lo) with panels uniform in log s.
template <class F>
double log_panels(const F& f, double s_lo, double s_hi) {
    if (!(s_hi > s_lo)) return 0.0;
    const double u0 = std::log(s_lo);
    const double u1 = std::log(s_hi);
    const int panels = std::max(2, static_cast<int>(std::ceil((u1 - u0) / 0.75)));
    const double h = (u1 - u0) / panels;
    double sum = 0.0;
    for (int k = 0; k < panels; ++k) {
        sum += Gauss::integrate([&](double u) { const double s = std::exp(u); return f(s) * s; },
                                u0 + k * h, u0 + (k + 1) * h);
    }
    return sum;
}

// Normalize to D = 1 if needed; returns the normalized params and the units used.
std::pair<ProblemParams, ScalingFactors> to_unit_friction(const ProblemParams& p) {
    p.validate();
    if (p.is_normalized() && p.D() == 1.0 && p.mass == 2.0) return {p, ScalingFactors{}};
    ProblemParams phys = p;
    phys.friction = PhysicalFriction{p.d_equivalent()};
    if (!(p.d_equivalent() > 0.0)) {
        fail(ErrorKind::InvalidArgument, "asymptotic predictions need nonzero friction");
    }
    return normalize(phys);
}

ShootingConfig leading_config() {
    ShootingConfig c;
    c.grid_cells = 2000;
    c.grid_ratio = 0.993;
    return c;
}

Profile sample(const SmoothProfile& sp, const Grid1D& grid, double scale = 1.0) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = scale * sp.at_distance(1.0 - grid[i]);
    return Profile(grid, std::move(v));
}

void require_unit_grid(const Grid1D& grid) {
    if (grid.front() != 0.0 || grid.back() != 1.0) {
        fail(ErrorKind::GridMismatch, "prediction grids must span [0,1]");
    }
}

// Union of two grids on [0,1]; nodes closer than 1e-15 are merged.
Grid1D merge_grids(const Grid1D& a, const Grid1D& b) {
    std::vector<double> x(a.nodes().begin(), a.nodes().end());
    x.insert(x.end(), b.nodes().begin(), b.nodes().end());
    std::sort(x.begin(), x.end());
    std::vector<double> out;
    out.reserve(x.size());
    for (double v : x) {
        if (out.empty() || v - out.back() > 1e-15) out.push_back(v);
    }
    out.front() = 0.0;
    out.back() = 1.0;
    return Grid1D(std::move(out));
}

}  // namespace

Grid1D correction_grid(double h_max, double ratio, double z_min) {
    if (!(h_max > 0.0 && h_max < 0.5) || !(ratio > 0.0 && ratio < 1.0) || !(z_min > 0.0 && z_min < h_max)) {
        fail(ErrorKind::InvalidArgument, "correction grid needs 0 < z_min < h_max < 1/2 and 0 < ratio < 1");
    }
    std::vector<double> z{0.0, z_min};
    while (z.back() < 1.0) z.push_back(z.back() + std::min(h_max, ratio * z.back()));
    z.back() = 1.0;
    if (z[z.size() - 2] > 1.0 - 0.3 * h_max) z.erase(z.end() - 2);
    std::vector<double> x(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) x[i] = 1.0 - z[z.size() - 1 - i];
    x.front() = 0.0;
    x.back() = 1.0;
    return Grid1D(std::move(x));
}

double PowerLaw::operator()(double t) const { return coefficient * std::pow(t, -exponent); }

double AsymptoticPrediction::s0(double t) const { return s0_prefactor * std::pow(t, gamma); }

double strong_C1(double n) {
    return integrate_weighted(
        [n](double x) { return 0.5 * x * (x + 2.0) * std::pow(1.0 + x, 1.0 - n); }, 3.0 - n, 0.0, 1.0);
}

double strong_C1_closed_form(double n) {
    if (n == 1.0) return 0.1;
    if (n == 2.0) return 5.0 / 6.0 - std::log(2.0);
    fail(ErrorKind::InvalidArgument, "closed form only for n = 1 and n = 2");
}

double strong_H1_closed_form(double n, double x) {
    if (n == 1.0) return (1.0 - x * x) * (1.0 - 5.0 * x * x) / 120.0;
    if (n == 2.0) {
        const double C1 = strong_C1_closed_form(2.0);
        const double a = x < 1.0 ? (x - 1.0) * (x - 1.0) * std::log(1.0 - x) : 0.0;
        return 0.5 * C1 * (1.0 - x * x) -
               0.25 * (3.0 - 3.0 * x * x - 2.0 * std::log(4.0) + a + (x + 1.0) * (x + 1.0) * std::log(1.0 + x));
    }
    fail(ErrorKind::InvalidArgument, "closed form only for n = 1 and n = 2");
}

namespace {

// H1(x) = C1/2 (1-x^2) - (1-x)/2 int_0^x y rho (1+x-2y) dy - 1/2 int_x^1 y rho (1-y)^2 dy,
// rho = (1-y^2)^(1-n); the order-swapped form of the double integral.
double strong_H1_at(double n, double C1, double x) {
    if (x >= 1.0) return 0.0;
    const double m = 1.0 - n;
    double left = 0.0;
    if (x > 0.0) {
        // y = 1 - s, s in [1-x, 1]
        left = log_panels(
            [&](double s) {
                const double y = 1.0 - s;
                return y * std::pow(s * (2.0 - s), m) * (1.0 + x - 2.0 * y);
            },
            1.0 - x, 1.0);
    }
    const double right = integrate_weighted(
        [&](double y) { return y * std::pow(1.0 + y, m); }, 3.0 - n, x, 1.0);
    return 0.5 * C1 * (1.0 - x * x) - 0.5 * (1.0 - x) * left - 0.5 * right;
}

}  // namespace

AsymptoticPrediction strong_prediction(const ProblemParams& params, const Grid1D& grid) {
    params.validate();
    if (params.regime() != Regime::Strong) {
        fail(ErrorKind::WrongRegime, "strong prediction needs alpha < 4/(n+3)");
    }
    require_unit_grid(grid);
    auto [p, sf] = to_unit_friction(params);
    const double n = p.n;
    const double a = p.alpha;

    AsymptoticPrediction out;
    out.regime = Regime::Strong;
    out.n = n;
    out.alpha = a;
    out.scaling = sf;

    std::vector<double> h0(grid.size()), h1(grid.size());
    const double C1 = strong_C1(n);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        h0[i] = 1.5 * (1.0 - x * x);
        h1[i] = strong_H1_at(n, C1, x);
    }
    h0.back() = 0.0;
    h1.back() = 0.0;
    out.H0 = Profile(grid, std::move(h0));
    out.H1 = Profile(grid, std::move(h1));
    out.C1 = C1;

    const double g = a / (a + 4.0);
    const double kappa = 1.0 - g * (n + 4.0);
    out.gamma = g;
    out.s0_prefactor = std::pow(3.0, 0.5 * (1.0 - g)) * std::pow(g, -g);
    out.beta = kappa;
    const double C2 = std::pow(g, kappa) * std::pow(2.0, n - 1.0) *
                      std::pow(3.0, 0.5 * (6.0 - n - (n + 4.0) * g));
    out.C2 = C2;
    out.omega = {C2, kappa};
    if (std::abs(g - 0.5 / (n + 4.0)) < 1e-12) out.s1_order = {-0.5, true};
    else out.s1_order = {-kappa, false};
    return out;
}

namespace {

// Moments of the kernel pieces of the Green function of w''' = q with w'(0) = 0,
// w(1) = w'(1) = 0:
//   G(x,y) = y (1-x)^2 / 2            for y <= x
//          = (1-y) (y - x^2) / 2      for y >= x
// and Gbar(y) = int_0^1 G(x,y) dx = (1-y) ((1-y)^2/3 - (1-y) + 2/3) / 2.
struct Moments {
    double m1 = 0.0;  // int y q
    double m2 = 0.0;  // int (1-y) y q
    double m3 = 0.0;  // int (1-y) q
    double m4 = 0.0;  // int Gbar q
};

struct Element {
    double lo, hi;
    bool last;
};

// q(y) = c(y) z^p on the last element with c smooth; on the others q is sampled directly.
template <class Q, class C>
Moments element_moments(const Element& e, const Q& q, const C& c_last, double p) {
    Moments m;
    if (!e.last) {
        m.m1 = Gauss::integrate([&](double y) { return y * q(y); }, e.lo, e.hi);
        m.m2 = Gauss::integrate([&](double y) { return (1.0 - y) * y * q(y); }, e.lo, e.hi);
        m.m3 = Gauss::integrate([&](double y) { return (1.0 - y) * q(y); }, e.lo, e.hi);
        m.m4 = Gauss::integrate(
            [&](double y) {
                const double z = 1.0 - y;
                return 0.5 * z * (z * z / 3.0 - z + 2.0 / 3.0) * q(y);
            },
            e.lo, e.hi);
        return m;
    }
    // (1-y) q = c z^(p+1): weighted quadrature toward y = 1. m1 is never needed here.
    m.m2 = integrate_weighted([&](double y) { return y * c_last(y); }, p + 1.0, e.lo, e.hi);
    m.m3 = integrate_weighted([&](double y) { return c_last(y); }, p + 1.0, e.lo, e.hi);
    m.m4 = integrate_weighted(
        [&](double y) {
            const double z = 1.0 - y;
            return 0.5 * (z * z / 3.0 - z + 2.0 / 3.0) * c_last(y);
        },
        p + 1.0, e.lo, e.hi);
    return m;
}

}  // namespace

WeakCorrectionParts weak_global_correction(double n, double alpha, const SelfSimilarSolution& leading,
                                           const Grid1D& grid) {
    if (is_resonant(n)) fail(ErrorKind::ResonantN, "n = 3/2: logarithmic resonance");
    if (n > 1.5) {
        fail(ErrorKind::NonIntegrableCorrection, "the global weak correction has no solution for n > 3/2");
    }
    if (n < 1.0) fail(ErrorKind::InvalidArgument, "n out of [1,3)");
    if (leading.D != 0.0) fail(ErrorKind::InvalidArgument, "weak correction needs the D = 0 profile");
    require_unit_grid(grid);

    const SmoothProfile H0(leading);
    const double B0 = leading.B;
    const double Ba = std::pow(B0, alpha);
    const double fscale = std::pow(B0, -2.0 / n);
    const std::size_t N = grid.size();
    const std::size_t last = N - 1;

    auto f_at = [&](double z) { return fscale * H0.at_distance(z); };
    // phi = (z^2 / f)^n, bounded and positive up to z = 0
    auto phi = [&](double y) {
        const double z = 1.0 - y;
        if (z <= 0.0) {
            const double A = fscale * leading.series.terms.front().coeff;
            return std::pow(1.0 / A, n);
        }
        return std::pow(z * z / f_at(z), n);
    };
    const double r_coef = 0.5 * (1.0 - n) * Ba;
    // r = ((1-n)/2) B0^a y (1 - y^2) / f^n;  rho = (1-n) y / f^n
    auto r = [&](double y) {
        const double z = 1.0 - y;
        return r_coef * y * z * (1.0 + y) / std::pow(f_at(z), n);
    };
    auto rho = [&](double y) { return (1.0 - n) * y / std::pow(f_at(1.0 - y), n); };
    const double p_last = 1.0 - 2.0 * n;  // r ~ z^(1-2n)

    std::vector<Element> elems(last);
    for (std::size_t e = 0; e < last; ++e) elems[e] = {grid[e], grid[e + 1], e + 1 == last};

    // v = G[r]
    std::vector<Moments> Mr(last);
    for (std::size_t e = 0; e < last; ++e) {
        Mr[e] = element_moments(elems[e], r, [&](double y) { return r_coef * y * (1.0 + y) * phi(y); }, p_last);
    }
    // Hat-function moments of rho: hat j on element e is (hi - y)/h (j = e) or (y - lo)/h (j = e+1).
    std::vector<std::array<Moments, 2>> Mh(last);
    for (std::size_t e = 0; e < last; ++e) {
        const Element& el = elems[e];
        const double h = el.hi - el.lo;
        auto left_hat = [&](double y) { return rho(y) * (el.hi - y) / h; };
        auto right_hat = [&](double y) { return rho(y) * (y - el.lo) / h; };
        // On the last element the left hat is z/h, so (1-y) rho hat = (1-n) y phi z^(2-2n) / h.
        auto left_last = [&](double y) { return (1.0 - n) * y * phi(y) / h; };
        Mh[e][0] = element_moments(el, left_hat, left_last, p_last);
        if (!el.last) Mh[e][1] = element_moments(el, right_hat, left_last, 0.0);
    }

    // Prefix sums over elements to the left of node i, suffix sums to the right.
    std::vector<double> v(N, 0.0), dv(N, 0.0);
    {
        std::vector<double> left1(N, 0.0), right2(N, 0.0), right3(N, 0.0);
        for (std::size_t i = 1; i < N; ++i) left1[i] = left1[i - 1] + (elems[i - 1].last ? 0.0 : Mr[i - 1].m1);
        for (std::size_t i = last; i-- > 0;) {
            right2[i] = right2[i + 1] + Mr[i].m2;
            right3[i] = right3[i + 1] + Mr[i].m3;
        }
        for (std::size_t i = 0; i < N; ++i) {
            const double x = grid[i];
            v[i] = 0.5 * (1.0 - x) * (1.0 - x) * left1[i] + 0.5 * (right2[i] - x * x * right3[i]);
            dv[i] = -(1.0 - x) * left1[i] - x * right3[i];
        }
        v[last] = 0.0;
        dv[last] = 0.0;
    }

    // Nystrom: u = v + G[rho u_h] at nodes 0..N-2 (u(1) = 0).
    const std::size_t M = last;
    std::vector<double> K(M * M, 0.0), dK(M * M, 0.0);
    for (std::size_t i = 0; i < M; ++i) {
        const double x = grid[i];
        for (std::size_t e = 0; e < last; ++e) {
            const bool left_of_x = elems[e].hi <= x;
            for (int side = 0; side < 2; ++side) {
                const std::size_t j = e + static_cast<std::size_t>(side);
                if (j >= M) continue;
                const Moments& m = Mh[e][side];
                double val, der;
                if (left_of_x) {
                    val = 0.5 * (1.0 - x) * (1.0 - x) * m.m1;
                    der = -(1.0 - x) * m.m1;
                } else {
                    val = 0.5 * (m.m2 - x * x * m.m3);
                    der = -x * m.m3;
                }
                K[i * M + j] += val;
                dK[i * M + j] += der;
            }
        }
    }
    std::vector<double> A(M * M);
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t j = 0; j < M; ++j) A[i * M + j] = (i == j ? 1.0 : 0.0) - K[i * M + j];
    }
    std::vector<double> rhs(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(M));
    std::vector<double> u = solve_dense(std::move(A), M, rhs);
    u.push_back(0.0);

    std::vector<double> du(N, 0.0);
    for (std::size_t i = 0; i < M; ++i) {
        double s = dv[i];
        for (std::size_t j = 0; j < M; ++j) s += dK[i * M + j] * u[j];
        du[i] = s;
    }
    // x = 1: every kernel derivative vanishes there.
    du[last] = dv[last];

    WeakCorrectionParts parts;
    std::vector<double> fv(N), gv(N), wv(N), dg(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double x = grid[i];
        fv[i] = f_at(1.0 - x);
        gv[i] = 0.5 * Ba * (1.0 - x * x) + u[i];
        wv[i] = u[i] - v[i];
        dg[i] = -Ba * x + du[i];
    }
    fv[last] = 0.0;
    gv[last] = 0.0;

    // int u = int Gbar r + sum_j u_j int Gbar rho hat_j
    double int_u = 0.0;
    for (std::size_t e = 0; e < last; ++e) {
        int_u += Mr[e].m4;
        int_u += Mh[e][0].m4 * u[e];
        if (!elems[e].last) int_u += Mh[e][1].m4 * u[e + 1];
    }
    parts.integral_f = fscale;  // int H0 = 1
    parts.integral_g = Ba / 3.0 + int_u;

    // C6 = ((n-1)/2) B0^a int x (1-x)^2 (1+x) / f^n
    parts.C6 = 0.5 * (n - 1.0) * Ba *
               integrate_weighted([&](double x) { return x * (1.0 + x) * phi(x); }, 2.0 - 2.0 * n, 0.0, 1.0);

    // Coercivity identity on the discrete w (piecewise-linear between nodes).
    const double C2 = n * parts.integral_g / parts.integral_f;
    std::vector<double> dw(N);
    for (std::size_t i = 0; i < N; ++i) dw[i] = du[i] - dv[i];
    double lhs = 0.0, rhs_q = 0.0, grad = 0.0;
    for (std::size_t e = 0; e < last; ++e) {
        const Element& el = elems[e];
        const double h = el.hi - el.lo;
        auto lin = [&](const std::vector<double>& a, double y) {
            return (a[e] * (el.hi - y) + a[e + 1] * (y - el.lo)) / h;
        };
        grad += Gauss::integrate([&](double y) { const double d = lin(dw, y); return d * d; }, el.lo, el.hi);
        if (!el.last) {
            auto weight = [&](double y) { return y * y / std::pow(f_at(1.0 - y), n); };
            lhs += Gauss::integrate(
                [&](double y) {
                    const double wy = lin(wv, y);
                    return weight(y) * wy * ((n - 1.0) * wy + (1.0 - n) * lin(u, y));
                },
                el.lo, el.hi);
            rhs_q += Gauss::integrate([&](double y) { const double wy = lin(wv, y); return weight(y) * wy * wy; },
                                      el.lo, el.hi);
        } else {
            // w and u are linear and vanish at y = 1: w = w_e z/h, u = u_e z/h.
            const double we = wv[e] / h;
            const double ue = u[e] / h;
            const double base = integrate_weighted([&](double y) { return y * y * phi(y); }, 2.0 - 2.0 * n, el.lo, el.hi);
            lhs += we * ((n - 1.0) * we + (1.0 - n) * ue) * base;
            rhs_q += we * we * base;
        }
    }
    parts.coercivity_lhs = lhs;
    parts.coercivity_rhs = (n - 1.0) * rhs_q + 1.5 * grad;

    std::vector<double> h1(N), dh1(N);
    const SmoothProfile& H0s = H0;
    for (std::size_t i = 0; i < N; ++i) {
        const double z = 1.0 - grid[i];
        const double df = fscale * H0s.slope_at_distance(z);
        h1[i] = -(C2 / n) * fv[i] + gv[i];
        dh1[i] = -(C2 / n) * df + dg[i];
    }
    // Hermite-corrected trapezoid with the exact nodal slopes.
    double int_h1 = 0.0;
    for (std::size_t e = 0; e < last; ++e) {
        const double h = grid.spacing(e);
        int_h1 += 0.5 * h * (h1[e] + h1[e + 1]) - h * h / 12.0 * (dh1[e + 1] - dh1[e]);
    }
    parts.integral_H1 = int_h1;

    parts.f = Profile(grid, std::move(fv));
    parts.g = Profile(grid, std::move(gv));
    parts.v = Profile(grid, std::move(v));
    parts.w = Profile(grid, std::move(wv));
    parts.dH1 = Profile(grid, std::move(dh1));
    return parts;
}

AsymptoticPrediction weak_prediction(const ProblemParams& params, const Grid1D& grid) {
    params.validate();
    if (params.regime() != Regime::Weak) {
        fail(ErrorKind::WrongRegime, "weak prediction needs alpha > 4/(n+3)");
    }
    if (is_resonant(params.n)) fail(ErrorKind::ResonantN, "n = 3/2: logarithmic resonance");
    require_unit_grid(grid);
    auto [p, sf] = to_unit_friction(params);
    const double n = p.n;
    const double a = p.alpha;

    AsymptoticPrediction out;
    out.regime = Regime::Weak;
    out.n = n;
    out.alpha = a;
    out.scaling = sf;

    SelfSimilarSolution lead = solve(n, 0.0, leading_config());
    const double B0 = lead.B;
    out.B0 = B0;
    out.H0 = sample(SmoothProfile(lead), grid);
    out.gamma = 1.0 / (n + 4.0);
    out.s0_prefactor = std::pow((n + 4.0) * B0 * B0, out.gamma);
    const double beta = (a * (n + 3.0) - 4.0) / (2.0 * (n + 4.0));
    out.beta = beta;
    out.omega = {std::pow((n + 4.0) * B0 * B0, -beta), beta};
    if (std::abs(a - 2.0 * (n + 6.0) / (n + 3.0)) < 1e-12) out.s1_order = {-1.0, true};
    else out.s1_order = {-beta, false};

    if (n < 1.5) {
        const Grid1D fine = merge_grids(correction_grid(), grid);
        WeakCorrectionParts parts = weak_global_correction(n, a, lead, fine);
        const double C2 = n * parts.integral_g / parts.integral_f;
        out.C2 = C2;
        std::vector<double> h1(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const std::size_t k = fine.locate(grid[i] + 0.5e-15);
            h1[i] = -(C2 / n) * parts.f[k] + parts.g[k];
        }
        h1.back() = 0.0;
        out.H1 = Profile(grid, std::move(h1));
        out.weak_parts = std::move(parts);
    } else {
        out.inner = inner_traveling_wave(n, a, 1.0);
    }
    out.leading = std::move(lead);
    return out;
}

AsymptoticPrediction predict(const ProblemParams& params, const Grid1D& grid) {
    params.validate();
    switch (params.regime()) {
        case Regime::Strong: return strong_prediction(params, grid);
        case Regime::Weak: return weak_prediction(params, grid);
        case Regime::Balanced: break;
    }
    require_unit_grid(grid);
    AsymptoticPrediction out;
    out.regime = Regime::Balanced;
    out.n = params.n;
    out.alpha = params.alpha;
    SelfSimilarSolution sol = solve(params, leading_config());
    out.H0 = sample(SmoothProfile(sol), grid);
    out.gamma = sol.gamma;
    out.s0_prefactor = std::pow(sol.B * sol.B / sol.gamma, sol.gamma);
    out.omega = {0.0, 0.0};
    out.s1_order = {0.0, false};
    out.B0 = sol.B;
    out.leading = std::move(sol);
    return out;
}

// ---------------------------------------------------------------------------
// Inner traveling wave

namespace {

// The far field has a mode growing like xi^(2.15..) relative to the separatrix, so the
// shooting runs in long double; rounding in double would swamp it long before xi_max.
using Real = long double;
using State3 = std::array<Real, 3>;

struct InnerShooter {
    double n, sdot, theta, xi0, xi_shoot;
    int terms = 5;

    LocalSeries series(double a) const { return series_expansion(sdot, theta, n, terms, a, 0.0); }

    // Start state for a = a_hi + a_lo; the a_lo part only enters through the xi^2 term.
    State3 start(Real a) const {
        const double ad = static_cast<double>(a);
        const Real da = a - ad;
        const LocalSeries s = series(ad);
        const Real x = xi0;
        return {Real(s.value(xi0)) + da * x * x, Real(s.dz(xi0)) + 2 * da * x, Real(s.dzz(xi0)) + 2 * da};
    }

    auto rhs() const {
        return [m = Real(1) - Real(n), sdot = Real(sdot)](Real, const State3& y, State3& dy) {
            dy[0] = y[1];
            dy[1] = y[2];
            dy[2] = -sdot * std::pow(y[0], m);
        };
    }

    OdeOptions options() const {
        OdeOptions o;
        o.rtol = 1e-16;
        o.atol = 1e-300;
        o.h_init = 0.1 * xi0;
        o.h_min = 1e-6 * xi0;
        o.max_steps = 5000000;
        return o;
    }

    // +1: a above the separatrix (F outgrows C5 xi^q or F'' > 0 up to xi_shoot);
    // -1: F'' turns negative or F falls clearly below C5 xi^q. The shot runs far past
    // xi_max so that the selected a leaves no visible growing mode on [0, xi_max].
    int classify(Real a) const {
        const State3 y0 = start(a);
        if (!(y0[0] > 0) || y0[2] < 0) return -1;
        const Real amp = std::pow(Real(sdot), 1 / Real(n)) * touchdown_constant(n);
        const Real q = 3 / Real(n);
        int verdict = 0;
        auto valid = [](Real, const State3& y) { return y[0] > 0; };
        auto stop = [&](Real x, const State3& y) {
            if (y[2] < 0) { verdict = -1; return true; }
            if (x > 1e3) {
                const Real ratio = y[0] / (amp * std::pow(x, q));
                if (ratio > 1.1L) { verdict = 1; return true; }
                if (ratio < 0.9L) { verdict = -1; return true; }
            }
            return false;
        };
        auto none = [](Real, const State3&) {};
        const auto r = dopri5<3, Real>(rhs(), xi0, xi_shoot, y0, options(), valid, stop, none);
        if (verdict != 0) return verdict;
        return r.status == OdeStatus::Done ? +1 : -1;
    }
};

}  // namespace

double InnerTravelingWave::operator()(double xi) const {
    if (xi <= 0.0) return 0.0;
    if (xi > xi_max) {
        const double q = 3.0 / n;
        return std::pow(s0_dot, 1.0 / n) *
               (touchdown_constant(n) * std::pow(xi, q) + b_in * std::pow(xi, q - 1.0) + c_in * std::pow(xi, decay_power));
    }
    const Grid1D& g = profile.grid();
    if (xi <= g[1]) return near_field.value(xi);
    const std::size_t i = g.locate(xi);
    const double h = g.spacing(i);
    const double t = (xi - g[i]) / h;
    // cubic Hermite with nodal slopes
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * profile[i] + (t3 - 2 * t2 + t) * h * slope[i] +
           (-2 * t3 + 3 * t2) * profile[i + 1] + (t3 - t2) * h * slope[i + 1];
}

InnerTravelingWave inner_traveling_wave(double n, double alpha, double s0_dot, const InnerOptions& opts) {
    if (!(n > 1.5 && n < 3.0) || is_resonant(n)) {
        fail(ErrorKind::InvalidArgument, "inner traveling wave needs n in (3/2, 3)");
    }
    if (!(alpha > 0.0) || !(s0_dot > 0.0)) fail(ErrorKind::InvalidArgument, "alpha and s0_dot must be > 0");
    if (!(opts.xi_max > 1.0) || opts.profile_points < 16) {
        fail(ErrorKind::InvalidArgument, "xi_max must exceed 1 and the profile needs >= 16 points");
    }

    const double theta = std::pow(s0_dot, 0.5 * alpha);
    InnerShooter sh{n, s0_dot, theta, 0.0, std::max(1e30, 1e6 * opts.xi_max)};
    sh.xi0 = std::min(opts.xi_start, 1e-3 * std::pow(std::pow(theta, n) / s0_dot, 1.0 / (3.0 - n)));
    if (!(sh.xi0 > 1e-30)) fail(ErrorKind::DegenerateStart, "inner series start point underflows");

    // Bracket: a too small turns F'' negative, a too large keeps F'' > 0 at xi_max.
    Real lo = -1, hi = 1;
    int guard = 0;
    while (sh.classify(lo) > 0 && guard++ < 200) { hi = lo; lo *= 2.0; }
    while (sh.classify(hi) < 0 && guard++ < 200) { lo = hi; hi *= 2.0; }
    if (sh.classify(lo) > 0 || sh.classify(hi) < 0) {
        fail(ErrorKind::NoConvergence, "could not bracket the inner coefficient a_in");
    }
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        const Real mid = (lo + hi) / 2;
        if (mid <= lo || mid >= hi) break;
        if (sh.classify(mid) > 0) hi = mid; else lo = mid;
    }
    if (it >= opts.max_iterations) fail(ErrorKind::NoConvergence, "inner shooting exceeded iteration budget");

    InnerTravelingWave tw;
    tw.s0_dot = s0_dot;
    tw.n = n;
    tw.alpha = alpha;
    tw.a_in = static_cast<double>(hi);
    tw.xi_max = opts.xi_max;
    tw.near_field = sh.series(tw.a_in);
    tw.near_field.z0 = sh.xi0;

    // Profile on a geometric grid from xi0 to xi_max, plus the origin.
    const std::size_t P = static_cast<std::size_t>(opts.profile_points);
    std::vector<double> xs(P);
    xs[0] = 0.0;
    const double l0 = std::log(sh.xi0), l1 = std::log(opts.xi_max);
    for (std::size_t k = 1; k < P; ++k) xs[k] = std::exp(l0 + (l1 - l0) * static_cast<double>(k - 1) / static_cast<double>(P - 2));
    xs[1] = sh.xi0;
    xs[P - 1] = opts.xi_max;
    Grid1D grid(xs);

    std::vector<double> F(P), dF(P), d2F(P);
    F[0] = 0.0;
    dF[0] = theta;
    d2F[0] = tw.near_field.dzz(0.0);
    State3 y = sh.start(hi);
    F[1] = static_cast<double>(y[0]);
    dF[1] = static_cast<double>(y[1]);
    d2F[1] = static_cast<double>(y[2]);
    OdeOptions o = sh.options();
    auto rhs = sh.rhs();
    auto valid = [](Real, const State3& s) { return s[0] > 0; };
    auto never = [](Real, const State3&) { return false; };
    auto none = [](Real, const State3&) {};
    for (std::size_t k = 2; k < P; ++k) {
        o.h_init = 0.01 * (xs[k] - xs[k - 1]);
        const auto r = dopri5<3, Real>(rhs, xs[k - 1], xs[k], y, o, valid, never, none);
        if (r.status != OdeStatus::Done) {
            fail(ErrorKind::BlowUp, "inner profile touched down before xi_max");
        }
        y = r.y;
        F[k] = static_cast<double>(y[0]);
        dF[k] = static_cast<double>(y[1]);
        d2F[k] = static_cast<double>(y[2]);
    }
    if (d2F[P - 1] < 0.0) fail(ErrorKind::BlowUp, "inner curvature negative at xi_max");
    tw.profile = Profile(grid, std::move(F));
    tw.slope = Profile(grid, std::move(dF));
    tw.curvature = Profile(grid, std::move(d2F));

    // Far field: F / sdot^(1/n) - C5 xi^q ~ b xi^(q-1) + c xi^m + g xi^p_grow. The
    // growing mode only soaks up the residual left by the shooting; rows carry a noise
    // floor of 1e-11 relative to F, roughly the integration error at the far end.
    const double q = 3.0 / n;
    double pr = 2.0, ph = 3.0;
    const double R = (n - 1.0) * q * (q - 1.0) * (2.0 - q);
    while (ph * (ph - 1.0) * (ph - 2.0) < R) ph *= 2.0;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (pr + ph);
        if (mid * (mid - 1.0) * (mid - 2.0) < R) pr = mid; else ph = mid;
    }
    const double p_grow = 0.5 * (pr + ph);
    const double m = 4.0 - q - p_grow;
    tw.decay_power = m;
    const double C5 = touchdown_constant(n);
    const double amp = std::pow(s0_dot, 1.0 / n);
    // Each column is scaled by its value at the window's right end.
    const double x_lo = std::min(1e2, 1e-2 * opts.xi_max);
    const double x_hi = opts.xi_max;
    const std::array<double, 3> pw{q - 1.0, m, p_grow};
    std::array<double, 3> cs{};
    for (int j = 0; j < 3; ++j) cs[j] = std::pow(x_hi, pw[j]);
    std::vector<double> N3(9, 0.0), rhs3(3, 0.0);
    for (std::size_t k = 1; k < P; ++k) {
        const double xi = xs[k];
        if (xi < x_lo) continue;
        const double w = 1.0 / (std::pow(xi, q - 1.0) + 1e-11 * C5 * std::pow(xi, q));
        const double res = (tw.profile[k] / amp - C5 * std::pow(xi, q)) * w;
        std::array<double, 3> e{};
        for (int j = 0; j < 3; ++j) e[j] = std::pow(xi, pw[j]) / cs[j] * w;
        for (int i = 0; i < 3; ++i) {
            rhs3[i] += e[i] * res;
            for (int j = 0; j < 3; ++j) N3[3 * i + j] += e[i] * e[j];
        }
    }
    const std::vector<double> coef = solve_dense(std::move(N3), 3, rhs3);
    tw.b_in = coef[0] / cs[0];
    tw.c_in = coef[1] / cs[1];
    return tw;
}

namespace {

double smoothstep(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

void require_weak_matched(const AsymptoticPrediction& pred) {
    if (pred.regime != Regime::Weak || !(pred.n > 1.5 && pred.n < 3.0) || !pred.B0 || !pred.leading) {
        fail(ErrorKind::WrongRegime, "matched composite needs a weak prediction with n in (3/2, 3)");
    }
}

}  // namespace

MatchingAudit matching_audit(const AsymptoticPrediction& pred, double t) {
    require_weak_matched(pred);
    const double n = pred.n;
    const double B0 = *pred.B0;
    const double s0 = pred.s0(t);
    const double sdot = B0 * B0 * std::pow(s0, -(n + 3.0));
    const double C5 = touchdown_constant(n);
    MatchingAudit a;
    a.inner_constant = std::pow(sdot, 1.0 / n) * std::pow(s0, (n + 3.0) / n) * C5;
    a.outer_constant = std::pow(B0, 2.0 / n) * C5;
    a.relative_error = std::abs(a.inner_constant - a.outer_constant) / a.outer_constant;
    a.contact_slope = s0 * s0 * std::pow(sdot, 0.5 * pred.alpha);
    a.predicted_slope = std::pow(B0, pred.alpha) * std::pow((n + 4.0) * B0 * B0 * t, -*pred.beta);
    return a;
}

double matched_composite(const AsymptoticPrediction& pred, const InnerTravelingWave& tw, double t, double x) {
    require_weak_matched(pred);
    if (std::abs(tw.n - pred.n) > 1e-12 || std::abs(tw.alpha - pred.alpha) > 1e-12) {
        fail(ErrorKind::InvalidArgument, "traveling wave was computed for different (n, alpha)");
    }
    if (!(t > 0.0)) fail(ErrorKind::InvalidArgument, "t must be > 0");
    if (x < 0.0) x = -x;
    if (x >= 1.0) return 0.0;
    const double n = pred.n;
    const double B0 = *pred.B0;
    const double s0 = pred.s0(t);
    const double sdot = B0 * B0 * std::pow(s0, -(n + 3.0));
    const double xi = s0 * (1.0 - x);

    auto outer = [&] { return SmoothProfile(*pred.leading).at_distance(1.0 - x); };
    // F for speed sdot from the stored wave: F(xi) = lam F_tw(mu xi), lam^n mu^3 = r, lam mu = r^(a/2)
    auto inner = [&] {
        const double r = sdot / tw.s0_dot;
        const double mu = std::pow(r, (1.0 - 0.5 * n * pred.alpha) / (3.0 - n));
        const double lam = std::pow(r, 0.5 * pred.alpha) / mu;
        return s0 * lam * tw(mu * xi);
    };
    if (xi <= 1.0) return inner();
    if (xi >= 10.0) return outer();
    const double w = smoothstep(std::log10(xi));
    return (1.0 - w) * inner() + w * outer();
}

}  // namespace tfe
