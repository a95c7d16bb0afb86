#include "tfe/selfsimilar.hpp"

#include <algorithm>
#include <array>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "tfe/errors.hpp"
#include "tfe/ode.hpp"

namespace tfe {

void ShootingConfig::validate() const {
    if (!(tol_B > 0.0)) fail(ErrorKind::InvalidArgument, "tol_B must be > 0");
    if (!(eps_start > 0.0 && eps_start < 1e-2)) {
        fail(ErrorKind::InvalidArgument, "eps_start must lie in (0, 1e-2)");
    }
    if (series_terms < 2) fail(ErrorKind::InvalidArgument, "series_terms must be >= 2");
    if (grid_cells < 4) fail(ErrorKind::InvalidArgument, "grid_cells must be >= 4");
    if (!(grid_ratio > 0.0 && grid_ratio <= 1.0)) {
        fail(ErrorKind::InvalidArgument, "grid_ratio must lie in (0, 1]");
    }
}

namespace {

double term_value(const SeriesTerm& t, double z) {
    if (z <= 0.0) return 0.0;
    const double zp = std::pow(z, t.power);
    return t.log_power == 0 ? t.coeff * zp : t.coeff * zp * std::log(z);
}

double term_dz(const SeriesTerm& t, double z) {
    if (z <= 0.0) return t.power == 1.0 && t.log_power == 0 ? t.coeff : 0.0;
    const double zp = std::pow(z, t.power - 1.0);
    if (t.log_power == 0) return t.coeff * t.power * zp;
    return t.coeff * zp * (t.power * std::log(z) + 1.0);
}

double term_dzz(const SeriesTerm& t, double z) {
    if (z <= 0.0) return 0.0;
    const double zp = std::pow(z, t.power - 2.0);
    if (t.log_power == 0) return t.coeff * t.power * (t.power - 1.0) * zp;
    return t.coeff * zp * (t.power * (t.power - 1.0) * std::log(z) + 2.0 * t.power - 1.0);
}

double term_integral(const SeriesTerm& t, double z) {
    if (z <= 0.0) return 0.0;
    const double q = t.power + 1.0;
    const double zq = std::pow(z, q);
    if (t.log_power == 0) return t.coeff * zq / q;
    return t.coeff * (zq * std::log(z) / q - zq / (q * q));
}

bool near(double a, double b) { return std::abs(a - b) < 1e-6; }

// Root p > 2 of p (p-1) (p-2) = r for r > 0.
double cubic_root_above_two(double r) {
    double lo = 2.0;
    double hi = 3.0;
    while (hi * (hi - 1.0) * (hi - 2.0) < r) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid * (mid - 1.0) * (mid - 2.0) < r) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

LocalSeries series_expansion(double k, double theta, double n, int terms, double free, double tilt) {
    LocalSeries s;
    s.free_coefficient = free;
    std::vector<SeriesTerm> all;
    if (theta > 0.0) {
        all.push_back({theta, 1.0, 0});
        all.push_back({free, 2.0, 0});
        s.free_power = 2.0;
        const double th1 = std::pow(theta, 1.0 - n);
        if (near(n, 2.0)) {
            all.push_back({-k / (2.0 * theta), 2.0, 1});
            // z^3 terms: linear response to the z^2 and z^2 log z parts of H.
            const double c_lin = -k * th1 * ((1.0 - n) * free / theta - tilt) / 6.0;
            all.push_back({c_lin + 11.0 * k * k / (72.0 * std::pow(theta, 3.0)), 3.0, 0});
            all.push_back({-k * k / (12.0 * std::pow(theta, 3.0)), 3.0, 1});
        } else {
            const double c3 = -k * th1 / ((4.0 - n) * (3.0 - n) * (2.0 - n));
            all.push_back({c3, 4.0 - n, 0});
            all.push_back({-k * th1 * ((1.0 - n) * free / theta - tilt) /
                               ((5.0 - n) * (4.0 - n) * (3.0 - n)),
                           5.0 - n, 0});
            if (!near(n, 2.5) && n != 1.0) {
                all.push_back({-k * std::pow(theta, -n) * (1.0 - n) * c3 /
                                   ((7.0 - 2.0 * n) * (6.0 - 2.0 * n) * (5.0 - 2.0 * n)),
                               7.0 - 2.0 * n, 0});
            }
        }
    } else if (n < 1.5) {
        const double A = free;
        s.free_power = 2.0;
        all.push_back({A, 2.0, 0});
        const double kA = k * std::pow(A, 1.0 - n);
        const double c5 = -kA / ((5.0 - 2.0 * n) * (4.0 - 2.0 * n) * (3.0 - 2.0 * n));
        all.push_back({c5, 5.0 - 2.0 * n, 0});
        all.push_back({tilt * kA / ((6.0 - 2.0 * n) * (5.0 - 2.0 * n) * (4.0 - 2.0 * n)), 6.0 - 2.0 * n, 0});
        if (n != 1.0) {
            all.push_back({-(1.0 - n) * k * std::pow(A, -n) * c5 /
                               ((8.0 - 4.0 * n) * (7.0 - 4.0 * n) * (6.0 - 4.0 * n)),
                           8.0 - 4.0 * n, 0});
        }
    } else {
        const double q = 3.0 / n;
        const double C = std::pow(k, 1.0 / n) * touchdown_constant(n);
        const double b1 = tilt * (2.0 - q) / (6.0 - 2.0 * n);
        const double p = cubic_root_above_two((n - 1.0) * q * (q - 1.0) * (2.0 - q));
        s.free_power = p;
        all.push_back({C, q, 0});
        all.push_back({free, p, 0});
        all.push_back({C * b1, q + 1.0, 0});
    }
    const std::size_t keep = std::min<std::size_t>(all.size(), static_cast<std::size_t>(std::max(terms, 2)));
    s.terms.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep));
    return s;
}

namespace {

using State = std::array<double, 4>;  // H, H_z, H_zz, int_0^z H

struct Shot {
    bool reached = false;
    double mismatch = 0.0;  // H_z(1), or a negative surrogate if the profile touched down early
    double mass = 0.0;      // int_0^1 H dz when reached
};

struct ShootingProblem {
    double k;
    double theta;
    double n;
    int terms;
    double z0;

    LocalSeries series(double free) const {
        LocalSeries s = series_expansion(k, theta, n, terms, free, 1.0);
        s.z0 = z0;
        return s;
    }

    State start(const LocalSeries& s) const {
        return {s.value(z0), s.dz(z0), s.dzz(z0), s.integral(z0)};
    }

    auto rhs() const {
        return [k = k, n = n](double z, const State& y, State& dy) {
            dy[0] = y[1];
            dy[1] = y[2];
            dy[2] = n == 1.0 ? -k * (1.0 - z) : -k * (1.0 - z) * std::pow(y[0], 1.0 - n);
            dy[3] = y[0];
        };
    }

    static OdeOptions options() {
        OdeOptions o;
        o.rtol = 1e-13;
        o.atol = 1e-300;
        o.max_steps = 400000;
        return o;
    }

    Shot shoot(double free) const {
        const LocalSeries s = series(free);
        State y0 = start(s);
        Shot shot;
        if (!(y0[0] > 0.0)) {
            shot.mismatch = -1.0 - std::abs(free);
            return shot;
        }
        OdeOptions o = options();
        o.h_init = z0 * 0.1;
        auto valid = [](double, const State& y) { return y[0] > 0.0 && std::isfinite(y[2]); };
        auto stop = [](double, const State& y) { return y[1] < 0.0 && y[2] < 0.0; };
        auto none = [](double, const State&) {};
        const auto r = dopri5<4, double>(rhs(), z0, 1.0, y0, o, valid, stop, none);
        const double rest = 1.0 - r.t;
        switch (r.status) {
            case OdeStatus::Done:
                shot.reached = true;
                shot.mismatch = r.y[1];
                shot.mass = r.y[3];
                return shot;
            case OdeStatus::Stopped:
                // Concave H_z that is already negative stays negative up to z = 1.
                shot.mismatch = r.y[1] + r.y[2] * rest;
                return shot;
            default:
                shot.mismatch = std::min(r.y[1], 0.0) + std::min(r.y[2], 0.0) * rest - rest;
                return shot;
        }
    }
};

double start_point(double k, double theta, double n, double eps_start) {
    if (theta <= 0.0) return eps_start;
    double z0 = eps_start;
    if (n > 1.0) {
        z0 = std::min(z0, 1e-3 * std::pow(std::pow(theta, n) / k, 1.0 / (3.0 - n)));
    }
    if (!(z0 > 1e-14)) {
        fail(ErrorKind::DegenerateStart, "series start point below 1e-14; contact slope too small");
    }
    return z0;
}

ShootingProblem make_problem(double k, double theta, double n, const ShootingConfig& cfg) {
    if (theta == 0.0 && near(n, 1.5)) {
        fail(ErrorKind::UnsupportedN, "n = 3/2 with zero contact angle (logarithmic resonance)");
    }
    if (n >= 3.0 || n < 1.0) fail(ErrorKind::DegenerateStart, "series requires 1 <= n < 3");
    return ShootingProblem{k, theta, n, cfg.series_terms, start_point(k, theta, n, cfg.eps_start)};
}

struct FreeSolve {
    double free = 0.0;
    double mass = 0.0;
};

// Shoot on the free coefficient until H_z(1) = 0; the mismatch increases with it.
FreeSolve solve_free(const ShootingProblem& prob, int max_iter) {
    double guess = 0.0;
    if (prob.theta > 0.0) guess = prob.k / 6.0 - 0.5 * prob.theta;
    else if (prob.n < 1.5) guess = prob.k / 6.0;
    double width = std::max(1.0, std::abs(guess));
    double lo = guess - width;
    double hi = guess + width;
    Shot flo = prob.shoot(lo);
    Shot fhi = prob.shoot(hi);
    int grow = 0;
    while (flo.mismatch > 0.0 && grow++ < 200) {
        hi = lo;
        fhi = flo;
        width *= 2.0;
        lo = hi - width;
        flo = prob.shoot(lo);
    }
    while (fhi.mismatch < 0.0 && grow++ < 200) {
        lo = hi;
        flo = fhi;
        width *= 2.0;
        hi = lo + width;
        fhi = prob.shoot(hi);
    }
    if (flo.mismatch > 0.0 || fhi.mismatch < 0.0) {
        fail(ErrorKind::NoConvergence, "could not bracket the free series coefficient");
    }
    if (flo.mismatch == 0.0 && flo.reached) return {lo, flo.mass};
    if (fhi.mismatch == 0.0 && fhi.reached) return {hi, fhi.mass};

    boost::uintmax_t iters = static_cast<boost::uintmax_t>(max_iter);
    auto f = [&](double a) { return prob.shoot(a).mismatch; };
    const auto root = boost::math::tools::toms748_solve(
        f, lo, hi, flo.mismatch, fhi.mismatch, boost::math::tools::eps_tolerance<double>(50), iters);
    if (iters >= static_cast<boost::uintmax_t>(max_iter)) {
        fail(ErrorKind::NoConvergence, "free coefficient shooting exceeded iteration budget");
    }
    // Take the endpoint whose shot actually reaches x = 0.
    const double a = 0.5 * (root.first + root.second);
    Shot s = prob.shoot(a);
    if (!s.reached) s = prob.shoot(root.second);
    if (!s.reached) fail(ErrorKind::NoConvergence, "converged profile touches down before x = 0");
    return {s.reached ? a : root.second, s.mass};
}

// Normalized problem G^(n-1) G''' = x, G(1) = 0, G'(1) = -sigma.
struct Normalized {
    ShootingProblem prob;
    FreeSolve fs;
    double c = 0.0;  // H = c G has unit mass
    double D = 0.0;
};

Normalized normalized_solve(double n, double sigma, const ShootingConfig& cfg) {
    Normalized out{make_problem(1.0, sigma, n, cfg), {}, 0.0, 0.0};
    out.fs = solve_free(out.prob, cfg.max_iterations);
    out.c = 1.0 / out.fs.mass;
    out.D = sigma * std::pow(out.c, (3.0 - n) / (n + 3.0));
    return out;
}

Grid1D output_grid(const ShootingConfig& cfg) {
    return Grid1D::graded(0.0, 1.0, static_cast<std::size_t>(cfg.grid_cells), cfg.grid_ratio);
}

// Quintic Hermite quadrature on the nodes (uses H, H', H''); the cell touching x = 1,
// where H'' may be unbounded, is integrated from the local series.
double hermite_mass(const Profile& h, const Profile& dh, const Profile& d2h, const LocalSeries& s) {
    const Grid1D& g = h.grid();
    const std::size_t last = g.size() - 2;
    double m = 0.0;
    for (std::size_t i = 0; i < last; ++i) {
        const double dx = g.spacing(i);
        m += 0.5 * dx * (h[i] + h[i + 1]) + dx * dx / 10.0 * (dh[i] - dh[i + 1]) +
             dx * dx * dx / 120.0 * (d2h[i] + d2h[i + 1]);
    }
    return m + s.integral(1.0 - g[last]);
}

SelfSimilarSolution assemble(double n, double D, const Normalized& sol, const ShootingConfig& cfg) {
    const Grid1D grid = output_grid(cfg);
    const std::size_t N = grid.size();
    const LocalSeries s = sol.prob.series(sol.fs.free);
    std::vector<double> G(N), Gz(N), Gzz(N);

    // Nodes are visited in increasing z = 1 - x, i.e. from the last node backwards.
    State y = sol.prob.start(s);
    double z = sol.prob.z0;
    OdeOptions o = ShootingProblem::options();
    o.h_init = z * 0.1;
    auto rhs = sol.prob.rhs();
    for (std::size_t r = 0; r < N; ++r) {
        const std::size_t i = N - 1 - r;
        const double zi = (i == 0) ? 1.0 : 1.0 - grid[i];
        if (zi <= sol.prob.z0) {
            G[i] = s.value(zi);
            Gz[i] = s.dz(zi);
            Gzz[i] = s.dzz(zi);
            continue;
        }
        const auto res = dopri5<4, double>(rhs, z, zi, y, o);
        if (res.status != OdeStatus::Done) {
            fail(ErrorKind::NoConvergence, "profile reconstruction failed");
        }
        y = res.y;
        z = zi;
        G[i] = y[0];
        Gz[i] = y[1];
        Gzz[i] = y[2];
    }
    G[N - 1] = 0.0;

    const double c = sol.c;
    SelfSimilarSolution out;
    out.n = n;
    out.D = D;
    out.alpha = critical_alpha(n);
    out.gamma = 1.0 / (n + 4.0);
    out.B = std::pow(c, 0.5 * n);
    std::vector<double> H(N), dH(N), d2H(N);
    for (std::size_t i = 0; i < N; ++i) {
        H[i] = c * G[i];
        dH[i] = -c * Gz[i];
        d2H[i] = c * Gzz[i];
    }
    out.profile = Profile(grid, std::move(H));
    out.slope = Profile(grid, std::move(dH));
    out.curvature = Profile(grid, std::move(d2H));
    out.s_law = {out.B * out.B / out.gamma, out.gamma};

    // Series of H itself: H = c G, so every coefficient scales by c.
    out.series = s;
    for (auto& t : out.series.terms) t.coeff *= c;
    out.series.free_coefficient *= c;

    out.residuals.mass_defect =
        std::abs(hermite_mass(out.profile, out.slope, out.curvature, out.series) - 1.0);
    const double h1 = out.slope[N - 1];
    out.residuals.slope_defect = std::abs(h1 * h1 - D * D * std::pow(out.B, 2.0 * out.alpha));
    out.residuals.symmetry_defect = std::abs(out.slope[0]);
    return out;
}

}  // namespace

double LocalSeries::value(double z) const {
    double v = 0.0;
    for (const auto& t : terms) v += term_value(t, z);
    return v;
}
double LocalSeries::dz(double z) const {
    double v = 0.0;
    for (const auto& t : terms) v += term_dz(t, z);
    return v;
}
double LocalSeries::dzz(double z) const {
    double v = 0.0;
    for (const auto& t : terms) v += term_dzz(t, z);
    return v;
}
double LocalSeries::integral(double z) const {
    double v = 0.0;
    for (const auto& t : terms) v += term_integral(t, z);
    return v;
}

double SpreadingLaw::front(double t) const { return std::pow(coefficient * t, exponent); }
double SpreadingLaw::velocity(double t) const {
    return exponent * coefficient * std::pow(coefficient * t, exponent - 1.0);
}

SmoothProfile::SmoothProfile(const SelfSimilarSolution& sol)
    : h_(sol.profile), dh_(sol.slope), d2h_(sol.curvature), series_(sol.series) {
    const Grid1D& g = h_.grid();
    z_series_ = 1.0 - g[g.size() - 2];
}

namespace {

struct Hermite5 {
    double b[6];   // values
    double db[6];  // d/dt
};

Hermite5 hermite5(double t) {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    Hermite5 h;
    h.b[0] = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    h.b[1] = t - 6 * t3 + 8 * t4 - 3 * t5;
    h.b[2] = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
    h.b[3] = 0.5 * t3 - t4 + 0.5 * t5;
    h.b[4] = -4 * t3 + 7 * t4 - 3 * t5;
    h.b[5] = 10 * t3 - 15 * t4 + 6 * t5;
    h.db[0] = -30 * t2 + 60 * t3 - 30 * t4;
    h.db[1] = 1 - 18 * t2 + 32 * t3 - 15 * t4;
    h.db[2] = t - 4.5 * t2 + 6 * t3 - 2.5 * t4;
    h.db[3] = 1.5 * t2 - 4 * t3 + 2.5 * t4;
    h.db[4] = -12 * t2 + 28 * t3 - 15 * t4;
    h.db[5] = 30 * t2 - 60 * t3 + 30 * t4;
    return h;
}

}  // namespace

double SmoothProfile::at_distance(double z) const {
    if (z <= 0.0) return 0.0;
    if (z <= z_series_) return series_.value(z);
    const Grid1D& g = h_.grid();
    const double x = 1.0 - z;
    const std::size_t i = g.locate(x);
    const double dx = g.spacing(i);
    // t measured from the left node, computed from distances to keep precision near x = 1
    const double t = std::clamp(((1.0 - g[i]) - z) / dx, 0.0, 1.0);
    const Hermite5 b = hermite5(t);
    return b.b[0] * h_[i] + dx * b.b[1] * dh_[i] + dx * dx * b.b[2] * d2h_[i] +
           dx * dx * b.b[3] * d2h_[i + 1] + dx * b.b[4] * dh_[i + 1] + b.b[5] * h_[i + 1];
}

double SmoothProfile::slope_at_distance(double z) const {
    if (z <= z_series_) return -series_.dz(std::max(z, 0.0));
    const Grid1D& g = h_.grid();
    const double x = 1.0 - z;
    const std::size_t i = g.locate(x);
    const double dx = g.spacing(i);
    const double t = std::clamp(((1.0 - g[i]) - z) / dx, 0.0, 1.0);
    const Hermite5 b = hermite5(t);
    return (b.db[0] * h_[i] + dx * b.db[1] * dh_[i] + dx * dx * b.db[2] * d2h_[i] +
            dx * dx * b.db[3] * d2h_[i + 1] + dx * b.db[4] * dh_[i + 1] + b.db[5] * h_[i + 1]) /
           dx;
}

double touchdown_constant(double n) {
    const double q = 3.0 / n;
    return std::pow(q * (q - 1.0) * (2.0 - q), -1.0 / n);
}

SelfSimilarSolution explicit_n1(double D, const Grid1D& grid) {
    if (!(D >= 0.0)) fail(ErrorKind::NegativeD, "D must be >= 0");
    // 7.5 (sqrt(0.8 + D^2) - D) without cancellation at large D
    const double B = 6.0 / (D + std::sqrt(0.8 + D * D));
    const std::size_t N = grid.size();
    std::vector<double> H(N), dH(N), d2H(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double x = grid[i];
        const double w = 1.0 - x * x;
        H[i] = 0.5 * B * D * w + B * B / 24.0 * w * w;
        dH[i] = -B * D * x - B * B / 6.0 * x * w;
        d2H[i] = -B * D - B * B / 6.0 * (1.0 - 3.0 * x * x);
    }
    H[N - 1] = 0.0;
    SelfSimilarSolution out;
    out.B = B;
    out.D = D;
    out.n = 1.0;
    out.alpha = 1.0;
    out.gamma = 0.2;
    out.profile = Profile(grid, std::move(H));
    out.slope = Profile(grid, std::move(dH));
    out.curvature = Profile(grid, std::move(d2H));
    out.s_law = {B * B / out.gamma, out.gamma};
    // H = B D z + (B^2/6 - B D/2) z^2 - B^2/6 z^3 + B^2/24 z^4
    if (D > 0.0) {
        out.series.terms = {{B * D, 1.0, 0}, {B * B / 6.0 - 0.5 * B * D, 2.0, 0},
                            {-B * B / 6.0, 3.0, 0}, {B * B / 24.0, 4.0, 0}};
    } else {
        out.series.terms = {{B * B / 6.0, 2.0, 0}, {-B * B / 6.0, 3.0, 0}, {B * B / 24.0, 4.0, 0}};
    }
    out.series.free_coefficient = out.series.terms[D > 0.0 ? 1 : 0].coeff;
    out.series.free_power = 2.0;
    out.residuals.mass_defect = std::abs(B * D / 3.0 + B * B / 45.0 - 1.0);
    out.residuals.slope_defect = 0.0;
    out.residuals.symmetry_defect = 0.0;
    return out;
}

SelfSimilarSolution explicit_n1(double D) { return explicit_n1(D, output_grid(ShootingConfig{})); }

SelfSimilarSolution solve(double n, double D, const ShootingConfig& cfg) {
    cfg.validate();
    if (!(n >= 1.0 && n < 3.0)) fail(ErrorKind::InvalidArgument, "n out of [1,3)");
    if (!(D >= 0.0)) fail(ErrorKind::NegativeD, "D must be >= 0");

    if (D == 0.0) return assemble(n, 0.0, normalized_solve(n, 0.0, cfg), cfg);

    // D(sigma) is increasing; root-find in log sigma.
    auto mismatch = [&](double u) { return std::log(normalized_solve(n, std::exp(u), cfg).D / D); };
    double u0 = std::log(D + D * D / 3.0);
    double lo = u0 - 1.0;
    double hi = u0 + 1.0;
    double flo = mismatch(lo);
    double fhi = mismatch(hi);
    int grow = 0;
    while (flo > 0.0 && grow++ < 100) {
        hi = lo;
        fhi = flo;
        lo -= 2.0;
        flo = mismatch(lo);
    }
    while (fhi < 0.0 && grow++ < 100) {
        lo = hi;
        flo = fhi;
        hi += 2.0;
        fhi = mismatch(hi);
    }
    if (flo > 0.0 || fhi < 0.0) fail(ErrorKind::NoConvergence, "could not bracket the contact slope");

    double u = lo;
    if (flo == 0.0) {
        u = lo;
    } else if (fhi == 0.0) {
        u = hi;
    } else {
        boost::uintmax_t iters = static_cast<boost::uintmax_t>(cfg.max_iterations);
        const auto root = boost::math::tools::toms748_solve(
            mismatch, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(48), iters);
        if (iters >= static_cast<boost::uintmax_t>(cfg.max_iterations)) {
            fail(ErrorKind::NoConvergence, "contact-slope iteration exceeded budget");
        }
        u = 0.5 * (root.first + root.second);
    }
    return assemble(n, D, normalized_solve(n, std::exp(u), cfg), cfg);
}

SelfSimilarSolution solve(const ProblemParams& params, const ShootingConfig& cfg) {
    params.validate();
    if (params.regime() != Regime::Balanced) {
        fail(ErrorKind::WrongRegime, "self-similar solutions need alpha = 4/(n+3)");
    }
    return solve(params.n, params.D(), cfg);
}

LocalSeries local_series(double B, double D, double n, int terms, const ShootingConfig& cfg) {
    if (!(B > 0.0)) fail(ErrorKind::InvalidArgument, "B must be > 0");
    if (!(D >= 0.0)) fail(ErrorKind::NegativeD, "D must be >= 0");
    ShootingConfig c = cfg;
    c.series_terms = terms;
    const double theta = D * std::pow(B, critical_alpha(n));
    const ShootingProblem prob = make_problem(B * B, theta, n, c);
    const FreeSolve fs = solve_free(prob, c.max_iterations);
    return prob.series(fs.free);
}

}  // namespace tfe
