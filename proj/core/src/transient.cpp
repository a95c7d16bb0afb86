#include "tfe/transient.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tfe/banded.hpp"
#include "tfe/errors.hpp"

namespace tfe {

namespace {

Grid1D reference_mesh(const StepConfig& cfg) {
    return Grid1D::symmetric_graded(-1.0, 1.0, cfg.mesh_nodes - 1, cfg.mesh_grading);
}

double lambda(const TransientState& s, std::size_t i) { return 0.5 * (s.heights.grid()[i] + 1.0); }

// Mean of h^n over [a,b] for linear h, by 3-point Gauss.
double mean_mobility(double ha, double hb, double n) {
    static constexpr double r = 0.7745966692414834;  // sqrt(3/5)
    auto m = [&](double u) {
        const double h = 0.5 * (ha + hb) + 0.5 * u * (hb - ha);
        return h > 0.0 ? std::pow(h, n) : 0.0;
    };
    return (5.0 * m(-r) + 8.0 * m(0.0) + 5.0 * m(r)) / 18.0;
}

double contact_mobility(double theta, double d, double alpha, double clamp) {
    const double z = std::max(std::abs(theta), clamp);
    return 2.0 * std::pow(d, -1.0 / alpha) * std::pow(z, 2.0 / alpha);
}

}  // namespace

double TransientState::y(std::size_t i) const {
    return s_minus + lambda(*this, i) * length();
}

std::vector<double> TransientState::physical_nodes() const {
    std::vector<double> y(nodes());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = this->y(i);
    y.front() = s_minus;
    y.back() = s_plus;
    return y;
}

double TransientState::h(double yy) const {
    if (yy <= s_minus || yy >= s_plus) return 0.0;
    const double X = 2.0 * (yy - s_minus) / length() - 1.0;
    return heights(X);
}

double TransientState::rescaled(double x) const {
    const double half = 0.5 * length();
    const double c = 0.5 * (s_minus + s_plus);
    return half * h(c + half * x);
}

void TransientState::validate() const {
    if (!(s_minus < s_plus)) fail(ErrorKind::InvalidArgument, "state needs s_minus < s_plus");
    if (heights.size() < 3) fail(ErrorKind::InvalidArgument, "state needs at least 3 nodes");
    if (heights.grid().front() != -1.0 || heights.grid().back() != 1.0) {
        fail(ErrorKind::GridMismatch, "heights must live on a reference mesh over [-1,1]");
    }
    const auto v = heights.values();
    if (v.front() != 0.0 || v.back() != 0.0) {
        fail(ErrorKind::InvalidArgument, "heights must vanish at both contact lines");
    }
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (!(v[i] > 0.0)) fail(ErrorKind::NonPositiveHeight, "interior height must be positive");
    }
}

double mass(const TransientState& s) { return 0.5 * s.length() * s.heights.integral(); }

double energy(const TransientState& s) {
    const auto H = s.heights.values();
    const Grid1D& X = s.heights.grid();
    const double scale = 0.5 * s.length();
    double e = 0.0;
    for (std::size_t i = 0; i + 1 < H.size(); ++i) {
        const double dH = H[i + 1] - H[i];
        e += dH * dH / (scale * X.spacing(i));
    }
    return 0.5 * e;
}

double symmetry_defect(const TransientState& s) {
    const auto H = s.heights.values();
    double d = std::abs(s.s_minus + s.s_plus);
    for (std::size_t i = 0; i < H.size(); ++i) d = std::max(d, std::abs(H[i] - H[H.size() - 1 - i]));
    return d;
}

void StepConfig::validate() const {
    if (!(tau > 0.0)) fail(ErrorKind::ValidationError, "tau must be > 0");
    if (mesh_nodes < 5) fail(ErrorKind::ValidationError, "mesh_nodes must be >= 5");
    if (!(theta_clamp >= 0.0)) fail(ErrorKind::ValidationError, "theta_clamp must be >= 0");
    if (!(tau_rel >= 0.0)) fail(ErrorKind::ValidationError, "tau_rel must be >= 0");
    if (!(tau_max > 0.0)) fail(ErrorKind::ValidationError, "tau_max must be > 0");
    if (!(mesh_grading >= 0.0 && mesh_grading < 1.0)) {
        fail(ErrorKind::ValidationError, "mesh_grading must lie in [0,1)");
    }
    if (rescale_period && *rescale_period == 0) fail(ErrorKind::ValidationError, "rescale_period must be > 0");
}

StepSolution assemble_and_solve_step(const TransientState& state, const ProblemParams& params,
                                     const StepConfig& cfg, double tau) {
    params.validate();
    if (!(tau > 0.0)) fail(ErrorKind::InvalidArgument, "tau must be > 0");
    const std::size_t N = state.nodes();
    const std::size_t K = N - 1;
    const auto H = state.heights.values();
    const std::vector<double> y = state.physical_nodes();
    const double d = params.d_equivalent();
    if (!(d > 0.0)) fail(ErrorKind::Singular, "zero friction gives an unbounded contact-line mobility");

    // Unknowns [zeta_0, hdot_0, pi_0, ..., hdot_K, pi_K, zeta_K]; rows in the same slots:
    // zeta rows at the ends, pi-test rows at hdot slots, v-test rows at pi slots.
    const std::size_t size = 2 * N + 2;
    auto hd = [](std::size_t i) { return 1 + 2 * i; };
    auto pi = [](std::size_t i) { return 2 + 2 * i; };
    const std::size_t z0 = 0, zK = size - 1;
    BandedMatrix A(size, 3, 3);
    std::vector<double> b(size, 0.0);

    for (std::size_t e = 0; e < K; ++e) {
        const double dy = y[e + 1] - y[e];
        const double mm = mean_mobility(H[e], H[e + 1], params.n) / dy;
        const double mass_d = dy / 3.0, mass_o = dy / 6.0;
        const std::size_t nd[2] = {e, e + 1};
        for (int a = 0; a < 2; ++a) {
            for (int c = 0; c < 2; ++c) {
                const std::size_t i = nd[a], j = nd[c];
                const double Mij = a == c ? mass_d : mass_o;
                const double Kij = (a == c ? 1.0 : -1.0) / dy;
                // v-test row i
                A.add(pi(i), pi(j), Mij);
                A.add(pi(i), hd(j), -tau * Kij);
                b[pi(i)] += Kij * H[j];
                // pi-test row i
                A.add(hd(i), hd(j), Mij);
                A.add(hd(i), pi(j), (a == c ? 1.0 : -1.0) * mm);
            }
        }
    }
    const double theta0 = (H[1] - H[0]) / (y[1] - y[0]);
    const double thetaK = (H[K] - H[K - 1]) / (y[K] - y[K - 1]);
    A.add(pi(0), z0, 1.0);
    b[pi(0)] += 0.5 * std::abs(theta0);
    A.add(pi(K), zK, 1.0);
    b[pi(K)] += 0.5 * std::abs(thetaK);
    A.add(z0, hd(0), 1.0);
    A.add(z0, z0, contact_mobility(theta0, d, params.alpha, cfg.theta_clamp));
    A.add(zK, hd(K), 1.0);
    A.add(zK, zK, contact_mobility(thetaK, d, params.alpha, cfg.theta_clamp));

    const BandedMatrix A0 = A;
    const std::vector<double> x = solve_banded(std::move(A), b);
    const std::vector<double> Ax = A0.multiply(x);
    double rn = 0.0, bn = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        rn = std::max(rn, std::abs(Ax[i] - b[i]));
        bn = std::max(bn, std::abs(b[i]));
    }

    StepSolution out;
    std::vector<double> hdot(N), pv(N);
    for (std::size_t i = 0; i < N; ++i) {
        hdot[i] = x[hd(i)];
        pv[i] = x[pi(i)];
    }
    Grid1D yg(y);
    out.hdot = Profile(yg, std::move(hdot));
    out.force.pi = Profile(yg, std::move(pv));
    out.force.zeta = {x[z0], x[zK]};
    out.residual = bn > 0.0 ? rn / bn : rn;
    return out;
}

FrontVelocity reconstruct_front_velocity(const TransientState& state, const DualForce& /*force*/,
                                         const Profile& hdot, const ProblemParams& params,
                                         const StepConfig& cfg) {
    const std::size_t N = state.nodes();
    if (hdot.size() != N) fail(ErrorKind::GridMismatch, "hdot does not match the state");
    const std::size_t K = N - 1;
    const auto H = state.heights.values();
    const double L = state.length();
    const Grid1D& X = state.heights.grid();
    const double theta0 = (H[1] - H[0]) / (0.5 * L * X.spacing(0));
    const double thetaK = (H[K] - H[K - 1]) / (0.5 * L * X.spacing(K - 1));
    const double h0 = hdot[0], hK = hdot[K];
    for (auto [theta, hb] : {std::pair{theta0, h0}, std::pair{thetaK, hK}}) {
        if (std::abs(theta) < cfg.theta_clamp && hb != 0.0) {
            fail(ErrorKind::ZeroSlope, "front moves although the contact-line slope vanishes");
        }
    }
    // Kinematic condition hdot + h_y * mesh velocity = 0, projected on the two end hats
    // (lumped), with mesh velocity (1 - lambda) s_minus' + lambda s_plus'.
    const double l1 = lambda(state, 1), lK = lambda(state, K - 1);
    const double a11 = theta0 * (2.0 / 3.0 + (1.0 - l1) / 3.0), a12 = theta0 * (l1 / 3.0);
    const double a21 = thetaK * ((1.0 - lK) / 3.0), a22 = thetaK * (lK / 3.0 + 2.0 / 3.0);
    const double det = a11 * a22 - a12 * a21;
    FrontVelocity fv;
    if (det == 0.0) {
        if (h0 != 0.0 || hK != 0.0) fail(ErrorKind::ZeroSlope, "degenerate kinematic system");
    } else {
        fv.minus = (-h0 * a22 + hK * a12) / det;
        fv.plus = (-hK * a11 + h0 * a21) / det;
    }
    const double d = params.d_equivalent();
    fv.closed_minus = -std::pow(d, -1.0 / params.alpha) * std::pow(std::abs(theta0), 2.0 / params.alpha);
    fv.closed_plus = std::pow(d, -1.0 / params.alpha) * std::pow(std::abs(thetaK), 2.0 / params.alpha);
    fv.receding = fv.plus < 0.0 || fv.minus > 0.0;
    return fv;
}

TransientState ale_update(const TransientState& state, const FrontVelocity& sdot, const Profile& hdot, double tau) {
    const std::size_t N = state.nodes();
    if (hdot.size() != N) fail(ErrorKind::GridMismatch, "hdot does not match the state");
    const std::size_t K = N - 1;
    const double L = state.length();
    const double Ldot = sdot.plus - sdot.minus;
    const double Lnew = L + tau * Ldot;
    if (!(Lnew > 0.0)) fail(ErrorKind::IntervalCollapse, "wetted interval collapses");
    const auto H = state.heights.values();
    const Grid1D& X = state.heights.grid();

    std::vector<double> xi_dot(N), dy(K), theta(K);
    for (std::size_t i = 0; i < N; ++i) {
        const double l = lambda(state, i);
        xi_dot[i] = (1.0 - l) * sdot.minus + l * sdot.plus;
    }
    for (std::size_t e = 0; e < K; ++e) {
        dy[e] = 0.5 * L * X.spacing(e);
        theta[e] = (H[e + 1] - H[e]) / dy[e];
    }
    // Q = (L/2) H is the height density in reference units, so sum(w_i Q_i) is the mass.
    std::vector<double> Hn(N, 0.0);
    for (std::size_t i = 1; i < K; ++i) {
        const double left = theta[i - 1] * dy[i - 1] * (xi_dot[i - 1] / 6.0 + xi_dot[i] / 3.0);
        const double right = theta[i] * dy[i] * (xi_dot[i] / 3.0 + xi_dot[i + 1] / 6.0);
        const double g = (left + right) / (0.5 * (dy[i - 1] + dy[i]));
        const double Hdot = hdot[i] + g;
        const double Q = 0.5 * L * H[i];
        const double Qdot = 0.5 * (Ldot * H[i] + L * Hdot);
        Hn[i] = 2.0 * (Q + tau * Qdot) / Lnew;
    }
    TransientState next;
    next.t = state.t + tau;
    next.s_minus = state.s_minus + tau * sdot.minus;
    next.s_plus = state.s_plus + tau * sdot.plus;
    next.heights = Profile(X, std::move(Hn));
    next.s_dot = {sdot.minus, sdot.plus};
    return next;
}

TransientState initial_state(InitialDatum datum, const StepConfig& cfg, double m) {
    cfg.validate();
    if (!(m > 0.0)) fail(ErrorKind::InvalidArgument, "mass must be > 0");
    const Grid1D X = reference_mesh(cfg);
    std::vector<double> H(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double y = X[i];
        double h = 0.0;
        switch (datum) {
            case InitialDatum::Fig1Bump:
                h = 3.75 * ((1.0 + y) * (1.0 - y) - 0.4 * (1.0 + std::cos(std::numbers::pi * y)));
                break;
            case InitialDatum::Corner: h = 2.0 * (1.0 - std::abs(y)); break;
        }
        H[i] = 0.5 * m * h;
    }
    H.front() = 0.0;
    H.back() = 0.0;
    TransientState s;
    s.heights = Profile(X, std::move(H));
    s.validate();
    return s;
}

TransientState initial_state(const std::vector<double>& y, const std::vector<double>& h, const StepConfig& cfg) {
    cfg.validate();
    if (y.size() != h.size() || y.size() < 3) {
        fail(ErrorKind::InvalidArgument, "custom datum needs matching y and h with >= 3 points");
    }
    const Profile datum(Grid1D(y), h);
    if (h.front() != 0.0 || h.back() != 0.0) {
        fail(ErrorKind::InvalidArgument, "custom datum must vanish at both ends");
    }
    const Grid1D X = reference_mesh(cfg);
    TransientState s;
    s.s_minus = y.front();
    s.s_plus = y.back();
    std::vector<double> H(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) H[i] = datum(s.s_minus + 0.5 * (X[i] + 1.0) * s.length());
    H.front() = 0.0;
    H.back() = 0.0;
    s.heights = Profile(X, std::move(H));
    s.validate();
    return s;
}

RunResult run(const TransientState& initial, const ProblemParams& params, const StepConfig& cfg, double t_end,
              const std::vector<double>& output_times, const StepObserver& observer) {
    params.validate();
    cfg.validate();
    initial.validate();
    if (!(t_end > initial.t)) fail(ErrorKind::InvalidArgument, "t_end must exceed the initial time");

    std::vector<double> outs;
    for (double t : output_times) {
        if (t >= initial.t && t <= t_end) outs.push_back(t);
    }
    std::sort(outs.begin(), outs.end());
    outs.erase(std::unique(outs.begin(), outs.end()), outs.end());

    RunResult res;
    TransientState s = initial;
    double E = energy(s);
    double M = mass(s);
    auto record = [&](const TransientState& st, double e, double m) {
        return RunRecord{st.t, st.s_minus, st.s_plus, m, e};
    };
    res.series.push_back(record(s, E, M));
    res.max_symmetry_defect = symmetry_defect(s);
    std::size_t next_out = 0;
    while (next_out < outs.size() && outs[next_out] <= s.t) {
        res.snapshots.push_back({s.t, s});
        ++next_out;
    }

    const double tau_floor = 1e-14 * t_end;
    double tau_cap = std::numeric_limits<double>::infinity();
    while (s.t < t_end) {
        const double target = std::min(std::max(cfg.tau, cfg.tau_rel * s.t), cfg.tau_max);
        double tau = std::min(target, tau_cap);
        const double stop_at = next_out < outs.size() ? std::min(outs[next_out], t_end) : t_end;
        bool hits = false;
        if (s.t + tau >= stop_at * (1.0 - 1e-14)) {
            tau = stop_at - s.t;
            hits = true;
        }
        if (!(tau > 0.0) || (!hits && tau < tau_floor)) {
            fail(ErrorKind::StepSizeUnderflow, "step size fell below 1e-14 t_end");
        }

        bool ok = true;
        TransientState next;
        double En = 0.0;
        try {
            const StepSolution sol = assemble_and_solve_step(s, params, cfg, tau);
            res.max_residual = std::max(res.max_residual, sol.residual);
            const FrontVelocity fv = reconstruct_front_velocity(s, sol.force, sol.hdot, params, cfg);
            if (fv.receding) {
                ++res.receding_rejections;
                ok = false;
            } else {
                next = ale_update(s, fv, sol.hdot, tau);
                const auto Hn = next.heights.values();
                for (std::size_t i = 1; i + 1 < Hn.size(); ++i) {
                    if (!(Hn[i] > 0.0)) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    En = energy(next);
                    if (En > E + 1e-12 * std::abs(E)) {
                        if (cfg.reject_energy_increase) {
                            ++res.energy_rejections;
                            ok = false;
                        } else {
                            ++res.energy_violations;
                        }
                    }
                }
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::IntervalCollapse && e.kind() != ErrorKind::NonPositiveHeight) throw;
            ok = false;
        }
        if (!ok) {
            ++res.rejected;
            tau_cap = 0.5 * tau;
            if (tau_cap < tau_floor) fail(ErrorKind::StepSizeUnderflow, "step size fell below 1e-14 t_end");
            continue;
        }
        tau_cap = std::isfinite(tau_cap) ? 2.0 * tau_cap : tau_cap;
        if (tau_cap >= target) tau_cap = std::numeric_limits<double>::infinity();
        if (hits) next.t = stop_at;
        const double Mn = mass(next);
        res.max_mass_step_drift = std::max(res.max_mass_step_drift, std::abs(Mn - M) / M);
        s = std::move(next);
        E = En;
        M = Mn;
        ++res.accepted;
        res.max_symmetry_defect = std::max(res.max_symmetry_defect, symmetry_defect(s));
        const RunRecord rec = record(s, E, M);
        res.series.push_back(rec);
        if (observer) observer(s, rec);
        while (next_out < outs.size() && outs[next_out] <= s.t) {
            res.snapshots.push_back({s.t, s});
            ++next_out;
        }
    }
    res.final_state = s;
    return res;
}

}  // namespace tfe
