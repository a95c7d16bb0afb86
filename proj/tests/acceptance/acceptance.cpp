// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "tfe/asymptotics.hpp"
#include "tfe/errors.hpp"
#include "tfe/harness.hpp"
#include "tfe/quadrature.hpp"
#include "tfe/selfsimilar.hpp"
#include "tfe/transient.hpp"

using namespace tfe;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const char* fmt, auto... args) {
        char buf[256];
        std::snprintf(buf, sizeof buf, fmt, args...);
        if (!detail.empty()) detail += "; ";
        detail += buf;
        if (!ok) {
            detail += " [x]";
            pass = false;
        }
    }
};

ProblemParams unit(double n, double alpha) {
    ProblemParams p;
    p.n = n;
    p.alpha = alpha;
    p.friction = NormalizedFriction{1.0};
    return p;
}

StepConfig long_run_step(std::size_t nodes) {
    StepConfig c;
    c.tau = 1e-6;
    c.tau_rel = 1e-3;
    c.mesh_nodes = nodes;
    c.reject_energy_increase = false;
    return c;
}

struct Trajectory {
    RunResult run;
    std::vector<double> t;
    std::vector<double> s;  ///< half-width
};

Trajectory spread(const ProblemParams& p, const StepConfig& c, double t_end, const std::vector<double>& outputs = {}) {
    Trajectory tr;
    tr.run = run(initial_state(InitialDatum::Fig1Bump, c, 2.0), p, c, t_end, outputs);
    for (const RunRecord& r : tr.run.series) {
        if (r.t <= 0.0 || (!tr.t.empty() && r.t <= tr.t.back())) continue;
        tr.t.push_back(r.t);
        tr.s.push_back(0.5 * (r.s_plus - r.s_minus));
    }
    return tr;
}

Verdict closed_form_oracle() {
    Verdict v;
    double worst_B = 0.0, worst_H = 0.0, worst_time = 0.0;
    for (double D : {0.0, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0}) {
        const auto start = std::chrono::steady_clock::now();
        const SelfSimilarSolution num = solve(1.0, D);
        worst_time = std::max(worst_time, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
        const SelfSimilarSolution ref = explicit_n1(D, num.profile.grid());
        worst_B = std::max(worst_B, std::abs(num.B - ref.B));
        for (std::size_t i = 0; i < num.profile.size(); ++i) {
            worst_H = std::max(worst_H, std::abs(num.profile[i] - ref.profile[i]));
        }
    }
    v.require(worst_B <= 1e-8, "max |dB| %.2e <= 1e-8", worst_B);
    v.require(worst_H <= 1e-6, "max sup |dH| %.2e <= 1e-6", worst_H);
    v.require(worst_time <= 10.0, "slowest solve %.2fs", worst_time);
    return v;
}

Verdict constants() {
    Verdict v;
    const double c1 = strong_C1(1.0), c2 = strong_C1(2.0);
    const double stated = (5.0 - std::log(2.0)) / 6.0;
    v.require(std::abs(c1 - 0.1) <= 1e-10, "C1(1) = %.15f vs 1/10", c1);
    v.require(std::abs(c2 - stated) <= 1e-10, "C1(2) = %.15f vs (5-log 2)/6 = %.15f", c2, stated);
    const Grid1D g = Grid1D::graded(0.0, 1.0, 400, 0.99);
    for (double n : {1.0, 2.0}) {
        const auto pred = strong_prediction(unit(n, 0.5), g);
        double err = 0.0;
        for (std::size_t i = 0; i < pred.H1->size(); ++i) {
            err = std::max(err, std::abs((*pred.H1)[i] - strong_H1_closed_form(n, g[i])));
        }
        v.require(err <= 1e-8, "H1(n=%g) sup error %.2e <= 1e-8", n, err);
    }
    return v;
}

Verdict limit_law() {
    Verdict v;
    for (double n : {1.0, 2.0}) {
        const double a = critical_alpha(n);
        double prev = INFINITY;
        bool decreasing = true;
        double at_1e3 = 0.0, h_1e3 = 0.0;
        for (double D : {1e1, 1e2, 1e3, 1e4}) {
            const auto s = solve(n, D);
            const double err = std::abs(std::abs(D * std::pow(s.B, a)) - 3.0);
            decreasing = decreasing && err < prev;
            prev = err;
            if (D == 1e3) {
                at_1e3 = err;
                h_1e3 = std::abs(s.profile[0] - 1.5);
            }
        }
        v.require(at_1e3 <= 1e-2, "n=%g |D B^a - 3| at 1e3 = %.2e", n, at_1e3);
        v.require(decreasing, "n=%g decreasing in D: %s", n, decreasing ? "yes" : "no");
        v.require(h_1e3 <= 1e-3, "n=%g |H(0) - 3/2| at 1e3 = %.2e", n, h_1e3);
    }
    return v;
}

Verdict structural() {
    Verdict v;
    const StepConfig c = long_run_step(201);
    const TransientState init = initial_state(InitialDatum::Fig1Bump, c, 2.0);
    const RunResult r = run(init, unit(1.0, 1.0), c, 10.0);
    const double drift = std::abs(mass(r.final_state) - mass(init)) / mass(init);
    v.require(r.energy_violations == 0, "energy increases %zu of %zu steps", r.energy_violations, r.accepted);
    v.require(drift <= 1e-6, "mass drift %.2e", drift);
    v.require(r.max_symmetry_defect <= 1e-10, "symmetry defect %.2e", r.max_symmetry_defect);
    return v;
}

Verdict self_similarity() {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    const StepConfig c = long_run_step(201);
    const ProblemParams p = unit(1.0, 1.0);
    const double t_end = 1e4;
    std::vector<double> outputs;
    for (int k = -12; k <= 16; ++k) outputs.push_back(std::pow(10.0, k / 4.0));
    const Trajectory tr = spread(p, c, t_end, outputs);
    const DistanceSeries ds = compare_profiles(tr.run.snapshots, predict(p, comparison_grid()).H0);
    const double final_sup = ds.records.back().distance.sup;
    const double ratio = tr.run.final_state.s_plus / 1.0;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.require(final_sup < 0.02, "sup distance at t=%g: %.2e", t_end, final_sup);
    v.require(ds.monotone_last_decade, "monotone over last decade: %s", ds.monotone_last_decade ? "yes" : "no");
    v.require(ratio >= 10.0, "s(t_end)/s(0) = %.2f", ratio);
    v.require(secs <= 300.0, "%.1fs", secs);
    return v;
}

struct LongRuns {
    Trajectory strong1, strong2, weak1, weak2;
};

Verdict exponents(const LongRuns& L) {
    Verdict v;
    auto check = [&](const Trajectory& tr, double n, double a, double expected) {
        const ExponentFit f = fit_spreading_exponent(tr.t, tr.s);
        const double rel = std::abs(f.gamma_hat - expected) / expected;
        v.require(rel <= 0.02, "(n=%g, a=%g) gamma %.5f vs %.5f (%.2f%%)", n, a, f.gamma_hat, expected, 100 * rel);
        return f;
    };
    check(L.strong1, 1, 0.5, 0.5 / 4.5);
    check(L.strong2, 2, 0.5, 0.5 / 4.5);
    const ExponentFit w1 = check(L.weak1, 1, 2, 0.2);
    check(L.weak2, 2, 2, 1.0 / 6.0);
    const double pref = std::pow(225.0, 0.2);
    const double rel = std::abs(w1.prefactor_hat - pref) / pref;
    v.require(rel <= 0.05, "weak n=1 prefactor %.4f vs %.4f (%.2f%%)", w1.prefactor_hat, pref, 100 * rel);
    return v;
}

Verdict correction_decay(const LongRuns& L) {
    Verdict v;
    auto check = [&](const Trajectory& tr, double n, double a, double tol) {
        const auto pred = predict(unit(n, a), comparison_grid());
        try {
            const CorrectionFit f = correction_rate(tr.t, tr.s, pred);
            v.require(f.relative_error <= tol, "(n=%g, a=%g) decay %.4f vs %.4f (%.1f%%) over [%g, %g]", n, a,
                      f.exponent, f.expected, 100 * f.relative_error, f.window.t_lo, f.window.t_hi);
        } catch (const Error& e) {
            v.require(false, "(n=%g, a=%g) %s", n, a, e.what());
        }
    };
    check(L.strong1, 1, 0.5, 0.10);
    check(L.weak1, 1, 2, 0.15);
    return v;
}

Verdict correction_shape() {
    Verdict v;
    const double t_end = 1e4;
    for (auto [n, a] : {std::pair{1.0, 0.5}, std::pair{2.0, 0.5}, std::pair{1.0, 2.0}}) {
        const ProblemParams p = unit(n, a);
        const Trajectory tr = spread(p, long_run_step(401), t_end, {t_end});
        const auto pred = predict(p, comparison_grid());
        const CorrectionRecord rec = correction_record(tr.run.snapshots.back().state, pred.H0, *pred.H1);
        v.require(rec.shape_error < 0.1, "(n=%g, a=%g) L2 %.4f at t=%g", n, a, rec.shape_error, t_end);
    }
    return v;
}

Verdict inner_wave() {
    Verdict v;
    const InnerTravelingWave tw = inner_traveling_wave(2.0, 2.0, 1.0);
    const double curv = std::abs(tw.curvature[tw.curvature.size() - 1]);
    const double x1 = tw.xi_max, x0 = tw.xi_max / 10.0;
    const double slope = std::log(tw(x1) / tw(x0)) / std::log(x1 / x0);
    const auto pred = weak_prediction(unit(2.0, 2.0), Grid1D::graded(0.0, 1.0, 400, 0.99));
    double audit = 0.0;
    for (double t : {1e2, 1e4, 1e6, 1e8}) audit = std::max(audit, matching_audit(pred, t).relative_error);
    v.require(curv <= 1e-6, "|F''(xi_max)| %.2e", curv);
    v.require(std::abs(slope - 1.5) / 1.5 <= 0.02, "far-field exponent %.5f vs 1.5", slope);
    v.require(audit <= 1e-10, "matching identity %.2e", audit);
    return v;
}

Verdict weak_correction() {
    Verdict v;
    const auto pred = weak_prediction(unit(1.25, 2.0), Grid1D::graded(0.0, 1.0, 400, 0.99));
    const WeakCorrectionParts& w = *pred.weak_parts;
    const double B0 = *pred.B0;
    const double slope = w.dH1[w.dH1.size() - 1];
    const double stated = -std::pow(B0, -2.0);
    v.require(std::abs(slope - stated) <= 1e-6, "H1'(1) = %.8f vs -B0^-a = %.8f (-B0^a = %.6f)", slope, stated,
              -std::pow(B0, 2.0));
    v.require(std::abs(w.integral_H1) <= 1e-8, "int H1 = %.2e", w.integral_H1);
    v.require(w.coercivity_lhs > 0.0, "coercivity %.6e (identity rhs %.6e)", w.coercivity_lhs, w.coercivity_rhs);
    return v;
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](const char* name, const std::function<Verdict()>& check) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("error: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!v.pass) ++failures;
        std::printf("%s %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), secs);
        std::fflush(stdout);
    };

    report("closed-form oracle", closed_form_oracle);
    report("constants", constants);
    report("limit law", limit_law);
    report("structural transient", structural);
    report("convergence to self-similarity", self_similarity);

    LongRuns L;
    const auto start = std::chrono::steady_clock::now();
    const StepConfig c = long_run_step(201);
    L.strong1 = spread(unit(1.0, 0.5), c, 1e8);
    L.strong2 = spread(unit(2.0, 0.5), c, 1e8);
    L.weak1 = spread(unit(1.0, 2.0), c, 1e8);
    L.weak2 = spread(unit(2.0, 2.0), c, 1e8);
    std::printf("# long runs to t=1e8: %.1fs\n",
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    report("spreading exponents", [&] { return exponents(L); });
    report("correction decay", [&] { return correction_decay(L); });
    report("correction shape", correction_shape);
    report("inner traveling wave", inner_wave);
    report("weak correction", weak_correction);
    return failures == 0 ? 0 : 1;
}
