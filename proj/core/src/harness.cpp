#include "tfe/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <sstream>

#include "json_io.hpp"
#include "tfe/errors.hpp"

namespace tfe {

namespace {

constexpr std::size_t kComparisonNodes = 257;
constexpr int kResamplePerDecade = 20;

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;  ///< at u = 0
    double rms = 0.0;
};

/// Least squares v = intercept + slope u, centred on the mean of u for conditioning.
LineFit fit_line(const std::vector<double>& u, const std::vector<double>& v) {
    const double m = static_cast<double>(u.size());
    double ub = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        ub += u[i];
        vb += v[i];
    }
    ub /= m;
    vb /= m;
    double suu = 0.0, suv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        suu += (u[i] - ub) * (u[i] - ub);
        suv += (u[i] - ub) * (v[i] - vb);
    }
    LineFit f;
    f.slope = suv / suu;
    f.intercept = vb - f.slope * ub;
    double r = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double e = v[i] - (vb + f.slope * (u[i] - ub));
        r += e * e;
    }
    f.rms = std::sqrt(r / m);
    return f;
}

void require_series(const std::vector<double>& t, const std::vector<double>& s) {
    if (t.size() != s.size()) fail(ErrorKind::InvalidArgument, "time and value series differ in length");
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) fail(ErrorKind::InvalidArgument, "times must be strictly increasing");
    }
}

/// Default window: the last decade, widened to the sample at or before t_max / 10.
FitWindow resolve_window(const std::vector<double>& t, std::optional<FitWindow> window) {
    if (t.empty()) fail(ErrorKind::InsufficientData, "empty series");
    if (window) {
        if (!(window->t_lo > 0.0 && window->t_lo < window->t_hi)) {
            fail(ErrorKind::InvalidArgument, "fit window needs 0 < t_lo < t_hi");
        }
        return *window;
    }
    const double t_hi = t.back();
    if (!(t_hi > 0.0)) fail(ErrorKind::InsufficientData, "no positive times");
    const double target = t_hi / 10.0;
    auto it = std::upper_bound(t.begin(), t.end(), target);
    double t_lo = it == t.begin() ? t.front() : *(it - 1);
    if (!(t_lo > 0.0)) t_lo = *it;
    return {t_lo, t_hi};
}

void require_decade(double lo, double hi, std::size_t samples) {
    if (samples < 10) {
        fail(ErrorKind::InsufficientData, "need at least 10 samples in the fit window, have " +
                                              std::to_string(samples));
    }
    if (!(hi >= 10.0 * lo * (1.0 - 1e-12))) {
        fail(ErrorKind::InsufficientData, "samples in the fit window span less than one decade");
    }
}

double interp_loglog(const std::vector<double>& t, const std::vector<double>& s, double tq) {
    auto it = std::lower_bound(t.begin(), t.end(), tq);
    if (it == t.end()) return s.back();
    std::size_t j = static_cast<std::size_t>(it - t.begin());
    if (t[j] == tq || j == 0) return s[j];
    const double u0 = std::log(t[j - 1]), u1 = std::log(t[j]);
    const double w = (std::log(tq) - u0) / (u1 - u0);
    if (s[j - 1] > 0.0 && s[j] > 0.0) {
        return std::exp((1.0 - w) * std::log(s[j - 1]) + w * std::log(s[j]));
    }
    return (1.0 - w) * s[j - 1] + w * s[j];
}

/// Geometric resampling of (t, s) onto [lo, hi].
std::vector<double> geometric_times(double lo, double hi) {
    std::vector<double> out;
    const double ratio = std::pow(10.0, 1.0 / kResamplePerDecade);
    const int count = static_cast<int>(std::floor(std::log10(hi / lo) * kResamplePerDecade + 1e-9));
    for (int k = 0; k <= count; ++k) out.push_back(lo * std::pow(ratio, k));
    return out;
}

/// d/dt of a resampled series by centred differences at the interior points.
std::vector<std::pair<double, double>> centred_derivative(const std::vector<double>& tt,
                                                          const std::vector<double>& y) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t k = 1; k + 1 < tt.size(); ++k) {
        out.emplace_back(tt[k], (y[k + 1] - y[k - 1]) / (tt[k + 1] - tt[k - 1]));
    }
    return out;
}

CorrectionFit fit_decay(const std::vector<std::pair<double, double>>& pts, double shift, FitWindow w) {
    if (pts.size() < 10) {
        fail(ErrorKind::InsufficientData, "need at least 10 resampled points, have " + std::to_string(pts.size()));
    }
    const bool positive = pts.front().second > 0.0;
    std::vector<double> u, v;
    for (const auto& [t, d] : pts) {
        if (d == 0.0 || (d > 0.0) != positive) {
            fail(ErrorKind::NoDecay, "correction changes sign inside the fit window");
        }
        u.push_back(std::log(t));
        v.push_back(std::log(std::abs(d)));
    }
    const LineFit lf = fit_line(u, v);
    CorrectionFit out;
    out.exponent = -lf.slope - shift;
    out.coefficient = std::exp(lf.intercept);
    out.window = w;
    out.residual = lf.rms;
    if (!(out.exponent > 0.0)) {
        fail(ErrorKind::NoDecay, "fitted decay exponent " + std::to_string(out.exponent) + " is not positive");
    }
    return out;
}

double l2_on(const Grid1D& g, const std::vector<double>& e) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        acc += g.spacing(i) / 3.0 * (e[i] * e[i] + e[i] * e[i + 1] + e[i + 1] * e[i + 1]);
    }
    return std::sqrt(acc);
}

void require_covers_unit(const Profile& p) {
    if (p.size() < 2 || p.grid().front() > 1e-12 || p.grid().back() < 1.0 - 1e-12) {
        fail(ErrorKind::GridMismatch, "profile does not cover [0,1]");
    }
}

std::vector<double> on_comparison_grid(const Profile& p) {
    require_covers_unit(p);
    const Grid1D g = comparison_grid();
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = p(g[i]);
    return v;
}

}  // namespace

ExponentFit fit_spreading_exponent(const std::vector<double>& t, const std::vector<double>& s,
                                   std::optional<FitWindow> window) {
    require_series(t, s);
    const FitWindow w = resolve_window(t, window);
    std::vector<double> u, v;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < w.t_lo || t[i] > w.t_hi || !(t[i] > 0.0)) continue;
        if (!(s[i] > 0.0)) fail(ErrorKind::InvalidArgument, "front positions must be positive");
        u.push_back(std::log(t[i]));
        v.push_back(std::log(s[i]));
        lo = std::min(lo, t[i]);
        hi = std::max(hi, t[i]);
    }
    require_decade(lo, hi, u.size());
    const LineFit lf = fit_line(u, v);
    ExponentFit out;
    out.gamma_hat = lf.slope;
    out.prefactor_hat = std::exp(lf.intercept);
    out.window = {lo, hi};
    out.residual = lf.rms;
    out.samples = u.size();
    return out;
}

std::vector<std::pair<double, double>> correction_derivative(const std::vector<double>& t,
                                                             const std::vector<double>& s, double gamma,
                                                             FitWindow window) {
    require_series(t, s);
    if (!(window.t_lo > 0.0 && window.t_lo < window.t_hi)) {
        fail(ErrorKind::InvalidArgument, "window needs 0 < t_lo < t_hi");
    }
    const double lo = std::max(window.t_lo, t.front());
    const double hi = std::min(window.t_hi, t.back());
    if (!(hi > lo)) fail(ErrorKind::InsufficientData, "window does not overlap the series");
    const auto tt = geometric_times(lo, hi);
    std::vector<double> y(tt.size());
    for (std::size_t k = 0; k < tt.size(); ++k) y[k] = std::pow(tt[k], -gamma) * interp_loglog(t, s, tt[k]);
    return centred_derivative(tt, y);
}

CorrectionFit correction_rate(const std::vector<double>& t, const std::vector<double>& s, double gamma,
                              std::optional<FitWindow> window) {
    require_series(t, s);
    const FitWindow w = resolve_window(t, window);
    const double lo = std::max(w.t_lo, t.front());
    const double hi = std::min(w.t_hi, t.back());
    std::size_t raw = 0;
    for (double ti : t) raw += (ti >= lo && ti <= hi) ? 1 : 0;
    require_decade(lo, hi, raw);
    return fit_decay(correction_derivative(t, s, gamma, {lo, hi}), 1.0, {lo, hi});
}

CorrectionFit correction_rate(const std::vector<double>& t, const std::vector<double>& s,
                              const AsymptoticPrediction& prediction, std::optional<FitWindow> window) {
    if (!prediction.beta) fail(ErrorKind::WrongRegime, "prediction carries no correction exponent");
    CorrectionFit out = correction_rate(t, s, prediction.gamma, window);
    out.expected = *prediction.beta;
    out.relative_error = std::abs(out.exponent - out.expected) / out.expected;
    return out;
}

CorrectionFit distance_decay_rate(const std::vector<double>& t, const std::vector<double>& d,
                                  std::optional<FitWindow> window) {
    require_series(t, d);
    const FitWindow w = resolve_window(t, window);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= w.t_lo && t[i] <= w.t_hi && t[i] > 0.0) pts.emplace_back(t[i], d[i]);
    }
    if (pts.empty()) fail(ErrorKind::InsufficientData, "no samples in the fit window");
    require_decade(pts.front().first, pts.back().first, pts.size());
    return fit_decay(pts, 0.0, {pts.front().first, pts.back().first});
}

Grid1D comparison_grid() { return Grid1D::uniform(0.0, 1.0, kComparisonNodes - 1); }

ProfileDistance profile_distance(const Profile& a, const Profile& b) {
    const auto va = on_comparison_grid(a);
    const auto vb = on_comparison_grid(b);
    std::vector<double> e(va.size());
    ProfileDistance d;
    for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = va[i] - vb[i];
        d.sup = std::max(d.sup, std::abs(e[i]));
    }
    d.l2 = l2_on(comparison_grid(), e);
    return d;
}

Profile rescaled_profile(const TransientState& state) {
    Grid1D g = comparison_grid();
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = 0.5 * (state.rescaled(g[i]) + state.rescaled(-g[i]));
    return Profile(std::move(g), std::move(v));
}

DistanceSeries compare_profiles(const std::vector<Snapshot>& snapshots, const Profile& target) {
    require_covers_unit(target);
    DistanceSeries out;
    for (const auto& snap : snapshots) {
        out.records.push_back({snap.t, profile_distance(rescaled_profile(snap.state), target)});
    }
    if (out.records.size() < 2) return out;
    const double t_cut = out.records.back().t / 10.0;
    bool monotone = true;
    bool spans = out.records.front().t <= t_cut;
    for (std::size_t i = 1; i < out.records.size(); ++i) {
        if (out.records[i - 1].t < t_cut) continue;
        const double prev = out.records[i - 1].distance.sup;
        if (out.records[i].distance.sup > prev * (1.0 + 1e-12)) monotone = false;
    }
    out.monotone_last_decade = monotone && spans;
    return out;
}

CorrectionRecord correction_record(const TransientState& state, const Profile& H0, const Profile& H1) {
    const Profile H = rescaled_profile(state);
    const auto h0 = on_comparison_grid(H0);
    const auto h1 = on_comparison_grid(H1);
    CorrectionRecord rec;
    rec.t = state.t;
    std::vector<double> diff(h0.size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
        diff[i] = H[i] - h0[i];
        rec.sup_distance = std::max(rec.sup_distance, std::abs(diff[i]));
    }
    if (!(rec.sup_distance > 0.0)) fail(ErrorKind::NoDecay, "profile coincides with H0; no correction shape");
    double h1_sup = 0.0;
    for (double v : h1) h1_sup = std::max(h1_sup, std::abs(v));
    if (!(h1_sup > 0.0)) fail(ErrorKind::InvalidArgument, "H1 vanishes identically");
    std::vector<double> err(diff.size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
        diff[i] /= rec.sup_distance;
        err[i] = diff[i] - h1[i] / h1_sup;
    }
    rec.shape_error = l2_on(comparison_grid(), err);
    rec.shape = Profile(comparison_grid(), std::move(diff));
    return rec;
}

// ---------------------------------------------------------------- figures

FigureTag parse_figure_tag(const std::string& tag) {
    static const std::map<std::string, FigureTag> tags{
        {"fig1", FigureTag::Fig1}, {"fig3", FigureTag::Fig3}, {"fig5", FigureTag::Fig5},
        {"fig6", FigureTag::Fig6}, {"fig7", FigureTag::Fig7}, {"fig8", FigureTag::Fig8},
        {"fig9", FigureTag::Fig9}};
    const auto it = tags.find(tag);
    if (it == tags.end()) {
        fail(ErrorKind::InvalidArgument, "unknown figure tag '" + tag + "' (fig1|fig3|fig5|fig6|fig7|fig8|fig9)");
    }
    return it->second;
}

const char* to_string(FigureTag tag) noexcept {
    switch (tag) {
        case FigureTag::Fig1: return "fig1";
        case FigureTag::Fig3: return "fig3";
        case FigureTag::Fig5: return "fig5";
        case FigureTag::Fig6: return "fig6";
        case FigureTag::Fig7: return "fig7";
        case FigureTag::Fig8: return "fig8";
        case FigureTag::Fig9: return "fig9";
    }
    return "unknown";
}

namespace {

using Json = nlohmann::ordered_json;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Case {
    std::string label;
    ProblemParams params;
    InitialDatum datum = InitialDatum::Fig1Bump;
    double t_end = 1.0;
    std::vector<double> output_times;
};

struct CaseResult {
    Case spec;
    RunResult run;
};

ProblemParams params_of(double n, double alpha) {
    ProblemParams p;
    p.n = n;
    p.alpha = alpha;
    p.friction = NormalizedFriction{1.0};
    p.mass = 2.0;
    return p;
}

/// t = 0 plus `per_decade` geometric times from t_first to t_end.
std::vector<double> output_grid(double t_first, double t_end, int per_decade) {
    std::vector<double> out;
    const int count = static_cast<int>(std::round(std::log10(t_end / t_first) * per_decade));
    for (int k = 0; k <= count; ++k) out.push_back(t_first * std::pow(10.0, static_cast<double>(k) / per_decade));
    out.back() = t_end;
    return out;
}

std::vector<CaseResult> run_cases(const std::vector<Case>& cases, const StepConfig& step) {
    std::vector<std::future<RunResult>> jobs;
    for (const auto& c : cases) {
        jobs.push_back(std::async(std::launch::async, [&c, &step] {
            const TransientState init = initial_state(c.datum, step, c.params.mass);
            return run(init, c.params, step, c.t_end, c.output_times);
        }));
    }
    std::vector<CaseResult> out;
    for (std::size_t i = 0; i < cases.size(); ++i) out.push_back({cases[i], jobs[i].get()});
    return out;
}

const char* datum_name(InitialDatum d) { return d == InitialDatum::Corner ? "corner" : "fig1_bump"; }

Json case_meta(const CaseResult& r) {
    Json j;
    j["label"] = r.spec.label;
    j["params"] = detail::params_to_json(r.spec.params);
    j["regime"] = to_string(r.spec.params.regime());
    j["initial_datum"] = datum_name(r.spec.datum);
    j["t_end"] = r.spec.t_end;
    j["accepted_steps"] = r.run.accepted;
    j["rejected_steps"] = r.run.rejected;
    j["energy_violations"] = r.run.energy_violations;
    j["max_mass_step_drift"] = r.run.max_mass_step_drift;
    j["max_symmetry_defect"] = r.run.max_symmetry_defect;
    j["final_s_plus"] = r.run.final_state.s_plus;
    return j;
}

/// Strictly increasing positive times with their half-widths, for the fits.
std::pair<std::vector<double>, std::vector<double>> fit_series(const RunResult& r) {
    std::vector<double> t, s;
    for (const auto& rec : r.series) {
        if (!(rec.t > 0.0) || (!t.empty() && rec.t <= t.back())) continue;
        t.push_back(rec.t);
        s.push_back(0.5 * (rec.s_plus - rec.s_minus));
    }
    return {t, s};
}

Profile target_profile(const ProblemParams& p) {
    const AsymptoticPrediction pred = predict(p, comparison_grid());
    return pred.H0;
}

SvgSeries profile_series(const std::string& label, const Profile& p, bool dashed = false) {
    SvgSeries s{label, {}, {}, dashed};
    for (std::size_t i = 0; i < p.size(); ++i) {
        s.x.push_back(p.grid()[i]);
        s.y.push_back(p[i]);
    }
    return s;
}

/// Snapshots whose times are 1, 10, 100, ... times t_first, plus the last.
std::vector<const Snapshot*> decade_snapshots(const RunResult& r) {
    std::vector<const Snapshot*> out;
    double next = 0.0;
    for (const auto& s : r.snapshots) {
        if (s.t >= next * (1.0 - 1e-9)) {
            out.push_back(&s);
            next = s.t > 0.0 ? s.t * 10.0 : 1e-3;
        }
    }
    if (!r.snapshots.empty() && out.back() != &r.snapshots.back()) out.push_back(&r.snapshots.back());
    return out;
}

struct FigureData {
    std::string csv;
    std::vector<SvgPlot> panels;
    Json meta;
};

FigureData figure1() {
    StepConfig step;
    step.tau = 1e-6;
    step.tau_rel = 1e-3;
    Case c{"n1_a1_D1", params_of(1.0, 1.0), InitialDatum::Fig1Bump, 10.0, {}};
    c.output_times = output_grid(1e-3, 10.0, 4);
    auto results = run_cases({c}, step);
    const auto& r = results.front();

    FigureData f;
    std::ostringstream csv;
    csv << "# h(t,y) snapshots; columns: t time, y physical position, h height\n";
    csv << "t,y,h\n";
    SvgPlot plot{"h(t,y), n = alpha = D = 1", "y", "h", false, false, {}};
    const TransientState init = initial_state(c.datum, step, c.params.mass);
    std::vector<std::pair<double, const TransientState*>> shots{{0.0, &init}};
    for (const auto& s : r.run.snapshots) shots.emplace_back(s.t, &s.state);
    for (const auto& [t, st] : shots) {
        const auto y = st->physical_nodes();
        for (std::size_t i = 0; i < y.size(); ++i) csv << num(t) << ',' << num(y[i]) << ',' << num(st->heights[i]) << '\n';
    }
    for (const auto& [t, st] : shots) {
        const double lt = t > 0.0 ? std::log10(t) : -99.0;
        if (t > 0.0 && std::abs(lt - std::round(lt)) > 1e-9) continue;
        SvgSeries s{"t = " + short_num(t), st->physical_nodes(), {}, t == 0.0};
        s.y.assign(st->heights.values().begin(), st->heights.values().end());
        plot.series.push_back(std::move(s));
    }
    f.csv = csv.str();
    f.panels = {plot};
    f.meta["cases"] = Json::array({case_meta(r)});
    f.meta["step"] = detail::step_to_json(step);
    return f;
}

FigureData profile_convergence(const std::vector<Case>& cases, const StepConfig& step, const std::string& what) {
    auto results = run_cases(cases, step);
    FigureData f;
    std::ostringstream csv;
    csv << "# rescaled profiles H(t,x) = s h(t, c + s x) against the limit profile; columns: case label, "
           "kind (transient|target), t time (nan for target), x in [0,1], H\n";
    csv << "case,kind,t,x,H\n";
    f.meta["cases"] = Json::array();
    for (const auto& r : results) {
        const Profile target = target_profile(r.spec.params);
        const Profile tgt = Profile(comparison_grid(), on_comparison_grid(target));
        const DistanceSeries ds = compare_profiles(r.run.snapshots, target);
        SvgPlot plot{r.spec.label, "x", "H", false, false, {}};
        const TransientState init = initial_state(r.spec.datum, step, r.spec.params.mass);
        plot.series.push_back(profile_series("t = 0", rescaled_profile(init), true));
        for (const auto& s : r.run.snapshots) {
            const Profile H = rescaled_profile(s.state);
            for (std::size_t i = 0; i < H.size(); ++i) {
                csv << r.spec.label << ",transient," << num(s.t) << ',' << num(H.grid()[i]) << ',' << num(H[i]) << '\n';
            }
        }
        for (const Snapshot* s : decade_snapshots(r.run)) {
            plot.series.push_back(profile_series("t = " + short_num(s->t), rescaled_profile(s->state)));
        }
        for (std::size_t i = 0; i < tgt.size(); ++i) {
            csv << r.spec.label << ",target,nan," << num(tgt.grid()[i]) << ',' << num(tgt[i]) << '\n';
        }
        plot.series.push_back(profile_series(what, tgt, true));
        f.panels.push_back(std::move(plot));

        Json j = case_meta(r);
        Json dist = Json::array();
        double overshoot = 0.0;
        for (std::size_t k = 0; k < ds.records.size(); ++k) {
            dist.push_back({{"t", ds.records[k].t}, {"sup", ds.records[k].distance.sup}, {"l2", ds.records[k].distance.l2}});
            const Profile H = rescaled_profile(r.run.snapshots[k].state);
            for (std::size_t i = 0; i < H.size(); ++i) overshoot = std::max(overshoot, H[i] - tgt[i]);
        }
        j["distance"] = dist;
        j["final_sup_distance"] = ds.records.empty() ? 0.0 : ds.records.back().distance.sup;
        j["monotone_last_decade"] = ds.monotone_last_decade;
        j["max_overshoot"] = overshoot;
        j["front_ratio"] = r.run.final_state.length() / 2.0;
        f.meta["cases"].push_back(std::move(j));
    }
    f.csv = csv.str();
    f.meta["step"] = detail::step_to_json(step);
    return f;
}

std::vector<Case> four_cases(InitialDatum datum, double t_end) {
    std::vector<Case> out;
    for (double n : {1.0, 2.0}) {
        for (double a : {0.5, 2.0}) {
            Case c{"n" + short_num(n) + "_a" + short_num(a), params_of(n, a), datum, t_end, output_grid(1e-3, t_end, 4)};
            out.push_back(std::move(c));
        }
    }
    return out;
}

FigureData figure7(const FigureOptions& o) {
    std::vector<Case> cases;
    for (double n : {1.0, 2.0}) {
        for (double a : {0.5, critical_alpha(n), 2.0}) {
            cases.push_back({"n" + short_num(n) + "_a" + short_num(a), params_of(n, a), InitialDatum::Fig1Bump,
                             o.t_end, {}});
        }
    }
    auto results = run_cases(cases, o.step);
    FigureData f;
    std::ostringstream csv;
    csv << "# front half-width s(t), resampled 20 per decade; columns: case label, n, alpha, t, s\n";
    csv << "case,n,alpha,t,s\n";
    SvgPlot p1{"s(t), n = 1", "t", "s", true, true, {}}, p2{"s(t), n = 2", "t", "s", true, true, {}};
    f.meta["cases"] = Json::array();
    for (const auto& r : results) {
        const auto [t, s] = fit_series(r.run);
        SvgSeries ser{r.spec.label, {}, {}, false};
        for (double tq : geometric_times(1e-3, t.back())) {
            const double sv = interp_loglog(t, s, tq);
            csv << r.spec.label << ',' << num(r.spec.params.n) << ',' << num(r.spec.params.alpha) << ',' << num(tq)
                << ',' << num(sv) << '\n';
            ser.x.push_back(tq);
            ser.y.push_back(sv);
        }
        (r.spec.params.n == 1.0 ? p1 : p2).series.push_back(std::move(ser));
        Json j = case_meta(r);
        const ExponentFit fit = fit_spreading_exponent(t, s);
        const double expected = predict(r.spec.params, comparison_grid()).gamma;
        j["gamma_fit"] = fit.gamma_hat;
        j["gamma_expected"] = expected;
        j["gamma_relative_error"] = std::abs(fit.gamma_hat - expected) / expected;
        j["prefactor_fit"] = fit.prefactor_hat;
        j["fit_window"] = {fit.window.t_lo, fit.window.t_hi};
        j["fit_residual"] = fit.residual;
        f.meta["cases"].push_back(std::move(j));
    }
    f.csv = csv.str();
    f.panels = {p1, p2};
    f.meta["step"] = detail::step_to_json(o.step);
    return f;
}

std::vector<Case> correction_cases(double t_end, bool with_snapshots) {
    std::vector<Case> out;
    const std::vector<std::pair<double, double>> na{{1.0, 0.5}, {1.0, 2.0}, {2.0, 0.5}};
    for (const auto& [n, a] : na) {
        Case c{"n" + short_num(n) + "_a" + short_num(a), params_of(n, a), InitialDatum::Fig1Bump, t_end, {}};
        if (with_snapshots) c.output_times = output_grid(t_end / 100.0, t_end, 4);
        out.push_back(std::move(c));
    }
    return out;
}

FigureData figure8(const FigureOptions& o) {
    auto results = run_cases(correction_cases(o.t_end, false), o.step);
    FigureData f;
    std::ostringstream csv;
    csv << "# time correction d/dt(t^-gamma s); columns: case label, t, measured derivative, reference slope "
           "t^-(k+1) with the predicted k anchored at the last decade\n";
    csv << "case,t,dydt,reference\n";
    f.meta["cases"] = Json::array();
    for (const auto& r : results) {
        SvgPlot plot{r.spec.label + ": |d/dt(t^-gamma s)|", "t", "|d/dt|", true, true, {}};
        const auto [t, s] = fit_series(r.run);
        const AsymptoticPrediction pred = predict(r.spec.params, comparison_grid());
        const auto pts = correction_derivative(t, s, pred.gamma, {1e-2, t.back()});
        Json j = case_meta(r);
        double anchor = 0.0;
        try {
            const CorrectionFit fit = correction_rate(t, s, pred);
            j["decay_fit"] = fit.exponent;
            j["decay_expected"] = fit.expected;
            j["decay_relative_error"] = fit.relative_error;
            j["fit_window"] = {fit.window.t_lo, fit.window.t_hi};
            anchor = fit.coefficient * std::pow(fit.window.t_hi, -fit.exponent - 1.0) /
                     std::pow(fit.window.t_hi, -*pred.beta - 1.0);
        } catch (const Error& e) {
            j["decay_fit_error"] = e.what();
        }
        SvgSeries meas{"measured", {}, {}, false}, ref{"t^-(k+1), k predicted", {}, {}, true};
        for (const auto& [tk, d] : pts) {
            const double rv = anchor * std::pow(tk, -*pred.beta - 1.0);
            csv << r.spec.label << ',' << num(tk) << ',' << num(d) << ',' << num(rv) << '\n';
            if (d != 0.0) {
                meas.x.push_back(tk);
                meas.y.push_back(std::abs(d));
            }
            if (rv > 0.0) {
                ref.x.push_back(tk);
                ref.y.push_back(rv);
            }
        }
        plot.series = {meas, ref};
        f.panels.push_back(std::move(plot));
        f.meta["cases"].push_back(std::move(j));
    }
    f.csv = csv.str();
    f.meta["step"] = detail::step_to_json(o.step);
    return f;
}

FigureData figure9(const FigureOptions& o) {
    auto results = run_cases(correction_cases(o.t_end, true), o.step);
    FigureData f;
    std::ostringstream csv;
    csv << "# normalized correction (H-H0)/|H-H0|_inf at late times against H1/|H1|_inf; columns: case label, "
           "t time (nan for H1), x, value\n";
    csv << "case,t,x,value\n";
    f.meta["cases"] = Json::array();
    for (const auto& r : results) {
        const AsymptoticPrediction pred = predict(r.spec.params, comparison_grid());
        SvgPlot plot{r.spec.label, "x", "normalized correction", false, false, {}};
        Json j = case_meta(r);
        Json shapes = Json::array();
        for (const Snapshot* s : decade_snapshots(r.run)) {
            const CorrectionRecord rec = correction_record(s->state, pred.H0, *pred.H1);
            for (std::size_t i = 0; i < rec.shape.size(); ++i) {
                csv << r.spec.label << ',' << num(rec.t) << ',' << num(rec.shape.grid()[i]) << ',' << num(rec.shape[i])
                    << '\n';
            }
            plot.series.push_back(profile_series("t = " + short_num(rec.t), rec.shape));
            shapes.push_back({{"t", rec.t}, {"sup_distance", rec.sup_distance}, {"shape_error", rec.shape_error}});
        }
        auto h1 = on_comparison_grid(*pred.H1);
        double sup = 0.0;
        for (double v : h1) sup = std::max(sup, std::abs(v));
        for (double& v : h1) v /= sup;
        const Profile ref(comparison_grid(), h1);
        for (std::size_t i = 0; i < ref.size(); ++i) {
            csv << r.spec.label << ",nan," << num(ref.grid()[i]) << ',' << num(ref[i]) << '\n';
        }
        plot.series.push_back(profile_series("H1 / |H1|", ref, true));
        f.panels.push_back(std::move(plot));
        j["shapes"] = shapes;
        f.meta["cases"].push_back(std::move(j));
    }
    f.csv = csv.str();
    f.meta["step"] = detail::step_to_json(o.step);
    return f;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) fail(ErrorKind::IoError, "cannot open " + p.string() + " for writing");
    os << text;
    if (!os) fail(ErrorKind::IoError, "write to " + p.string() + " failed");
}

}  // namespace

FigureArtifacts reproduce_figure(FigureTag tag, const std::filesystem::path& out_root, const FigureOptions& o) {
    o.step.validate();
    if (!(o.t_end > 1.0)) fail(ErrorKind::InvalidArgument, "figure t_end must exceed 1");
    FigureData f;
    switch (tag) {
        case FigureTag::Fig1: f = figure1(); break;
        case FigureTag::Fig3: {
            std::vector<Case> cases;
            for (double n : {1.0, 2.0}) {
                cases.push_back({"n" + short_num(n) + "_balanced", params_of(n, critical_alpha(n)),
                                 InitialDatum::Fig1Bump, o.t_end, output_grid(1e-3, o.t_end, 4)});
            }
            f = profile_convergence(cases, o.step, "self-similar H_D");
            break;
        }
        case FigureTag::Fig5: f = profile_convergence(four_cases(InitialDatum::Corner, o.t_end), o.step, "H0"); break;
        case FigureTag::Fig6: f = profile_convergence(four_cases(InitialDatum::Fig1Bump, o.t_end), o.step, "H0"); break;
        case FigureTag::Fig7: f = figure7(o); break;
        case FigureTag::Fig8: f = figure8(o); break;
        case FigureTag::Fig9: f = figure9(o); break;
    }
    FigureArtifacts a;
    a.directory = out_root / to_string(tag);
    std::error_code ec;
    std::filesystem::create_directories(a.directory, ec);
    if (ec) fail(ErrorKind::IoError, "cannot create " + a.directory.string() + ": " + ec.message());
    a.data_csv = a.directory / "data.csv";
    a.plot_svg = a.directory / "plot.svg";
    a.meta_json = a.directory / "meta.json";

    Json meta;
    meta["figure"] = to_string(tag);
    meta["t_end"] = tag == FigureTag::Fig1 ? 10.0 : o.t_end;
    for (auto& [k, v] : f.meta.items()) meta[k] = v;
    write_file(a.data_csv, f.csv);
    write_file(a.plot_svg, render_svg(f.panels, f.panels.size() > 1 ? 2 : 1));
    write_file(a.meta_json, meta.dump(2) + "\n");
    return a;
}

// ---------------------------------------------------------------- svg

namespace {

constexpr double kPanelW = 480.0, kPanelH = 340.0;
constexpr double kLeft = 62.0, kRight = 14.0, kTop = 30.0, kBottom = 44.0;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                               "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    bool log = false;
    double map(double v, double a, double b) const {
        const double u = log ? std::log10(v) : v;
        return a + (u - lo) / (hi - lo) * (b - a);
    }
    std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            const int step = std::max(1, static_cast<int>(std::ceil((hi - lo) / 6.0)));
            for (int e = static_cast<int>(std::ceil(lo)); e <= static_cast<int>(std::floor(hi)); e += step) out.push_back(e);
            return out;
        }
        const double raw = (hi - lo) / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 5.0, 10.0}) {
            if (m * mag >= raw) {
                step = m * mag;
                break;
            }
        }
        for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
        return out;
    }
    std::string label(double tick) const {
        if (log) return "1e" + std::to_string(static_cast<int>(std::lround(tick)));
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", tick);
        return buf;
    }
};

Axis make_axis(const SvgPlot& p, bool x_axis) {
    Axis a;
    a.log = x_axis ? p.log_x : p.log_y;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : p.series) {
        for (double v : x_axis ? s.x : s.y) {
            if (!std::isfinite(v) || (a.log && !(v > 0.0))) continue;
            const double u = a.log ? std::log10(v) : v;
            lo = std::min(lo, u);
            hi = std::max(hi, u);
        }
    }
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
        lo -= 0.5;
        hi += 0.5;
    }
    if (!a.log) {
        const double pad = 0.04 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    a.lo = lo;
    a.hi = hi;
    return a;
}

void render_panel(std::ostringstream& os, const SvgPlot& p, double ox, double oy) {
    const Axis ax = make_axis(p, true), ay = make_axis(p, false);
    const double x0 = ox + kLeft, x1 = ox + kPanelW - kRight;
    const double y0 = oy + kPanelH - kBottom, y1 = oy + kTop;
    os << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y1) << "\" width=\"" << fmt(x1 - x0) << "\" height=\""
       << fmt(y0 - y1) << "\" fill=\"none\" stroke=\"#000\"/>\n";
    os << "<text x=\"" << fmt(0.5 * (x0 + x1)) << "\" y=\"" << fmt(oy + 18) << "\" text-anchor=\"middle\">"
       << escape(p.title) << "</text>\n";
    for (double t : ax.ticks()) {
        const double x = x0 + (t - ax.lo) / (ax.hi - ax.lo) * (x1 - x0);
        os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(y0 + 4)
           << "\" stroke=\"#000\"/><text x=\"" << fmt(x) << "\" y=\"" << fmt(y0 + 16)
           << "\" text-anchor=\"middle\" font-size=\"10\">" << ax.label(t) << "</text>\n";
    }
    for (double t : ay.ticks()) {
        const double y = y0 + (t - ay.lo) / (ay.hi - ay.lo) * (y1 - y0);
        os << "<line x1=\"" << fmt(x0 - 4) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(x0) << "\" y2=\"" << fmt(y)
           << "\" stroke=\"#000\"/><text x=\"" << fmt(x0 - 6) << "\" y=\"" << fmt(y + 3)
           << "\" text-anchor=\"end\" font-size=\"10\">" << ay.label(t) << "</text>\n";
    }
    os << "<text x=\"" << fmt(0.5 * (x0 + x1)) << "\" y=\"" << fmt(oy + kPanelH - 8) << "\" text-anchor=\"middle\">"
       << escape(p.x_label) << "</text>\n";
    os << "<text x=\"" << fmt(ox + 14) << "\" y=\"" << fmt(0.5 * (y0 + y1)) << "\" text-anchor=\"middle\" transform=\"rotate(-90 "
       << fmt(ox + 14) << ' ' << fmt(0.5 * (y0 + y1)) << ")\">" << escape(p.y_label) << "</text>\n";
    for (std::size_t k = 0; k < p.series.size(); ++k) {
        const auto& s = p.series[k];
        const char* color = kColors[k % std::size(kColors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.3\""
           << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if ((ax.log && !(s.x[i] > 0.0)) || (ay.log && !(s.y[i] > 0.0))) continue;
            os << (first ? "" : " ") << fmt(ax.map(s.x[i], x0, x1)) << ',' << fmt(ay.map(s.y[i], y0, y1));
            first = false;
        }
        os << "\"/>\n";
        const double ly = y1 + 12.0 + 13.0 * static_cast<double>(k);
        os << "<line x1=\"" << fmt(x1 - 110) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(x1 - 92) << "\" y2=\""
           << fmt(ly - 4) << "\" stroke=\"" << color << "\"" << (s.dashed ? " stroke-dasharray=\"5,3\"" : "")
           << "/><text x=\"" << fmt(x1 - 88) << "\" y=\"" << fmt(ly) << "\" font-size=\"10\">" << escape(s.label)
           << "</text>\n";
    }
}

}  // namespace

std::string render_svg(const std::vector<SvgPlot>& panels, std::size_t columns) {
    if (panels.empty()) fail(ErrorKind::InvalidArgument, "nothing to plot");
    columns = std::max<std::size_t>(1, std::min(columns, panels.size()));
    const std::size_t rows = (panels.size() + columns - 1) / columns;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kPanelW * static_cast<double>(columns))
       << "\" height=\"" << fmt(kPanelH * static_cast<double>(rows))
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    for (std::size_t k = 0; k < panels.size(); ++k) {
        render_panel(os, panels[k], kPanelW * static_cast<double>(k % columns), kPanelH * static_cast<double>(k / columns));
    }
    os << "</svg>\n";
    return os.str();
}

std::string render_svg(const SvgPlot& plot) { return render_svg(std::vector<SvgPlot>{plot}, 1); }

}  // namespace tfe
