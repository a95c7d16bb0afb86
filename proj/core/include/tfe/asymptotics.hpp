#pragma once

#include <optional>
#include <vector>

#include "tfe/grid.hpp"
#include "tfe/params.hpp"
#include "tfe/selfsimilar.hpp"

namespace tfe {

/// Order of the relative correction in s(t) = s0(t) (1 + O(t^power [log t])).
struct OrderTag {
    double t_power = 0.0;
    bool log_t = false;
};

/// w(t) = coefficient * t^(-exponent)
struct PowerLaw {
    double coefficient = 0.0;
    double exponent = 0.0;
    double operator()(double t) const;
};

/// Frozen-speed inner solution F^(n-1) F''' = -s0_dot near the contact line.
struct InnerTravelingWave {
    double s0_dot = 1.0;
    double n = 2.0;
    double alpha = 2.0;
    Profile profile;    ///< F on [0, xi_max], geometric grid in xi
    Profile slope;      ///< F'
    Profile curvature;  ///< F''
    double a_in = 0.0;  ///< xi^2 coefficient of the near-field expansion
    double b_in = 0.0;  ///< far-field translation-mode coefficient (of xi^(3/n - 1)), per s0_dot^(1/n)
    double c_in = 0.0;  ///< far-field coefficient of the decaying mode xi^(4 - 3/n - p), per s0_dot^(1/n)
    double decay_power = 0.0;
    double xi_max = 0.0;
    LocalSeries near_field;

    /// F at xi; beyond xi_max the far-field expansion is used.
    double operator()(double xi) const;
};

struct WeakCorrectionParts {
    Profile f;  ///< B0^(-2/n) H0
    Profile g;  ///< H1 + (C2/n) f
    Profile v;
    Profile w;
    Profile dH1;  ///< H1' from the Green representation
    double C6 = 0.0;
    double integral_f = 0.0;
    double integral_g = 0.0;
    double integral_H1 = 0.0;
    double coercivity_lhs = 0.0;  ///< int x f^-n w (L w)
    double coercivity_rhs = 0.0;  ///< (n-1) int x^2 f^-n w^2 + 3/2 int (w')^2
};

struct AsymptoticPrediction {
    Regime regime = Regime::Strong;
    double n = 1.0;
    double alpha = 1.0;
    Profile H0;
    std::optional<Profile> H1;
    double gamma = 0.0;
    double s0_prefactor = 0.0;   ///< s0(t) = s0_prefactor * t^gamma
    std::optional<double> beta;  ///< decay exponent of omega
    std::optional<double> C1;
    std::optional<double> C2;
    std::optional<double> B0;
    PowerLaw omega;
    OrderTag s1_order;
    std::optional<WeakCorrectionParts> weak_parts;
    std::optional<SelfSimilarSolution> leading;  ///< (B0, H0) for weak, (B, H) for balanced
    std::optional<InnerTravelingWave> inner;     ///< weak, n in (3/2,3): wave at s0_dot = 1
    /// Units of the normalized problem (D = 1) the prediction refers to; identity when
    /// the input already had D = 1.
    ScalingFactors scaling;

    double s0(double t) const;
};

AsymptoticPrediction strong_prediction(const ProblemParams& params, const Grid1D& grid);
AsymptoticPrediction weak_prediction(const ProblemParams& params, const Grid1D& grid);
/// Dispatch on the regime; the balanced case wraps selfsimilar::solve.
AsymptoticPrediction predict(const ProblemParams& params, const Grid1D& grid);

/// Grid for the weak correction: spacing min(h_max, ratio * (1-x)) down to 1-x = z_min.
Grid1D correction_grid(double h_max = 1.0 / 1024.0, double ratio = 0.05, double z_min = 1e-12);

/// Global weak correction for n in [1, 3/2); throws NonIntegrableCorrection for n > 3/2
/// and ResonantN at n = 3/2.
WeakCorrectionParts weak_global_correction(double n, double alpha, const SelfSimilarSolution& leading,
                                           const Grid1D& grid);

/// 1/2 int_0^1 x (x^3 - 3x + 2) (1-x^2)^(1-n) dx
double strong_C1(double n);
/// Closed forms of the strong correction for n = 1 and n = 2 (InvalidArgument otherwise).
double strong_C1_closed_form(double n);
double strong_H1_closed_form(double n, double x);

struct InnerOptions {
    double xi_max = 1e14;
    double xi_start = 1e-8;
    int profile_points = 2001;
    int max_iterations = 400;
};

InnerTravelingWave inner_traveling_wave(double n, double alpha, double s0_dot,
                                        const InnerOptions& opts = {});

/// Outer H0 for xi = s(1-x) >= 10, inner s F(xi) for xi <= 1, log-ramp blend between.
double matched_composite(const AsymptoticPrediction& pred, const InnerTravelingWave& tw, double t,
                         double x);

struct MatchingAudit {
    double inner_constant = 0.0;  ///< s0_dot^(1/n) s0^((n+3)/n) C5
    double outer_constant = 0.0;  ///< B0^(2/n) C5
    double relative_error = 0.0;
    double contact_slope = 0.0;   ///< s0^2 s0_dot^(alpha/2)
    double predicted_slope = 0.0; ///< B0^alpha ((n+4) B0^2 t)^(-beta)
};
MatchingAudit matching_audit(const AsymptoticPrediction& pred, double t);

}  // namespace tfe
