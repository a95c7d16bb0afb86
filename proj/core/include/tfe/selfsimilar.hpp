#pragma once

#include <vector>

#include "tfe/grid.hpp"
#include "tfe/params.hpp"

namespace tfe {

struct ShootingConfig {
    double tol_B = 1e-10;
    double eps_start = 1e-6;  ///< distance from x = 1 where the ODE takes over from the series
    int series_terms = 3;
    int grid_cells = 400;       ///< output profile resolution
    double grid_ratio = 0.99;   ///< geometric grading of the output grid toward x = 1
    int max_iterations = 200;   ///< per root-find

    void validate() const;
};

/// One term coeff * z^power * log(z)^log_power of an expansion in z = 1 - x.
struct SeriesTerm {
    double coeff = 0.0;
    double power = 0.0;
    int log_power = 0;
};

/// Expansion of H near the contact line x = 1 in z = 1 - x.
struct LocalSeries {
    std::vector<SeriesTerm> terms;
    double free_coefficient = 0.0;  ///< the coefficient fixed by H'(0) = 0
    double free_power = 0.0;
    double z0 = 0.0;                ///< recommended start point

    double value(double z) const;
    double dz(double z) const;
    double dzz(double z) const;
    /// Integral over [0, z].
    double integral(double z) const;
};

struct SpreadingLaw {
    double coefficient = 0.0;  ///< s(t) = (coefficient * t)^exponent
    double exponent = 0.0;
    double front(double t) const;
    double velocity(double t) const;
};

struct SelfSimilarResiduals {
    double mass_defect = 0.0;      ///< |int_0^1 H - 1| by Hermite-corrected trapezoid on the nodes
    double slope_defect = 0.0;     ///< |H'(1)^2 - D^2 B^(2 alpha)|
    double symmetry_defect = 0.0;  ///< |H'(0)|
};

struct SelfSimilarSolution {
    double B = 0.0;
    double D = 0.0;
    double n = 1.0;
    double alpha = 1.0;
    double gamma = 0.2;
    Profile profile;    ///< H on [0,1]
    Profile slope;      ///< H'
    Profile curvature;  ///< H''
    SpreadingLaw s_law;
    SelfSimilarResiduals residuals;
    LocalSeries series;  ///< expansion of H near x = 1 used to start the integration
};

/// Smooth evaluation of a solution between its nodes: quintic Hermite interpolation of
/// (H, H', H'') per cell, and the local series inside the cell touching x = 1.
class SmoothProfile {
public:
    explicit SmoothProfile(const SelfSimilarSolution& sol);

    /// H at distance z = 1 - x from the contact line (z in [0,1]).
    double at_distance(double z) const;
    double operator()(double x) const { return at_distance(1.0 - x); }
    /// dH/dx at distance z.
    double slope_at_distance(double z) const;

private:
    Profile h_, dh_, d2h_;
    LocalSeries series_;
    double z_series_;
};

/// Closed-form solution for n = 1 (alpha = 1) on the default output grid.
SelfSimilarSolution explicit_n1(double D, const Grid1D& grid);
SelfSimilarSolution explicit_n1(double D);

/// Solve H^(n-1) H''' = B^2 x, H'(0) = 0, H(1) = 0, H'(1) = -D B^alpha, int H = 1
/// with alpha = 4/(n+3). Requires normalized friction.
SelfSimilarSolution solve(const ProblemParams& params, const ShootingConfig& cfg = {});
SelfSimilarSolution solve(double n, double D, const ShootingConfig& cfg = {});

/// Expansion of the solution of H^(n-1) H''' = B^2 x with H(1) = 0, H'(1) = -D B^alpha
/// near x = 1, with the free coefficient fixed by shooting for H'(0) = 0.
/// `terms` counts all kept terms including the free one.
LocalSeries local_series(double B, double D, double n, int terms,
                         const ShootingConfig& cfg = {});

/// Expansion at x = 1 of H''' = -k (1 - tilt z) H^(1-n) in z = 1-x with H(0) = 0,
/// H_z(0) = theta and the given free coefficient (the theta z^2 coefficient when
/// theta > 0, otherwise the free mode of the touchdown expansion).
LocalSeries series_expansion(double k, double theta, double n, int terms, double free, double tilt);

/// C5 = (q (q-1) (2-q))^(-1/n), q = 3/n: touchdown constant for zero contact angle.
double touchdown_constant(double n);

}  // namespace tfe
