#pragma once

#include <functional>
#include <optional>

#include "tfe/grid.hpp"

namespace tfe {

struct QuadratureOptions {
    int panels = 16;            ///< uniform Gauss-Legendre panels for the smooth part
    int graded_levels = 120;    ///< cap on geometric panels toward b when singular
    double graded_ratio = 0.15; ///< width ratio between consecutive graded panels
};

/// Integral of f over [a,b]. If `singularity_exponent` p is set, f(x)(b-x)^(-p) is
/// assumed smooth near b; panels are graded geometrically toward b down to a width
/// of 1e-8 |b|, and the last cell is integrated exactly in u = (b-x)^(1+p) with the
/// smooth factor frozen. Since f only sees x, accuracy degrades as p -> -1; prefer
/// integrate_weighted when the factorization is known. Throws NonIntegrable for p <= -1.
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::optional<double> singularity_exponent = std::nullopt,
                 const QuadratureOptions& opts = {});

/// Integral of g(x) (b-x)^p over [a,b] with g smooth. The weight is evaluated from
/// the exact distance to b, so accuracy holds arbitrarily close to the endpoint.
double integrate_weighted(const std::function<double(double)>& g, double p, double a, double b,
                          const QuadratureOptions& opts = {});

/// Exact integral of the piecewise-linear interpolant of `f` over [a,b].
double integrate(const Profile& f, double a, double b);

}  // namespace tfe
