#pragma once

#include <utility>
#include <variant>

namespace tfe {

/// Friction strength d in (d_y h)^2 = d (+-s')^alpha, in physical units.
struct PhysicalFriction {
    double d;
    bool operator==(const PhysicalFriction&) const = default;
};

/// Friction strength D after the mass/scaling normalization (d = D^2 when M = 2).
struct NormalizedFriction {
    double D;
    bool operator==(const NormalizedFriction&) const = default;
};

using Friction = std::variant<PhysicalFriction, NormalizedFriction>;

enum class Regime { Strong, Balanced, Weak };

const char* to_string(Regime regime) noexcept;

/// |alpha (n+3) - 4| below this is treated as the balanced case.
inline constexpr double kBalancedTolerance = 1e-12;

/// alpha = 4/(n+3): the only exponent with an exact self-similar structure.
double critical_alpha(double n) noexcept;

/// Strong if alpha < 4/(n+3), Weak if above, Balanced within kBalancedTolerance.
Regime classify(double n, double alpha) noexcept;

struct ProblemParams {
    double n = 1.0;      ///< mobility exponent, m(h) = h^n, 1 <= n < 3
    double alpha = 1.0;  ///< contact-line friction exponent, > 0
    Friction friction = NormalizedFriction{1.0};
    double mass = 2.0;

    /// Throws ValidationError naming the violated invariant.
    void validate() const;

    Regime regime() const noexcept { return classify(n, alpha); }
    bool is_normalized() const noexcept {
        return std::holds_alternative<NormalizedFriction>(friction);
    }
    /// Normalized D; throws InvalidArgument for physical friction.
    double D() const;
    /// Coefficient d of the contact-line law in the units the problem is posed in
    /// (d itself, or D^2 for the normalized problem).
    double d_equivalent() const noexcept;

    bool operator==(const ProblemParams&) const = default;
};

/// Units H*, Y*, T* mapping the normalized problem (M = 2, D = 1) to physical variables:
/// t = T* t_hat, y = Y* y_hat, h = H* h_hat.
struct ScalingFactors {
    double h_star = 1.0;
    double y_star = 1.0;
    double t_star = 1.0;
};

/// Scale out mass and friction strength. Requires physical friction and a non-balanced
/// alpha; returns params with D = 1, mass = 2.
std::pair<ProblemParams, ScalingFactors> normalize(const ProblemParams& physical);

/// Inverse of normalize: recover the physical (d, M) carried by the factors.
ProblemParams rescale_back(const ProblemParams& normalized, const ScalingFactors& factors);

/// Physical contact-line position from a normalized one: s(t) = Y* s_hat(t / T*).
double physical_front(double normalized_front_at_scaled_time, const ScalingFactors& factors);
double normalized_time(double physical_time, const ScalingFactors& factors);

}  // namespace tfe
