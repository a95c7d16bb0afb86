#include "tfe/params.hpp"

#include <cmath>
#include <sstream>

#include "tfe/errors.hpp"

namespace tfe {

const char* to_string(Regime regime) noexcept {
    switch (regime) {
        case Regime::Strong: return "strong";
        case Regime::Balanced: return "balanced";
        case Regime::Weak: return "weak";
    }
    return "unknown";
}

double critical_alpha(double n) noexcept { return 4.0 / (n + 3.0); }

Regime classify(double n, double alpha) noexcept {
    const double gap = alpha * (n + 3.0) - 4.0;
    if (std::abs(gap) < kBalancedTolerance) return Regime::Balanced;
    return gap < 0.0 ? Regime::Strong : Regime::Weak;
}

void ProblemParams::validate() const {
    auto reject = [](const std::string& what) { fail(ErrorKind::ValidationError, what); };
    if (!std::isfinite(n) || n < 1.0 || n >= 3.0) reject("n out of [1,3)");
    if (!std::isfinite(alpha) || alpha <= 0.0) reject("alpha must be > 0");
    if (!std::isfinite(mass) || mass <= 0.0) reject("mass must be > 0");
    if (const auto* p = std::get_if<PhysicalFriction>(&friction)) {
        if (!std::isfinite(p->d) || p->d <= 0.0) reject("d must be > 0");
    } else {
        const double D = std::get<NormalizedFriction>(friction).D;
        if (!std::isfinite(D) || D < 0.0) reject("D must be >= 0");
    }
}

double ProblemParams::D() const {
    if (const auto* f = std::get_if<NormalizedFriction>(&friction)) return f->D;
    fail(ErrorKind::InvalidArgument, "friction is physical (d); normalize first");
}

double ProblemParams::d_equivalent() const noexcept {
    if (const auto* p = std::get_if<PhysicalFriction>(&friction)) return p->d;
    const double D = std::get<NormalizedFriction>(friction).D;
    return D * D;
}

std::pair<ProblemParams, ScalingFactors> normalize(const ProblemParams& physical) {
    physical.validate();
    const auto* f = std::get_if<PhysicalFriction>(&physical.friction);
    if (f == nullptr) fail(ErrorKind::InvalidArgument, "normalize expects physical friction d");
    if (physical.regime() == Regime::Balanced) {
        fail(ErrorKind::BalancedRegime,
             "alpha = 4/(n+3): D cannot be scaled out, pass D directly");
    }
    const double n = physical.n;
    const double a = physical.alpha;
    const double half_mass = 0.5 * physical.mass;

    ScalingFactors sf;
    // H*^(4 - a(n+3)) = d (M/2)^(2 - 3a)
    sf.h_star = std::pow(f->d * std::pow(half_mass, 2.0 - 3.0 * a), 1.0 / (4.0 - a * (n + 3.0)));
    sf.y_star = half_mass / sf.h_star;
    sf.t_star = std::pow(sf.y_star, 4.0) * std::pow(sf.h_star, -n);

    ProblemParams out = physical;
    out.friction = NormalizedFriction{1.0};
    out.mass = 2.0;
    return {out, sf};
}

ProblemParams rescale_back(const ProblemParams& normalized, const ScalingFactors& sf) {
    const double a = normalized.alpha;
    ProblemParams out = normalized;
    out.mass = 2.0 * sf.h_star * sf.y_star;
    // D^2 = d Y*^(2+a) / (H*^2 T*^a)
    const double D = normalized.is_normalized() ? normalized.D() : 1.0;
    const double d = D * D * sf.h_star * sf.h_star * std::pow(sf.t_star, a) /
                     std::pow(sf.y_star, 2.0 + a);
    out.friction = PhysicalFriction{d};
    return out;
}

double physical_front(double s_hat, const ScalingFactors& sf) { return sf.y_star * s_hat; }

double normalized_time(double t, const ScalingFactors& sf) { return t / sf.t_star; }

}  // namespace tfe
