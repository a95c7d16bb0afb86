#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "tfe/grid.hpp"
#include "tfe/params.hpp"

namespace tfe {

/// Height on the wetted interval [s_minus, s_plus]. The nodes are an affine image of a
/// fixed reference mesh X on [-1,1]: y = s_minus + (X+1)/2 (s_plus - s_minus).
struct TransientState {
    double t = 0.0;
    double s_minus = -1.0;
    double s_plus = 1.0;
    Profile heights;  ///< H over the reference mesh X; zero at both ends
    std::array<double, 2> s_dot{0.0, 0.0};

    double length() const noexcept { return s_plus - s_minus; }
    std::size_t nodes() const noexcept { return heights.size(); }
    double y(std::size_t i) const;
    std::vector<double> physical_nodes() const;
    /// h on the physical interval, zero outside.
    double h(double y) const;
    /// Throws InvalidArgument when an invariant is broken.
    void validate() const;
    /// H(x) = s h(c + s x) on x in [-1,1], c the centre and s the half-width.
    double rescaled(double x) const;
};

double mass(const TransientState& state);
/// 1/2 int (h_y)^2 of the piecewise-linear height
double energy(const TransientState& state);
/// max_i |H_i - H_{N-i}| plus |s_minus + s_plus|
double symmetry_defect(const TransientState& state);

struct DualForce {
    Profile pi;                    ///< on the physical nodes
    std::array<double, 2> zeta{};  ///< at s_minus, s_plus
};

struct StepConfig {
    double tau = 1e-4;
    std::size_t mesh_nodes = 201;
    double theta_clamp = 1e-12;
    std::optional<std::size_t> rescale_period;
    /// Step size grows as tau_rel * t when that exceeds tau (0 keeps tau fixed).
    double tau_rel = 0.0;
    double tau_max = std::numeric_limits<double>::infinity();
    /// Reference mesh X = (1-g) u + g sin(pi u / 2).
    double mesh_grading = 0.8;
    /// Reject steps whose energy exceeds the previous one by more than 1e-12 |E|.
    bool reject_energy_increase = true;

    void validate() const;

    bool operator==(const StepConfig&) const = default;
};

struct StepSolution {
    Profile hdot;  ///< on the physical nodes
    DualForce force;
    double residual = 0.0;  ///< relative residual of the saddle system
};

/// One semi-implicit solve for (hdot, pi, zeta) at step size tau.
StepSolution assemble_and_solve_step(const TransientState& state, const ProblemParams& params,
                                     const StepConfig& cfg, double tau);
inline StepSolution assemble_and_solve_step(const TransientState& state, const ProblemParams& params,
                                            const StepConfig& cfg) {
    return assemble_and_solve_step(state, params, cfg, cfg.tau);
}

struct FrontVelocity {
    double minus = 0.0;
    double plus = 0.0;
    /// -+ d^(-1/alpha) |h_y|^(2/alpha) at the same slopes
    double closed_minus = 0.0;
    double closed_plus = 0.0;
    bool receding = false;
};

/// Front speeds from the kinematic condition projected on the end basis functions.
FrontVelocity reconstruct_front_velocity(const TransientState& state, const DualForce& force,
                                         const Profile& hdot, const ProblemParams& params,
                                         const StepConfig& cfg);

/// Advance heights and endpoints by tau; mass is conserved to rounding.
TransientState ale_update(const TransientState& state, const FrontVelocity& sdot, const Profile& hdot,
                          double tau);

enum class InitialDatum { Fig1Bump, Corner };

/// Preset datum on [-1,1] sampled at the nodes; the continuous datum has the requested mass.
TransientState initial_state(InitialDatum datum, const StepConfig& cfg, double mass = 2.0);
/// Custom datum from nodal (y, h) pairs with h = 0 at both ends.
TransientState initial_state(const std::vector<double>& y, const std::vector<double>& h, const StepConfig& cfg);

struct RunRecord {
    double t = 0.0;
    double s_minus = 0.0;
    double s_plus = 0.0;
    double mass = 0.0;
    double energy = 0.0;
};

struct Snapshot {
    double t = 0.0;
    TransientState state;
};

struct RunResult {
    std::vector<RunRecord> series;  ///< every accepted step, starting with t0
    std::vector<Snapshot> snapshots;
    TransientState final_state;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t energy_rejections = 0;
    std::size_t receding_rejections = 0;
    std::size_t energy_violations = 0;  ///< accepted steps with E_new > E_old + 1e-12 |E_old|
    double max_mass_step_drift = 0.0;   ///< max per-step |dM| / M
    double max_symmetry_defect = 0.0;
    double max_residual = 0.0;
};

using StepObserver = std::function<void(const TransientState&, const RunRecord&)>;

RunResult run(const TransientState& initial, const ProblemParams& params, const StepConfig& cfg, double t_end,
              const std::vector<double>& output_times = {}, const StepObserver& observer = {});

}  // namespace tfe
