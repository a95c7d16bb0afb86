#include <doctest.h>

#include <cmath>
#include <vector>

#include "tfe/errors.hpp"
#include "tfe/transient.hpp"

using namespace tfe;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::InvalidArgument;
}

ProblemParams unit(double n, double alpha) {
    ProblemParams p;
    p.n = n;
    p.alpha = alpha;
    p.friction = NormalizedFriction{1.0};
    return p;
}

StepConfig small_mesh() {
    StepConfig c;
    c.tau = 1e-4;
    c.mesh_nodes = 101;
    return c;
}

double odd_defect(const Profile& p) {
    double d = 0.0;
    const std::size_t N = p.size();
    for (std::size_t i = 0; i < N; ++i) d = std::max(d, std::abs(p[i] - p[N - 1 - i]));
    return d;
}

}  // namespace

TEST_SUITE("state") {
    TEST_CASE("preset data carry the requested mass") {
        const StepConfig c = small_mesh();
        for (InitialDatum d : {InitialDatum::Fig1Bump, InitialDatum::Corner}) {
            const TransientState s = initial_state(d, c, 3.0);
            CHECK(mass(s) == doctest::Approx(3.0).epsilon(1e-3));  // interpolation error only
            CHECK(s.s_minus == -1.0);
            CHECK(s.s_plus == 1.0);
            CHECK(symmetry_defect(s) <= 1e-14);
            CHECK(energy(s) > 0.0);
            s.validate();
        }
    }

    TEST_CASE("custom data") {
        const StepConfig c = small_mesh();
        const std::vector<double> y{-1, -0.5, 0, 0.5, 1}, h{0, 1, 1.5, 1, 0};
        const TransientState s = initial_state(y, h, c);
        CHECK(s.h(0.0) == doctest::Approx(1.5));
        CHECK(s.h(2.0) == 0.0);
        CHECK(kind_of([&] { initial_state(y, std::vector<double>{0, 1, 1, 0}, c); }) == ErrorKind::InvalidArgument);
    }

    TEST_CASE("configuration validation") {
        StepConfig c = small_mesh();
        c.tau = 0.0;
        CHECK_THROWS_AS(c.validate(), Error);
        c = small_mesh();
        c.mesh_nodes = 2;
        CHECK_THROWS_AS(c.validate(), Error);
    }
}

TEST_SUITE("step") {
    TEST_CASE("one step keeps even symmetry") {
        const StepConfig c = small_mesh();
        const TransientState s = initial_state(InitialDatum::Fig1Bump, c);
        const StepSolution sol = assemble_and_solve_step(s, unit(1.0, 1.0), c);
        CHECK(odd_defect(sol.hdot) <= 1e-10);
        CHECK(odd_defect(sol.force.pi) <= 1e-8 * sol.force.pi.sup_norm());
        CHECK(sol.force.zeta[0] == doctest::Approx(sol.force.zeta[1]).epsilon(1e-10));
        CHECK(sol.residual <= 1e-10);
        const FrontVelocity v = reconstruct_front_velocity(s, sol.force, sol.hdot, unit(1.0, 1.0), c);
        CHECK(v.plus > 0.0);
        CHECK(v.minus == doctest::Approx(-v.plus).epsilon(1e-10));
    }

    TEST_CASE("one step lowers the energy and keeps the mass") {
        const StepConfig c = small_mesh();
        for (double n : {1.0, 2.0}) {
            for (double a : {0.5, 1.0, 2.0}) {
                CAPTURE(n);
                CAPTURE(a);
                const ProblemParams p = unit(n, a);
                const TransientState s = initial_state(InitialDatum::Fig1Bump, c);
                const StepSolution sol = assemble_and_solve_step(s, p, c);
                const FrontVelocity v = reconstruct_front_velocity(s, sol.force, sol.hdot, p, c);
                const TransientState next = ale_update(s, v, sol.hdot, c.tau);
                CHECK(energy(next) < energy(s));
                CHECK(mass(next) == doctest::Approx(mass(s)).epsilon(1e-13));
                CHECK(next.t == doctest::Approx(c.tau));
            }
        }
    }

    TEST_CASE("frozen fronts reduce to a nodal update") {
        const StepConfig c = small_mesh();
        const TransientState s = initial_state(InitialDatum::Fig1Bump, c);
        const StepSolution sol = assemble_and_solve_step(s, unit(1.0, 1.0), c);
        const TransientState next = ale_update(s, FrontVelocity{}, sol.hdot, c.tau);
        CHECK(next.s_minus == s.s_minus);
        CHECK(next.s_plus == s.s_plus);
        for (std::size_t i = 1; i + 1 < s.nodes(); ++i) {
            CHECK(next.heights[i] == doctest::Approx(s.heights[i] + c.tau * sol.hdot[i]).epsilon(1e-14));
        }
    }
}

TEST_SUITE("run") {
    TEST_CASE("short run spreads, conserves and dissipates") {
        const StepConfig c = small_mesh();
        const TransientState s0 = initial_state(InitialDatum::Fig1Bump, c);
        std::size_t observed = 0;
        const RunResult r = run(s0, unit(1.0, 1.0), c, 0.1, {0.01, 0.1},
                                [&](const TransientState&, const RunRecord&) { ++observed; });
        REQUIRE(r.series.size() >= 2);
        CHECK(observed + 1 >= r.accepted);
        for (std::size_t i = 1; i < r.series.size(); ++i) {
            CHECK(r.series[i].s_plus >= r.series[i - 1].s_plus);
            CHECK(r.series[i].energy <= r.series[i - 1].energy * (1.0 + 1e-12));
        }
        CHECK(r.energy_violations == 0);
        CHECK(r.max_mass_step_drift <= 1e-12);
        CHECK(std::abs(mass(r.final_state) - mass(s0)) <= 1e-12 * mass(s0));
        CHECK(r.max_symmetry_defect <= 1e-10);
        CHECK(r.final_state.t == doctest::Approx(0.1));
        REQUIRE(r.snapshots.size() == 2);
        CHECK(r.snapshots[0].t == doctest::Approx(0.01));
        CHECK(r.snapshots[1].t == doctest::Approx(0.1));
    }

    TEST_CASE("runs are deterministic") {
        StepConfig c = small_mesh();
        c.tau_rel = 1e-2;
        const TransientState s0 = initial_state(InitialDatum::Corner, c);
        const RunResult a = run(s0, unit(2.0, 0.5), c, 1.0);
        const RunResult b = run(s0, unit(2.0, 0.5), c, 1.0);
        REQUIRE(a.series.size() == b.series.size());
        CHECK(a.final_state.s_plus == b.final_state.s_plus);
        CHECK(a.final_state.heights[50] == b.final_state.heights[50]);
    }

    TEST_CASE("collapsed interval") {
        const StepConfig c = small_mesh();
        const TransientState s = initial_state(InitialDatum::Fig1Bump, c);
        const StepSolution sol = assemble_and_solve_step(s, unit(1.0, 1.0), c);
        FrontVelocity inward;
        inward.minus = 1e6;
        inward.plus = -1e6;
        CHECK(kind_of([&] { ale_update(s, inward, sol.hdot, c.tau); }) == ErrorKind::IntervalCollapse);
        TransientState bad = s;
        bad.s_plus = bad.s_minus;
        CHECK_THROWS_AS(bad.validate(), Error);
    }
}
