#include <doctest.h>

#include <cmath>
#include <vector>

#include "tfe/errors.hpp"
#include "tfe/params.hpp"
#include "tfe/selfsimilar.hpp"

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

double sup_diff(const Profile& a, const Profile& b) {
    double d = 0.0;
    for (double x : a.grid().nodes()) d = std::max(d, std::abs(a(x) - b(x)));
    return d;
}

double parabola_distance(const SelfSimilarSolution& s) {
    double d = 0.0;
    for (std::size_t i = 0; i < s.profile.size(); ++i) {
        const double x = s.profile.grid()[i];
        d = std::max(d, std::abs(s.profile[i] - 1.5 * (1.0 - x * x)));
    }
    return d;
}

void check_invariants(const SelfSimilarSolution& s, double tol) {
    CHECK(s.residuals.mass_defect <= tol);
    CHECK(s.residuals.slope_defect <= tol);
    CHECK(s.residuals.symmetry_defect <= tol);
    for (std::size_t i = 0; i + 1 < s.profile.size(); ++i) CHECK(s.profile[i] > 0.0);
    CHECK(s.profile[s.profile.size() - 1] == doctest::Approx(0.0));
    CHECK(s.gamma == doctest::Approx(1.0 / (s.n + 4.0)));
}

}  // namespace

TEST_SUITE("explicit_n1") {
    TEST_CASE("zero contact angle is the source solution") {
        const auto s = explicit_n1(0.0);
        CHECK(s.B * s.B == doctest::Approx(45.0).epsilon(1e-14));
        CHECK(s.profile[0] == doctest::Approx(15.0 / 8.0).epsilon(1e-14));
        for (std::size_t i = 0; i < s.profile.size(); ++i) {
            const double x = s.profile.grid()[i];
            CHECK(s.profile[i] == doctest::Approx(15.0 / 8.0 * (1 - x * x) * (1 - x * x)).epsilon(1e-13));
        }
        check_invariants(s, 1e-10);
    }

    TEST_CASE("closed form at D = 1 and D = 1e3") {
        const auto s = explicit_n1(1.0);
        CHECK(s.B == doctest::Approx(7.5 * (std::sqrt(1.8) - 1.0)).epsilon(1e-14));
        CHECK(s.B == doctest::Approx(2.5623067).epsilon(1e-6));
        check_invariants(s, 1e-10);
        const auto big = explicit_n1(1e3);
        CHECK(big.B * 1e3 == doctest::Approx(3.0).epsilon(1e-6));
        CHECK(std::abs(big.profile[0] - 1.5) <= 1e-3);
    }

    TEST_CASE("negative D") {
        CHECK(kind_of([] { explicit_n1(-1.0); }) == ErrorKind::NegativeD);
        CHECK(kind_of([] { solve(2.0, -0.1); }) == ErrorKind::NegativeD);
    }
}

TEST_SUITE("solve") {
    TEST_CASE("n = 1 reproduces the closed form") {
        for (double D : {0.0, 0.5, 1.0, 10.0}) {
            CAPTURE(D);
            const auto num = solve(1.0, D);
            const auto ref = explicit_n1(D, num.profile.grid());
            CHECK(std::abs(num.B - ref.B) <= 1e-8);
            CHECK(sup_diff(num.profile, ref.profile) <= 1e-6);
        }
    }

    TEST_CASE("params entry point requires the balanced exponent and D") {
        ProblemParams p;
        p.n = 2.0;
        p.alpha = critical_alpha(2.0);
        p.friction = NormalizedFriction{1.0};
        const auto s = solve(p);
        CHECK(s.B == doctest::Approx(solve(2.0, 1.0).B).epsilon(1e-12));
        p.alpha = 1.0;
        CHECK_THROWS_AS(solve(p), Error);
    }

    TEST_CASE("invariants for several n") {
        for (double n : {1.2, 2.0, 2.5}) {
            for (double D : {0.0, 1.0, 1e3}) {
                CAPTURE(n);
                CAPTURE(D);
                const auto s = solve(n, D);
                check_invariants(s, 1e-8);
                const double theta = D * std::pow(s.B, critical_alpha(n));
                CHECK(s.slope[s.slope.size() - 1] == doctest::Approx(-theta).epsilon(1e-6));
            }
        }
    }

    TEST_CASE("large D approaches the parabola") {
        const auto s = solve(2.0, 1e3);
        CHECK(parabola_distance(s) <= 1e-2);
    }

    TEST_CASE("B decreases strictly in D") {
        for (double n : {1.0, 2.0}) {
            double prev = INFINITY;
            for (double D : {0.0, 0.01, 0.1, 0.3, 1.0, 3.0, 10.0, 100.0}) {
                const double B = solve(n, D).B;
                CHECK(B < prev);
                prev = B;
            }
        }
    }

    TEST_CASE("limit law improves with D") {
        for (double n : {1.0, 2.0}) {
            const double a = critical_alpha(n);
            double prev_slope = INFINITY, prev_height = INFINITY;
            for (double D : {1e2, 1e3, 1e4}) {
                const auto s = solve(n, D);
                const double slope_err = std::abs(std::abs(D * std::pow(s.B, a)) - 3.0);
                const double height_err = std::abs(s.profile[0] - 1.5);
                CHECK(slope_err < prev_slope);
                CHECK(height_err < prev_height);
                prev_slope = slope_err;
                prev_height = height_err;
            }
            CHECK(prev_slope <= 1e-2);
        }
    }

    TEST_CASE("zero contact angle has a flat touchdown") {
        const auto s = solve(2.0, 0.0);
        CHECK(std::abs(s.slope[s.slope.size() - 1]) <= 1e-6);
    }

    TEST_CASE("start point robustness") {
        for (double n : {1.5, 2.0}) {
            ShootingConfig a, b;
            b.eps_start = 2.0 * a.eps_start;
            CHECK(std::abs(solve(n, 1.0, a).B - solve(n, 1.0, b).B) <= 10.0 * a.tol_B);
        }
    }

    TEST_CASE("smooth evaluation matches the nodes") {
        const auto s = solve(2.0, 1.0);
        const SmoothProfile sp(s);
        for (std::size_t i = 0; i < s.profile.size(); i += 17) {
            const double x = s.profile.grid()[i];
            CHECK(sp(x) == doctest::Approx(s.profile[i]).epsilon(1e-10));
        }
    }
}

TEST_SUITE("local_series") {
    TEST_CASE("touchdown constant") {
        CHECK(touchdown_constant(2.0) == doctest::Approx(std::pow(3.0 / 8.0, -0.5)).epsilon(1e-14));
    }

    TEST_CASE("n = 1 matches the Taylor expansion of the closed form") {
        const double D = 1.0;
        const auto ref = explicit_n1(D);
        const LocalSeries ls = local_series(ref.B, D, 1.0, 3);
        const double B = ref.B;
        // closed form in z = 1 - x: 1 - x^2 = z (2 - z)
        auto exact = [&](double z) {
            const double u = z * (2.0 - z);
            return 0.5 * B * D * u + B * B / 24.0 * u * u;
        };
        for (double z : {1e-2, 5e-3, 2.5e-3}) {
            CHECK(std::abs(ls.value(z) - exact(z)) <= 10.0 * z * z * z);
        }
        CHECK(ls.dz(0.0) == doctest::Approx(D * B).epsilon(1e-12));
    }

    TEST_CASE("contact slope is the boundary condition") {
        for (double n : {1.3, 2.0, 2.7}) {
            const auto s = solve(n, 1.0);
            const LocalSeries ls = local_series(s.B, 1.0, n, 3);
            CHECK(ls.dz(0.0) == doctest::Approx(std::pow(s.B, critical_alpha(n))).epsilon(1e-12));
        }
    }

    TEST_CASE("zero angle at n = 2 starts with the touchdown power") {
        const auto s = solve(2.0, 0.0);
        const LocalSeries ls = local_series(s.B, 0.0, 2.0, 3);
        REQUIRE(!ls.terms.empty());
        CHECK(ls.terms.front().power == doctest::Approx(1.5));
        CHECK(ls.terms.front().coeff ==
              doctest::Approx(std::pow(s.B * s.B, 0.5) * touchdown_constant(2.0)).epsilon(1e-12));
    }

    TEST_CASE("resonant touchdown") {
        CHECK(kind_of([] { local_series(3.0, 0.0, 1.5, 3); }) == ErrorKind::UnsupportedN);
    }
}
