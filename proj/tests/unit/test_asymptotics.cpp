#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tfe/asymptotics.hpp"
#include "tfe/errors.hpp"
#include "tfe/quadrature.hpp"
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

ProblemParams unit(double n, double alpha) {
    ProblemParams p;
    p.n = n;
    p.alpha = alpha;
    p.friction = NormalizedFriction{1.0};
    return p;
}

Grid1D out_grid() { return Grid1D::graded(0.0, 1.0, 400, 0.99); }

double sup_norm(const Profile& p) { return p.sup_norm(); }

}  // namespace

TEST_SUITE("strong") {
    TEST_CASE("C1 by quadrature") {
        CHECK(std::abs(strong_C1(1.0) - 0.1) <= 1e-12);
        CHECK(std::abs(strong_C1(2.0) - (5.0 / 6.0 - std::log(2.0))) <= 1e-12);
        const double direct = integrate(
            [](double x) { return 0.5 * x * (x * x * x - 3.0 * x + 2.0) * std::pow(1.0 - x * x, -0.5); }, 0.0, 1.0,
            -0.5);
        CHECK(std::abs(strong_C1(1.5) - direct) <= 1e-8);
    }

    TEST_CASE("H1 matches the closed forms") {
        for (double n : {1.0, 2.0}) {
            CAPTURE(n);
            const auto pred = strong_prediction(unit(n, 0.5), out_grid());
            REQUIRE(pred.H1);
            double err = 0.0;
            for (std::size_t i = 0; i < pred.H1->size(); ++i) {
                const double x = pred.H1->grid()[i];
                err = std::max(err, std::abs((*pred.H1)[i] - strong_H1_closed_form(n, x)));
            }
            CHECK(err <= 1e-8);
            CHECK(strong_H1_closed_form(1.0, 0.0) == doctest::Approx(1.0 / 120.0));
        }
    }

    TEST_CASE("H1 constraints and ODE residual") {
        for (double n : {1.0, 1.4, 2.0, 2.6}) {
            CAPTURE(n);
            const Grid1D g = Grid1D::uniform(0.0, 1.0, 2000);
            const auto pred = strong_prediction(unit(n, 0.5), g);
            const Profile& h1 = *pred.H1;
            const double dx = g.spacing(0);
            CHECK(std::abs(h1[h1.size() - 1]) <= 1e-8);
            CHECK(std::abs(h1.integral()) <= 1e-6);  // trapezoid on the nodes
            CHECK(std::abs((h1[1] - h1[0]) / dx) <= 1e-4);
            const double d2 = 2.0 * (h1[1] - h1[0]) / (dx * dx);
            CHECK(d2 == doctest::Approx(-*pred.C1).epsilon(1e-3));
            double num = 0.0;
            for (std::size_t i = 2; i + 2 < h1.size() - 200; ++i) {
                const double x = g[i];
                const double d3 = (h1[i + 2] - 2 * h1[i + 1] + 2 * h1[i - 1] - h1[i - 2]) / (2 * dx * dx * dx);
                const double w = std::pow(1.0 - x * x, n - 1.0);
                const double r = d3 - x * std::pow(1.0 - x * x, 1.0 - n);
                num += w * r * r * dx;
            }
            CHECK(std::sqrt(num) <= 1e-3);
        }
    }

    TEST_CASE("leading profile, exponents and constants") {
        const auto pred = strong_prediction(unit(1.0, 0.5), out_grid());
        CHECK(pred.regime == Regime::Strong);
        CHECK(pred.gamma == doctest::Approx(1.0 / 9.0));
        CHECK(pred.beta);
        CHECK(*pred.beta == doctest::Approx(1.0 - 5.0 / 9.0));
        CHECK(pred.H0(0.0) == doctest::Approx(1.5));
        CHECK(pred.H0(0.5) == doctest::Approx(1.5 * 0.75));
        const double g = pred.gamma;
        CHECK(pred.s0_prefactor == doctest::Approx(std::pow(3.0, (1 - g) / 2) * std::pow(g, -g)));
    }

    TEST_CASE("wrong regime") {
        CHECK(kind_of([] { strong_prediction(unit(1.0, 2.0), out_grid()); }) == ErrorKind::WrongRegime);
        CHECK(kind_of([] { weak_prediction(unit(1.0, 0.5), out_grid()); }) == ErrorKind::WrongRegime);
    }

    TEST_CASE("exponents over random parameters") {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> un(1.0, 2.9), uf(0.05, 0.95);
        for (int i = 0; i < 25; ++i) {
            const double n = un(rng);
            const double a = uf(rng) * critical_alpha(n);
            const auto pred = strong_prediction(unit(n, a), Grid1D::uniform(0, 1, 32));
            CHECK(pred.gamma == doctest::Approx(a / (a + 4.0)));
            CHECK(pred.gamma < 1.0 / (n + 4.0));
            CHECK(*pred.beta == doctest::Approx(1.0 - pred.gamma * (n + 4.0)));
            CHECK(*pred.beta > 0.0);
        }
    }
}

TEST_SUITE("weak") {
    TEST_CASE("n = 1 closed forms") {
        for (double a : {1.5, 2.0, 3.0}) {
            CAPTURE(a);
            const auto pred = weak_prediction(unit(1.0, a), out_grid());
            CHECK(pred.B0);
            CHECK(*pred.B0 * *pred.B0 == doctest::Approx(45.0).epsilon(1e-8));
            CHECK(pred.gamma == doctest::Approx(0.2));
            CHECK(pred.s0_prefactor == doctest::Approx(std::pow(225.0, 0.2)).epsilon(1e-8));
            CHECK(*pred.beta == doctest::Approx((4.0 * a - 4.0) / 10.0));
            REQUIRE(pred.H1);
            CHECK(*pred.C2 == doctest::Approx(15.0 * std::pow(45.0, a / 2.0)).epsilon(1e-6));
            const double c = std::pow(45.0, a / 2.0) / 8.0;
            double err = 0.0;
            for (std::size_t i = 0; i < pred.H1->size(); ++i) {
                const double x = pred.H1->grid()[i];
                err = std::max(err, std::abs((*pred.H1)[i] + c * (1 - x * x) * (1 - 5 * x * x)));
            }
            CHECK(err <= 1e-4 * c);
            CHECK(std::abs(pred.weak_parts->integral_H1) <= 1e-8 * c);
        }
    }

    TEST_CASE("n = 1.25 correction") {
        const auto pred = weak_prediction(unit(1.25, 2.0), out_grid());
        REQUIRE(pred.weak_parts);
        const auto& w = *pred.weak_parts;
        CHECK(std::abs(w.integral_H1) <= 1e-8);
        CHECK(w.coercivity_lhs > 0.0);
        CHECK(w.coercivity_rhs > 0.0);
        CHECK(w.coercivity_lhs == doctest::Approx(w.coercivity_rhs).epsilon(1e-3));
        // decomposition H1 = -(C2/n) f + g on the stored parts
        const double C2 = *pred.C2;
        double err = 0.0;
        for (std::size_t i = 0; i < pred.H1->size(); ++i) {
            const double x = pred.H1->grid()[i];
            err = std::max(err, std::abs((*pred.H1)[i] - (-(C2 / 1.25) * w.f(x) + w.g(x))));
        }
        CHECK(err <= 1e-6 * sup_norm(*pred.H1));
        CHECK(pred.H1->sup_norm() > 0.0);
    }

    TEST_CASE("resonant and non-integrable corrections") {
        CHECK(kind_of([] { weak_prediction(unit(1.5, 2.0), out_grid()); }) == ErrorKind::ResonantN);
        const auto lead = solve(2.0, 0.0);
        CHECK(kind_of([&] { weak_global_correction(2.0, 2.0, lead, correction_grid()); }) ==
              ErrorKind::NonIntegrableCorrection);
    }

    TEST_CASE("spreading exponent is continuous across the balanced value") {
        for (double n : {1.0, 2.0}) {
            const double ac = critical_alpha(n);
            const double below = strong_prediction(unit(n, ac * (1 - 1e-6)), Grid1D::uniform(0, 1, 8)).gamma;
            CHECK(below == doctest::Approx(1.0 / (n + 4.0)).epsilon(1e-5));
        }
    }
}

TEST_SUITE("inner") {
    TEST_CASE("n = 2 traveling wave") {
        const auto tw = inner_traveling_wave(2.0, 2.0, 1.0);
        CHECK(tw.profile[0] == doctest::Approx(0.0));
        CHECK(tw.slope[0] == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(std::abs(tw.curvature[tw.curvature.size() - 1]) <= 1e-6);
        // far-field slope of log F over the last decade
        const double x1 = tw.xi_max, x0 = tw.xi_max / 10.0;
        const double slope = std::log(tw(x1) / tw(x0)) / std::log(x1 / x0);
        CHECK(slope == doctest::Approx(1.5).epsilon(0.02));
        // near origin: (F - xi)/xi^2 + 1/2 log xi -> a_in
        for (double xi : {1e-6, 1e-5}) {
            const double r = (tw(xi) - xi) / (xi * xi) + 0.5 * std::log(xi);
            CHECK(r == doctest::Approx(tw.a_in).epsilon(1e-2));
        }
    }

    TEST_CASE("matching audit and composite") {
        const auto pred = weak_prediction(unit(2.0, 2.0), out_grid());
        REQUIRE(pred.inner);
        CHECK(!pred.H1);
        const auto a = matching_audit(pred, 1e6);
        CHECK(a.relative_error <= 1e-10);
        CHECK(a.contact_slope == doctest::Approx(a.predicted_slope).epsilon(1e-10));
        CHECK(*pred.beta == doctest::Approx(0.5));
        CHECK(matched_composite(pred, *pred.inner, 1e6, 0.0) == doctest::Approx(pred.H0(0.0)).epsilon(1e-8));
        CHECK(matched_composite(pred, *pred.inner, 1e6, 1.0) == 0.0);
        CHECK(kind_of([] {
                  const auto p = strong_prediction(unit(2.0, 0.5), out_grid());
                  matching_audit(p, 1.0);
              }) == ErrorKind::WrongRegime);
    }
}

TEST_SUITE("predict") {
    TEST_CASE("dispatch") {
        CHECK(predict(unit(1.0, 0.5), out_grid()).regime == Regime::Strong);
        CHECK(predict(unit(1.0, 2.0), out_grid()).regime == Regime::Weak);
        const auto b = predict(unit(1.0, 1.0), out_grid());
        CHECK(b.regime == Regime::Balanced);
        CHECK(!b.H1);
        CHECK(b.H0(0.0) == doctest::Approx(explicit_n1(1.0).profile[0]).epsilon(1e-8));
    }
}
