#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "tfe/banded.hpp"
#include "tfe/errors.hpp"
#include "tfe/grid.hpp"
#include "tfe/params.hpp"
#include "tfe/quadrature.hpp"

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

/// Gaussian elimination with partial pivoting on a dense copy.
std::vector<double> dense_oracle(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
        }
        std::swap(a[k], a[p]);
        std::swap(b[k], b[p]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= m * a[k][j];
            b[i] -= m * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

ProblemParams physical(double n, double alpha, double d, double mass) {
    ProblemParams p;
    p.n = n;
    p.alpha = alpha;
    p.friction = PhysicalFriction{d};
    p.mass = mass;
    return p;
}

}  // namespace

TEST_SUITE("params") {
    TEST_CASE("regime classification is total with the balanced band") {
        std::mt19937_64 rng(12345);
        std::uniform_real_distribution<double> un(1.0, 3.0), ua(1e-3, 4.0);
        for (int i = 0; i < 1000000; ++i) {
            const double n = un(rng), a = ua(rng);
            const Regime r = classify(n, a);
            const double gap = a * (n + 3.0) - 4.0;
            if (std::abs(gap) < kBalancedTolerance) REQUIRE(r == Regime::Balanced);
            else if (gap < 0.0) REQUIRE(r == Regime::Strong);
            else REQUIRE(r == Regime::Weak);
        }
        CHECK(classify(1.0, 1.0) == Regime::Balanced);
        CHECK(classify(2.0, 4.0 / 5.0) == Regime::Balanced);
        CHECK(classify(1.0, 0.5) == Regime::Strong);
        CHECK(classify(1.0, 2.0) == Regime::Weak);
    }

    TEST_CASE("validation names the broken invariant") {
        ProblemParams p;
        p.n = 3.5;
        try {
            p.validate();
            FAIL("n = 3.5 accepted");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ValidationError);
            CHECK(std::string(e.what()) == "n out of [1,3)");
        }
        p.n = 1.0;
        p.alpha = 0.0;
        CHECK(kind_of([&] { p.validate(); }) == ErrorKind::ValidationError);
        p.alpha = 1.0;
        p.mass = -1.0;
        CHECK(kind_of([&] { p.validate(); }) == ErrorKind::ValidationError);
        p.mass = 2.0;
        p.friction = NormalizedFriction{-1.0};
        CHECK(kind_of([&] { p.validate(); }) == ErrorKind::ValidationError);
        p.friction = PhysicalFriction{0.0};
        CHECK(kind_of([&] { p.validate(); }) == ErrorKind::ValidationError);
    }

    TEST_CASE("normalize rejects the balanced exponent") {
        CHECK(kind_of([] { normalize(physical(1.0, 1.0, 1.0, 2.0)); }) == ErrorKind::BalancedRegime);
        CHECK(kind_of([] { normalize(physical(1.0, 1.0, 16.0, 2.0)); }) == ErrorKind::BalancedRegime);
    }

    TEST_CASE("normalize at n = 1, alpha = 1/2, d = 2") {
        const auto [p, sf] = normalize(physical(1.0, 0.5, 2.0, 2.0));
        CHECK(p.D() == 1.0);
        CHECK(p.mass == 2.0);
        CHECK(sf.h_star == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
        CHECK(sf.y_star == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
        CHECK(sf.t_star == doctest::Approx(std::pow(2.0, -2.5)).epsilon(1e-14));
    }

    TEST_CASE("scaling factors satisfy their relations and invert") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> un(1.0, 2.9), ua(0.1, 2.0), ud(0.1, 10.0), um(0.5, 5.0);
        for (int i = 0; i < 2000; ++i) {
            const ProblemParams phys = physical(un(rng), ua(rng), ud(rng), um(rng));
            if (std::abs(4.0 - phys.alpha * (phys.n + 3.0)) < 0.5) continue;
            const auto [p, sf] = normalize(phys);
            const double n = phys.n, a = phys.alpha, d = std::get<PhysicalFriction>(phys.friction).d;
            CHECK(sf.t_star == doctest::Approx(std::pow(sf.y_star, 4.0) * std::pow(sf.h_star, -n)).epsilon(1e-12));
            CHECK(2.0 * sf.h_star * sf.y_star == doctest::Approx(phys.mass).epsilon(1e-12));
            CHECK(std::pow(sf.h_star, 4.0 - a * (n + 3.0)) ==
                  doctest::Approx(d * std::pow(0.5 * phys.mass, 2.0 - 3.0 * a)).epsilon(1e-10));
            const ProblemParams back = rescale_back(p, sf);
            CHECK(back.mass == doctest::Approx(phys.mass).epsilon(1e-12));
            CHECK(std::get<PhysicalFriction>(back.friction).d == doctest::Approx(d).epsilon(1e-12));
        }
    }
}

TEST_SUITE("grid") {
    TEST_CASE("grids are strictly increasing and hit both ends") {
        for (const Grid1D& g : {Grid1D::uniform(0, 1, 10), Grid1D::graded(0, 1, 400, 0.99),
                                Grid1D::graded(-2, 3, 50, 1.05), Grid1D::symmetric_graded(-1, 1, 200, 0.8)}) {
            REQUIRE(g.size() >= 2);
            for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
        }
        const Grid1D g = Grid1D::graded(0, 1, 400, 0.99);
        CHECK(g.front() == 0.0);
        CHECK(g.back() == 1.0);
        CHECK(g.spacing(399) < g.spacing(0));
    }

    TEST_CASE("symmetric grading is symmetric") {
        const Grid1D g = Grid1D::symmetric_graded(-1, 1, 200, 0.8);
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == doctest::Approx(-g[g.size() - 1 - i]).epsilon(1e-15));
    }

    TEST_CASE("profiles interpolate linearly and integrate exactly") {
        const Grid1D g = Grid1D::graded(0, 1, 100, 0.97);
        std::vector<double> v;
        for (double x : g.nodes()) v.push_back(3.0 * x - 1.0);
        const Profile p(g, v);
        CHECK(p(0.123456) == doctest::Approx(3.0 * 0.123456 - 1.0).epsilon(1e-14));
        CHECK(p.integral() == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(integrate(p, 0.25, 0.75) == doctest::Approx(0.25).epsilon(1e-13));
        CHECK(kind_of([] { Grid1D({0.0, 0.5, 0.5, 1.0}); }) == ErrorKind::InvalidArgument);
    }
}

TEST_SUITE("quadrature") {
    TEST_CASE("smooth integrands") {
        CHECK(integrate([](double x) { return x; }, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) ==
              doctest::Approx(2.0).epsilon(1e-12));
        const double c1 = integrate([](double x) { return 0.5 * x * (x * x * x - 3.0 * x + 2.0); }, 0.0, 1.0);
        CHECK(std::abs(c1 - 0.1) < 1e-12);
    }

    TEST_CASE("endpoint-singular integrands") {
        // 1/2 x (x^3 - 3x + 2) / (1 - x^2) = 1/2 x (1-x)(x+2)/(1+x), integral 5/6 - log 2
        const double exact = 5.0 / 6.0 - std::log(2.0);
        const double weighted = integrate_weighted(
            [](double x) { return 0.5 * x * (x + 2.0) * (1.0 - x) / (1.0 + x); }, 0.0, 0.0, 1.0);
        CHECK(std::abs(weighted - exact) < 1e-12);
        // (1-x)^(-1/2): integral 2
        const double root = integrate_weighted([](double) { return 1.0; }, -0.5, 0.0, 1.0);
        CHECK(std::abs(root - 2.0) < 1e-10);
        const double singular = integrate([](double x) { return std::pow(1.0 - x, -0.5); }, 0.0, 1.0, -0.5);
        CHECK(std::abs(singular - 2.0) < 1e-10);
        CHECK(kind_of([] { integrate([](double) { return 1.0; }, 0.0, 1.0, -1.0); }) == ErrorKind::NonIntegrable);
    }

    TEST_CASE("integration is linear and monotone") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int i = 0; i < 50; ++i) {
            const double a = u(rng), b = u(rng), c = u(rng);
            auto f = [=](double x) { return a * std::cos(b * x) + c * x * x; };
            auto g = [=](double x) { return std::exp(a * x) * (1.0 - x); };
            const double lhs = integrate([&](double x) { return f(x) + g(x); }, 0.0, 1.0);
            CHECK(lhs == doctest::Approx(integrate(f, 0.0, 1.0) + integrate(g, 0.0, 1.0)).epsilon(1e-12));
            CHECK(integrate([&](double x) { return std::abs(f(x)); }, 0.0, 1.0) >= 0.0);
        }
    }
}

TEST_SUITE("banded") {
    TEST_CASE("identity") {
        BandedMatrix a(3, 1, 1);
        for (std::size_t i = 0; i < 3; ++i) a.at(i, i) = 1.0;
        const std::vector<double> rhs{1, 2, 3};
        const auto x = solve_banded(a, rhs);
        CHECK(x == rhs);
    }

    TEST_CASE("second difference of a quadratic is reproduced exactly") {
        const std::size_t n = 41;
        const double h = 1.0 / static_cast<double>(n - 1);
        BandedMatrix a(n, 1, 1);
        std::vector<double> rhs(n), exact(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = static_cast<double>(i) * h;
            exact[i] = x * (1.0 - x);
            if (i == 0 || i == n - 1) {
                a.at(i, i) = 1.0;
                rhs[i] = 0.0;
            } else {
                a.at(i, i - 1) = 1.0 / (h * h);
                a.at(i, i) = -2.0 / (h * h);
                a.at(i, i + 1) = 1.0 / (h * h);
                rhs[i] = -2.0;
            }
        }
        const auto x = solve_banded(a, rhs);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(x[i] - exact[i]) < 1e-12);
    }

    TEST_CASE("random banded systems agree with dense elimination") {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (std::size_t bw : {1u, 3u, 5u}) {
            const std::size_t n = 50;
            BandedMatrix a(n, bw, bw);
            std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = (i > bw ? i - bw : 0); j <= std::min(n - 1, i + bw); ++j) {
                    const double v = u(rng) + (i == j ? 4.0 : 0.0);
                    a.at(i, j) = v;
                    dense[i][j] = v;
                }
            }
            std::vector<double> rhs(n);
            for (auto& r : rhs) r = u(rng);
            const auto x = solve_banded(a, rhs);
            const auto ref = dense_oracle(dense, rhs);
            double rhs_norm = 0.0, res = 0.0;
            const auto ax = a.multiply(x);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(std::abs(x[i] - ref[i]) < 1e-10);
                rhs_norm = std::max(rhs_norm, std::abs(rhs[i]));
                res = std::max(res, std::abs(ax[i] - rhs[i]));
            }
            CHECK(res <= 1e-10 * rhs_norm);
        }
    }

    TEST_CASE("badly scaled rows are not mistaken for singular") {
        BandedMatrix a(3, 1, 1);
        a.at(0, 0) = 1e-20;
        a.at(0, 1) = 1e-20;
        a.at(1, 0) = 1.0;
        a.at(1, 1) = 3.0;
        a.at(1, 2) = 1.0;
        a.at(2, 1) = 1e8;
        a.at(2, 2) = 2e8;
        const std::vector<double> rhs{2e-20, 5.0, 3e8};
        const auto x = solve_banded(a, rhs);
        for (double v : x) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("singular systems are reported") {
        BandedMatrix a(3, 1, 1);
        a.at(0, 0) = 1.0;
        a.at(0, 1) = 1.0;
        a.at(1, 0) = 1.0;
        a.at(1, 1) = 1.0;
        a.at(2, 2) = 1.0;
        const std::vector<double> rhs{1, 1, 1};
        CHECK(kind_of([&] { solve_banded(a, rhs); }) == ErrorKind::Singular);
        CHECK(kind_of([&] { solve_dense({1, 2, 2, 4}, 2, std::vector<double>{1, 2}); }) == ErrorKind::Singular);
        CHECK(kind_of([] { BandedMatrix(3, 1, 1).at(0, 2) = 1.0; }) == ErrorKind::InvalidArgument);
    }
}
