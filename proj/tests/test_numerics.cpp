#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "hetnet/errors.hpp"
#include "hetnet/numerics.hpp"

using namespace hetnet;
using namespace hetnet::numerics;

namespace {

// Midpoint-rule oracle on [a, b] with n cells, independent of the adaptive code.
template <class F>
double midpoint(F&& f, double a, double b, long n) {
    const double h = (b - a) / static_cast<double>(n);
    double s = 0.0;
    for (long i = 0; i < n; ++i) s += f(a + (static_cast<double>(i) + 0.5) * h);
    return s * h;
}

}  // namespace

TEST_CASE("normal cdf") {
    CHECK(std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    // 1.959963985 is the 97.5% quantile to 10 digits.
    CHECK(std_normal_cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-9));
    // Values from the series erf(x) = 2/sqrt(pi) sum (-1)^n x^(2n+1) / (n! (2n+1)).
    for (double x : {0.3, 1.0, 2.5}) {
        const double z = x / std::numbers::sqrt2;
        double term = z;
        double sum = z;
        for (int n = 1; n < 80; ++n) {
            term *= -z * z / n;
            sum += term / (2 * n + 1);
        }
        const double series = 0.5 * (1.0 + 2.0 / std::sqrt(std::numbers::pi) * sum);
        CHECK(std_normal_cdf(x) == doctest::Approx(series).epsilon(1e-12));
    }
    for (double x = -8.0; x <= 8.0; x += 0.37) {
        CHECK(std_normal_cdf(-x) + std_normal_cdf(x) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("semi-infinite quadrature examples") {
    CHECK(integrate_semi_infinite([](double t) { return std::exp(-t); }, 0.0) ==
          doctest::Approx(1.0).epsilon(1e-8));

    const auto quartic = [](double t) { return t / std::pow(1.0 + t * t * t * t, 2); };
    const double value = integrate_semi_infinite(quartic, 0.0);
    CHECK(value == doctest::Approx(std::numbers::pi / 8.0).epsilon(1e-8));
    // Riemann oracle over [0, 60]; the tail beyond adds below 1e-13.
    CHECK(value == doctest::Approx(midpoint(quartic, 0.0, 60.0, 2000000)).epsilon(1e-7));

    CHECK(integrate_semi_infinite([](double t) { return t * std::exp(-t * t); }, 2.0) ==
          doctest::Approx(std::exp(-4.0) / 2.0).epsilon(1e-8));
}

TEST_CASE("slow power-law tails converge") {
    // t^-1.7 tail: integral of 1/(1+t)^1.7 over [0, inf) = 1/0.7.
    const double v = integrate_semi_infinite([](double t) { return std::pow(1.0 + t, -1.7); }, 0.0);
    CHECK(v == doctest::Approx(1.0 / 0.7).epsilon(1e-8));
}

TEST_CASE("divergent tails are rejected") {
    CHECK_THROWS_AS(integrate_semi_infinite([](double t) { return 1.0 / (1.0 + t); }, 0.0), NonConvergent);
    CHECK_THROWS_AS(integrate_semi_infinite([](double) { return 1.0; }, 0.0), NonConvergent);
}

TEST_CASE("subdivision budget exhaustion raises NonConvergent") {
    QuadratureSpec spec{1e-14, 0.0, 3};
    CHECK_THROWS_AS(integrate([](double t) { return std::sqrt(std::abs(std::sin(40.0 * t))); }, 0.0, 10.0, spec),
                    NonConvergent);
}

TEST_CASE("quadrature is linear") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    const auto f = [](double t) { return std::exp(-0.5 * t) / (1.0 + t); };
    const auto h = [](double t) { return 1.0 / std::pow(1.0 + t * t, 1.5); };
    const double If = integrate_semi_infinite(f, 0.0);
    const double Ih = integrate_semi_infinite(h, 0.0);
    for (int i = 0; i < 20; ++i) {
        const double a = coef(rng);
        const double b = coef(rng);
        const double Iab = integrate_semi_infinite([&](double t) { return a * f(t) + b * h(t); }, 0.0);
        const double expected = a * If + b * Ih;
        CHECK(std::abs(Iab - expected) <= 10.0 * 1e-8 * (std::abs(a * If) + std::abs(b * Ih)));
    }
}

TEST_CASE("vector quadrature matches componentwise scalar runs") {
    const auto f = [](double t) { return Vec<2>{std::exp(-t), 1.0 / std::pow(1.0 + t, 3.0)}; };
    const double bp[] = {1.0, 2.5};
    const Vec<2> v = integrate_semi_infinite_vec<2>(f, 0.0, bp);
    CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(v[1] == doctest::Approx(0.5).epsilon(1e-8));
    const Vec<2> w = integrate_vec<2>(f, 0.0, 1.0, bp);
    CHECK(w[0] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-10));
    CHECK(w[1] == doctest::Approx(0.5 * (1.0 - 0.25)).epsilon(1e-10));
}

TEST_CASE("fixed rule reproduces the integral it was built for and nearby ones") {
    const auto density = [](double t) { return 2.0 * t * std::exp(-t * t); };
    const QuadratureRule rule = semi_infinite_rule(density, 0.0, {}, {1e-9, 1e-15, 2000}, 1.0, 2);
    double mass = 0.0;
    double mean = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        mass += rule.weights[j] * density(rule.nodes[j]);
        mean += rule.weights[j] * density(rule.nodes[j]) * rule.nodes[j];
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mean == doctest::Approx(std::sqrt(std::numbers::pi) / 2.0).epsilon(1e-8));
}

TEST_CASE("monotone inversion") {
    const auto cubic = [](double t) { return 1.0 / (1.0 + t * t * t); };
    CHECK(invert_monotone_decreasing(cubic, 1.0 / 9.0) == doctest::Approx(2.0).epsilon(1e-11));
    CHECK(invert_monotone_decreasing(cubic, 4.0) == 0.0);
    const auto stretched = [](double t) { return std::exp(-std::sqrt(t)); };
    CHECK(invert_monotone_decreasing(stretched, std::exp(-2.0)) == doctest::Approx(4.0).epsilon(1e-11));
}

TEST_CASE("inversion recovers y") {
    const auto g = [](double t) { return 1.0 / (1.0 + std::pow(t, 3.3)); };
    for (double y = 0.001; y < 1.0; y += 0.0371) {
        const double x = invert_monotone_decreasing(g, y);
        CHECK(std::abs(g(x) - y) <= 1e-10);
    }
}

TEST_CASE("sup threshold") {
    CHECK(sup_threshold([](double t) { return 1.0 - std::exp(-t); }, 0.5) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-6));
    CHECK(sup_threshold([](double) { return 1.0; }, 0.5) == 0.0);
    CHECK_THROWS_AS(sup_threshold([](double) { return 0.0; }, 0.5), Unbounded);

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> scale(0.05, 20.0);
    for (int i = 0; i < 50; ++i) {
        const double s = scale(rng);
        const auto g = [s](double t) { return 1.0 - std::exp(-t * t / s); };
        const double gamma = 0.15;
        const double t = sup_threshold(g, gamma);
        const double delta = 1e-5 * std::max(t, 1.0);
        CHECK(g(std::max(0.0, t - delta)) <= gamma);
        CHECK(g(t + delta) >= gamma);
    }
}
