#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "hetnet/capacity.hpp"
#include "hetnet/errors.hpp"
#include "hetnet/montecarlo.hpp"
#include "hetnet/numerics.hpp"

using namespace hetnet;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TierConfig make_tier(double power, double lambda, PathLossModel pl, FadingModel fading = NakagamiPower{5.0},
                     RadialDensity density = Homogeneous{}) {
    TierConfig t;
    t.power = power;
    t.intensity = lambda;
    t.pathloss = std::move(pl);
    t.fading = std::move(fading);
    t.density = std::move(density);
    return t;
}

NetworkScenario two_tier(double kappa, double alpha, double pg = 25.0) {
    return NetworkScenario({make_tier(10.0, 0.1, BoundedPowerLaw{alpha}), make_tier(1.0, 1.0, BoundedPowerLaw{alpha})},
                           0.0, pg, kappa);
}

NetworkScenario single_tier(double lambda, double noise = 0.0, FadingModel fading = NakagamiPower{5.0}) {
    return NetworkScenario({make_tier(1.0, lambda, BoundedPowerLaw{4.0}, fading)}, noise, 25.0);
}

}  // namespace

TEST_CASE("zeta and band kernels") {
    const NetworkScenario s = NetworkScenario({make_tier(2.0, 1.0, BoundedPowerLaw{3.0})}, 0.1, 4.0);
    const GaussianSummary g{3.0, 4.0, 0.05};
    const double h = 1.3;
    const double tau = 0.8;
    const double r = 0.7;
    const double gain = 1.0 / (1.0 + r * r * r);
    const double theta = std::exp(tau) - 1.0;
    const double expected = (2.0 * (h * gain / theta - 0.1 / 2.0) * 4.0 - 3.0) / 2.0;
    CHECK(zeta(s, g, 0, h, tau, r) == doctest::Approx(expected).epsilon(1e-13));

    const VPair v = v_kernels(s, g, 0, h, tau, r);
    const double psi = numerics::std_normal_cdf(expected);
    const double w = 0.05 * berry_esseen_c(expected);
    CHECK(v.minus == doctest::Approx(std::max(0.0, psi - w)).epsilon(1e-14));
    CHECK(v.plus == doctest::Approx(std::min(1.0, psi + w)).epsilon(1e-14));

    const VPair zero = v_kernels(s, g, 0, h, 0.0, r);
    CHECK(zero.minus == 1.0);
    CHECK(zero.plus == 1.0);
    // Below the noise threshold the link fails regardless of interference.
    const double h_min = 0.1 * theta / (2.0 * gain);
    const VPair below = v_kernels(s, g, 0, 0.99 * h_min, tau, r);
    CHECK(below.minus == 0.0);
    CHECK(below.plus == 0.0);
    const VPair quiet = v_kernels(s, {0.0, 0.0, 0.0}, 0, 1.01 * h_min, tau, r);
    CHECK(quiet.minus == 1.0);
    CHECK(quiet.plus == 1.0);
}

TEST_CASE("zero rate never fails") {
    const CapacityEngine e(two_tier(1.0, 3.3));
    const OutageBounds b = e.outage_barss(0.0);
    CHECK(b.lower == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(b.upper == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("deterministic fading below the noise threshold") {
    const NetworkScenario s = single_tier(1.0, 0.5, DeterministicGain{1.0});
    const CapacityEngine e(s);
    const double r = 1.0;
    const double snr = 1.0 * 0.5 / 0.5;  // P h G(1) / N0
    const double tau_max = std::log1p(snr);
    const ExclusionProfile excl{{r}};
    const OutageBounds above = e.outage_generic(0, r, tau_max * 1.01, excl);
    CHECK(above.lower == 1.0);
    CHECK(above.upper == 1.0);
    const OutageBounds below = e.outage_generic(0, r, tau_max * 0.5, excl);
    CHECK(below.lower < 1.0);
}

TEST_CASE("interference-free links are exact") {
    const ExclusionProfile none{{kInf}};
    const NetworkScenario s = single_tier(1.0, 0.05, DeterministicGain{1.5});
    const CapacityEngine e(s);
    const double r = 0.8;
    const double snr = 1.5 / (1.0 + std::pow(r, 4.0)) / 0.05;
    const CapacityBand c = e.ergodic_capacity(GenericPolicy{0, r, none});
    CHECK(c.lower == doctest::Approx(std::log1p(snr)).epsilon(1e-6));
    CHECK(c.upper == doctest::Approx(std::log1p(snr)).epsilon(1e-6));
    for (double tau : {0.1, 0.5, 1.0, 2.0}) {
        const OutageBounds b = e.outage_generic(0, r, tau, none);
        CHECK(b.lower == b.upper);
    }
}

TEST_CASE("single-tier biased association equals the generic link averaged over the nearest distance") {
    const NetworkScenario s = single_tier(0.5);
    const CapacityEngine e(s);
    const TierConfig& t = s.tier(0);
    for (double tau : {0.3, 1.0}) {
        const auto avg = [&](bool upper) {
            return numerics::integrate_semi_infinite(
                [&](double r) {
                    const OutageBounds b = e.outage_generic(0, r, tau, ExclusionProfile{{r}});
                    return nearest_distance_pdf(t, r) * (upper ? b.upper : b.lower);
                },
                0.0, {1e-7, 1e-11, 2000}, 1.0);
        };
        const OutageBounds b = e.outage_barss(tau);
        CHECK(std::abs(b.lower - avg(false)) <= 1e-8);
        CHECK(std::abs(b.upper - avg(true)) <= 1e-8);
    }
}

TEST_CASE("fixed distance rule matches adaptive averaging") {
    const NetworkScenario s = two_tier(2.0, 2.7);
    const CapacityEngine fixed(s);
    CapacityOptions opt;
    opt.fixed_distance_rule = false;
    const CapacityEngine adaptive(s, opt);
    for (double tau : {0.25, 0.75}) {
        const OutageBounds a = fixed.outage_barss(tau);
        const OutageBounds b = adaptive.outage_barss(tau);
        CHECK(std::abs(a.lower - b.lower) <= 1e-8);
        CHECK(std::abs(a.upper - b.upper) <= 1e-8);
    }
    double total = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
        for (double w : fixed.distance_rule(k).weights) total += w;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("outage bounds are ordered and nondecreasing in the rate") {
    const CapacityEngine e(two_tier(3.0, 3.3));
    const AssociationModel& assoc = e.association();
    OutageBounds prev{0.0, 0.0};
    for (double tau = 0.05; tau <= 3.0; tau += 0.05) {
        const OutageBounds b = e.outage_barss(tau);
        CHECK(b.lower >= 0.0);
        CHECK(b.upper <= 1.0);
        CHECK(b.lower <= b.upper);
        CHECK(b.lower >= prev.lower);
        CHECK(b.upper >= prev.upper);
        prev = b;
        if (std::abs(tau - 1.0) < 1e-9) {
            // Total probability over serving tiers.
            double lo = 0.0;
            double hi = 0.0;
            for (std::size_t k = 0; k < 2; ++k) {
                const OutageBounds c = e.outage_conditional(k, tau);
                lo += assoc.probability(k) * c.lower;
                hi += assoc.probability(k) * c.upper;
            }
            CHECK(lo == doctest::Approx(b.lower).epsilon(1e-9));
            CHECK(hi == doctest::Approx(b.upper).epsilon(1e-9));
        }
    }
}

TEST_CASE("more processing gain never raises outage") {
    for (double tau : {0.25, 0.75, 1.5}) {
        OutageBounds prev{1.0, 1.0};
        for (double pg : {1.0, 5.0, 25.0, 100.0}) {
            const OutageBounds b = CapacityEngine(two_tier(1.0, 2.7, pg)).outage_barss(tau);
            CHECK(b.lower <= prev.lower + 1e-12);
            CHECK(b.upper <= prev.upper + 1e-12);
            prev = b;
        }
    }
}

TEST_CASE("outage capacity matches a dense rate scan") {
    const double gamma = 0.15;
    const CapacityEngine e(two_tier(1.0, 3.3));
    const CapacityBand band = e.outage_capacity(gamma, BarssPolicy{});
    CHECK(band.lower <= band.heuristic);
    CHECK(band.heuristic <= band.upper);
    // Scan both bound curves on a 0.002 grid around each edge.
    const double step = 0.002;
    for (const bool upper_edge : {false, true}) {
        const double edge = upper_edge ? band.upper : band.lower;
        double last_ok = 0.0;
        for (double tau = edge - 0.02; tau <= edge + 0.02; tau += step) {
            const OutageBounds b = e.outage_barss(tau);
            if ((upper_edge ? b.lower : b.upper) <= gamma) last_ok = tau;
        }
        CHECK(std::abs(last_ok - edge) <= step);
    }
}

TEST_CASE("generic link outage brackets the simulation") {
    const NetworkScenario s = two_tier(2.0, 3.3);
    const CapacityEngine e(s);
    const ExclusionProfile excl{{1.5, 0.4}};
    SimulationPlan plan;
    plan.realizations = 100000;
    plan.seed = 5;
    const std::vector<double> rates = simulate_link_rates(s, plan, 1, 0.4, excl);
    for (double tau : {0.25, 0.5, 1.0, 1.5, 2.0}) {
        const OutageBounds b = e.outage_generic(1, 0.4, tau, excl);
        const double p = empirical_outage(rates, tau);
        const double slack = 3.0 * std::sqrt(std::max(p * (1.0 - p), 1e-6) / static_cast<double>(rates.size()));
        CHECK(p >= b.lower - slack);
        CHECK(p <= b.upper + slack);
    }
}

TEST_CASE("ergodic band contains the generic-link simulation") {
    const NetworkScenario s = two_tier(5.0, 3.0);
    const CapacityEngine e(s);
    const ExclusionProfile excl{{2.0, 0.5}};
    const CapacityBand c = e.ergodic_capacity(GenericPolicy{1, 0.5, excl});
    SimulationPlan plan;
    plan.realizations = 50000;
    plan.seed = 6;
    const std::vector<double> rates = simulate_link_rates(s, plan, 1, 0.5, excl);
    double mean = 0.0;
    for (double r : rates) mean += r;
    mean /= static_cast<double>(rates.size());
    CHECK(c.lower <= c.upper);
    CHECK(mean >= c.lower);
    CHECK(mean <= c.upper);
}

TEST_CASE("single-tier area spectral efficiency") {
    const double lambda = 0.8;
    const double gamma = 0.15;
    const CapacityEngine e(single_tier(lambda));
    const CapacityBand ase = e.ase({gamma});
    const CapacityBand co = e.outage_capacity(gamma, BarssPolicy{});
    CHECK(ase.lower == doctest::Approx(lambda * (1.0 - gamma) * co.lower).epsilon(1e-9));
    CHECK(ase.upper == doctest::Approx(lambda * (1.0 - gamma) * co.upper).epsilon(1e-9));
    CHECK_THROWS_AS(e.ase({gamma, gamma}), ConfigError);
    CHECK_THROWS_AS(e.outage_capacity(1.5, BarssPolicy{}), ConfigError);

    const NetworkScenario guard({make_tier(1.0, 1.0, BoundedPowerLaw{4.0}, NakagamiPower{5.0}, GuardZone{1.0})});
    CHECK_THROWS_AS(CapacityEngine(guard).ase({gamma}), NonHomogeneousDensity);
}
