#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "hetnet/association.hpp"
#include "hetnet/errors.hpp"
#include "hetnet/montecarlo.hpp"
#include "hetnet/numerics.hpp"

using namespace hetnet;

namespace {

constexpr double kPi = std::numbers::pi;

TierConfig make_tier(double power, double lambda, PathLossModel pl, double bias = 1.0,
                     RadialDensity density = Homogeneous{}) {
    TierConfig t;
    t.power = power;
    t.bias = bias;
    t.intensity = lambda;
    t.pathloss = std::move(pl);
    t.fading = NakagamiPower{5.0};
    t.density = std::move(density);
    return t;
}

NetworkScenario two_tier(double kappa, double alpha = 2.7) {
    return NetworkScenario({make_tier(10.0, 0.1, BoundedPowerLaw{alpha}), make_tier(1.0, 1.0, BoundedPowerLaw{alpha})},
                           0.0, 25.0, kappa);
}

double pdf_mass(const AssociationModel& m, std::size_t k) {
    return numerics::integrate_semi_infinite([&](double u) { return m.conditional_pdf(k, u); }, 0.0,
                                             m.breakpoints(k), {1e-10, 1e-15, 4000}, m.length_scale(k));
}

NetworkScenario random_scenario(std::mt19937& rng, bool homogeneous) {
    std::uniform_int_distribution<int> tiers(1, 4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<TierConfig> ts;
    const int k = tiers(rng);
    for (int i = 0; i < k; ++i) {
        PathLossModel pl = unit(rng) < 0.6 ? PathLossModel(BoundedPowerLaw{2.2 + 3.0 * unit(rng)})
                                           : PathLossModel(StretchedExponential{0.2 + unit(rng), 0.3 + 0.7 * unit(rng)});
        RadialDensity d = Homogeneous{};
        if (!homogeneous) {
            const double pick = unit(rng);
            if (pick < 0.3) {
                d = GuardZone{3.0 * unit(rng)};
            } else if (pick < 0.6) {
                const double a = 2.0 * unit(rng);
                d = AnnulusExcluded{a, a + 0.5 + 3.0 * unit(rng)};
            }
        }
        ts.push_back(make_tier(std::exp(4.0 * unit(rng) - 2.0), std::exp(3.0 * unit(rng) - 2.0), pl,
                               std::exp(2.0 * unit(rng) - 1.0), d));
    }
    return NetworkScenario(ts);
}

}  // namespace

TEST_CASE("exclusion radius") {
    const NetworkScenario s = two_tier(1.0, 3.0);
    for (double r : {0.0, 0.3, 1.0, 4.0}) {
        CHECK(exclusion_radius(s, 0, 0, r) == r);
        CHECK(exclusion_radius(s, 1, 1, r) == r);
        // Macro tier serving at r: a pico station must be farther than G^-1(10 G(r)).
        const double target = 10.0 / (1.0 + r * r * r);
        const double expected = target >= 1.0 ? 0.0 : std::cbrt(1.0 / target - 1.0);
        CHECK(exclusion_radius(s, 0, 1, r) == doctest::Approx(expected).epsilon(1e-12));
        const double q = std::cbrt(1.0 / (0.1 / (1.0 + r * r * r)) - 1.0);
        CHECK(exclusion_radius(s, 1, 0, r) == doctest::Approx(q).epsilon(1e-12));
    }
    const AssociationModel m(s);
    const ExclusionProfile p = m.exclusion_profile(1, 0.5);
    CHECK(p.d[1] == 0.5);
    CHECK(p.d[0] == doctest::Approx(exclusion_radius(s, 1, 0, 0.5)));
}

TEST_CASE("single tier reduces to the nearest-distance law") {
    const NetworkScenario s({make_tier(1.0, 0.7, BoundedPowerLaw{3.0})});
    const AssociationModel m(s);
    CHECK(m.probability(0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double u : {0.05, 0.5, 1.0, 2.0}) {
        CHECK(m.conditional_pdf(0, u) ==
              doctest::Approx(2.0 * kPi * 0.7 * u * std::exp(-kPi * 0.7 * u * u)).epsilon(1e-10));
    }
}

TEST_CASE("identical tiers split evenly") {
    const TierConfig t = make_tier(2.0, 0.5, BoundedPowerLaw{3.5});
    const AssociationModel m(NetworkScenario({t, t, t}));
    for (std::size_t k = 0; k < 3; ++k) CHECK(m.probability(k) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("probabilities sum to one and densities normalize") {
    std::mt19937 rng(77);
    for (int i = 0; i < 30; ++i) {
        const bool homogeneous = i % 2 == 0;
        const AssociationModel m(random_scenario(rng, homogeneous));
        double sum = 0.0;
        for (std::size_t k = 0; k < m.size(); ++k) {
            sum += m.probability(k);
            if (m.probability(k) < 1e-9) continue;
            CHECK(pdf_mass(m, k) == doctest::Approx(1.0).epsilon(1e-6));
            for (double u = 0.0; u < 10.0; u += 0.37) CHECK(m.conditional_pdf(k, u) >= 0.0);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("two-tier densities normalize across kappa") {
    for (double kappa : {1.0, 10.0}) {
        const AssociationModel m(two_tier(kappa));
        for (std::size_t k = 0; k < 2; ++k) CHECK(pdf_mass(m, k) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("two-tier closed forms match the general path") {
    for (double kappa : {1.0, 10.0}) {
        for (double alpha : {2.7, 3.3}) {
            const NetworkScenario s = two_tier(kappa, alpha);
            const AssociationModel m(s);
            // The pico tier has the weaker peak, so the macro density switches form at u*.
            const double u_star = std::pow(10.0 - 1.0, 1.0 / alpha);
            std::vector<double> us{u_star * (1.0 - 1e-9), u_star, u_star * (1.0 + 1e-9)};
            for (double u = 0.01; u < 8.0; u += 0.0731) us.push_back(u);
            for (std::size_t k = 0; k < 2; ++k) {
                for (double u : us) {
                    const double general = m.conditional_pdf(k, u);
                    const double closed = two_tier_conditional_pdf(s, k, u, m.probability(k));
                    CHECK(std::abs(general - closed) <= 1e-9 * std::max(1.0, std::abs(closed)));
                }
            }
            // Independent check of the pico density from the exclusion radius.
            const double l1 = 0.1 * kappa;
            const double l2 = kappa;
            for (double u : {0.2, 1.0, 3.0}) {
                const double g = 1.0 / (1.0 + std::pow(u, alpha));
                const double q = std::pow(1.0 / (0.1 * g) - 1.0, 1.0 / alpha);
                const double joint = 2.0 * kPi * l2 * u * std::exp(-kPi * (l2 * u * u + l1 * q * q));
                CHECK(m.joint_density(1, u) == doctest::Approx(joint).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("segmented and unsplit probabilities agree") {
    std::mt19937 rng(31);
    for (int i = 0; i < 20; ++i) {
        const AssociationModel m(random_scenario(rng, true));
        for (std::size_t k = 0; k < m.size(); ++k) {
            CHECK(std::abs(m.probability_segmented(k) - m.probability_unsplit(k)) <= 1e-8);
            for (double u = 0.05; u < 6.0; u += 0.45) {
                if (m.probability(k) < 1e-9) continue;
                CHECK(m.conditional_pdf_segmented(k, u) ==
                      doctest::Approx(m.conditional_pdf(k, u)).epsilon(1e-8));
            }
        }
        const AssociationModel::Segments seg = m.segments(0);
        CHECK(seg.radii.front() == 0.0);
        CHECK(std::isinf(seg.radii.back()));
    }
}

TEST_CASE("non-homogeneous scenarios reject the segment form") {
    const NetworkScenario s({make_tier(1.0, 1.0, BoundedPowerLaw{3.0}, 1.0, GuardZone{1.0}),
                             make_tier(1.0, 1.0, BoundedPowerLaw{3.0})});
    const AssociationModel m(s);
    CHECK_THROWS_AS(m.probability_segmented(0), NonHomogeneousDensity);
    CHECK(m.probability(0) + m.probability(1) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("association frequencies match the simulation") {
    const NetworkScenario s = two_tier(1.0);
    const AssociationModel m(s);
    SimulationPlan plan;
    plan.realizations = 100000;
    plan.seed = 12;
    const AssociationResult r = simulate_association(s, plan);
    for (std::size_t k = 0; k < 2; ++k) {
        const double p = m.probability(k);
        const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(r.realizations));
        CHECK(std::abs(r.frequency[k] - p) <= 3.0 * sigma);
    }
}

TEST_CASE("serving tier and distance histogram passes a chi-square test") {
    const NetworkScenario s = two_tier(1.0);
    const AssociationModel m(s);
    SimulationPlan plan;
    plan.realizations = 1000000;
    plan.seed = 13;
    const AssociationResult r = simulate_association(s, plan);
    // 20 equiprobable distance bins per tier, from the conditional CDF on a fine grid.
    const int bins = 20;
    double chi2 = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
        std::vector<double> grid{0.0};
        std::vector<double> cdf{0.0};
        for (double u = 0.002; u < 30.0; u *= 1.002) {
            cdf.push_back(cdf.back() + numerics::integrate([&](double t) { return m.conditional_pdf(k, t); },
                                                           grid.back(), u, m.breakpoints(k), {1e-10, 1e-15, 200}));
            grid.push_back(u);
        }
        std::vector<double> count(bins, 0.0);
        for (double d : r.distances[k]) {
            const auto it = std::upper_bound(grid.begin(), grid.end(), d);
            const std::size_t j = static_cast<std::size_t>(it - grid.begin());
            double f = 1.0;
            if (j < grid.size()) f = cdf[j - 1] + (cdf[j] - cdf[j - 1]) * (d - grid[j - 1]) / (grid[j] - grid[j - 1]);
            count[std::min(bins - 1, static_cast<int>(f * bins))] += 1.0;
        }
        const double expected = m.probability(k) * static_cast<double>(r.realizations) / bins;
        for (double c : count) chi2 += (c - expected) * (c - expected) / expected;
    }
    // 99th percentile of chi-square with 39 degrees of freedom.
    CHECK(chi2 < 62.43);
}
