#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hetnet/numerics.hpp"
#include "hetnet/propagation.hpp"

namespace hetnet {

/// mu(t) = 2 pi t.
struct Homogeneous {};

/// mu(t) = 2 pi t for t >= a, zero inside the guard radius.
struct GuardZone {
    double a = 0.0;
};

/// mu(t) = 2 pi t outside the annulus [a, b].
struct AnnulusExcluded {
    double a = 0.0;
    double b = 0.0;
};

/// Piecewise-linear mu on nodes starting at t = 0, continued as
/// mu_last * t / t_last beyond the table.
struct CustomDensity {
    std::vector<double> t;
    std::vector<double> mu;
};

class RadialDensity {
public:
    using Variant = std::variant<Homogeneous, GuardZone, AnnulusExcluded, CustomDensity>;

    RadialDensity(Variant v = Homogeneous{});  // NOLINT(google-explicit-constructor)
    RadialDensity(Homogeneous d) : RadialDensity(Variant{d}) {}  // NOLINT
    RadialDensity(GuardZone d) : RadialDensity(Variant{d}) {}  // NOLINT
    RadialDensity(AnnulusExcluded d) : RadialDensity(Variant{d}) {}  // NOLINT
    RadialDensity(CustomDensity d) : RadialDensity(Variant{std::move(d)}) {}  // NOLINT

    double operator()(double t) const;
    /// Integral of mu over [0, r].
    double cumulative(double r) const;
    /// Smallest r with cumulative(r) = m.
    double cumulative_inverse(double m) const;
    std::vector<double> breakpoints() const;
    bool is_homogeneous() const { return std::holds_alternative<Homogeneous>(v_); }
    const Variant& variant() const { return v_; }
    std::string describe() const;

private:
    Variant v_;
    std::vector<double> cum_;  // cumulative at CustomDensity nodes
};

struct TierConfig {
    double power = 1.0;
    double bias = 1.0;
    double intensity = 1.0;
    /// Whether the scenario-wide kappa multiplies this tier's intensity.
    bool scales_with_kappa = true;
    PathLossModel pathloss = BoundedPowerLaw{4.0};
    FadingModel fading = RayleighPower{};
    RadialDensity density = Homogeneous{};
};

class NetworkScenario {
public:
    NetworkScenario(std::vector<TierConfig> tiers, double noise = 0.0, double processing_gain = 1.0,
                    double kappa = 1.0);

    std::size_t size() const { return effective_.size(); }
    /// Tier with kappa already applied to its intensity.
    const TierConfig& tier(std::size_t k) const { return effective_.at(k); }
    const std::vector<TierConfig>& tiers() const { return effective_; }
    const std::vector<TierConfig>& base_tiers() const { return base_; }
    double noise() const { return noise_; }
    double processing_gain() const { return processing_gain_; }
    double kappa() const { return kappa_; }
    bool all_homogeneous() const;

    NetworkScenario with_kappa(double kappa) const;
    /// Multiplies every tier's intensity by c, regardless of kappa scaling.
    NetworkScenario with_intensities_scaled(double c) const;

private:
    std::vector<TierConfig> base_;
    std::vector<TierConfig> effective_;
    double noise_;
    double processing_gain_;
    double kappa_;
};

/// Expected number of tier stations within distance r.
double mean_measure(const TierConfig& tier, double r);

/// Density of the nearest tier station's distance.
double nearest_distance_pdf(const TierConfig& tier, double u);

/// Integral of G(t)^n mu(t) over [lower, inf).
double radial_integral(const TierConfig& tier, int n, double lower,
                       const numerics::QuadratureSpec& spec = {1e-12, 1e-300, 4000});

/// Smallest window radius whose truncated mean interference is at most
/// `relative` of the full mean.
double truncated_mean_window(const TierConfig& tier, double relative = 1e-4);

/// Distances of one Poisson draw of the tier's stations inside [0, r_max].
template <class URBG>
std::vector<double> sample_distances(const TierConfig& tier, double r_max, URBG& rng) {
    const double total = tier.density.cumulative(r_max);
    std::vector<double> out;
    if (!(total > 0.0)) return out;
    std::poisson_distribution<long long> count(tier.intensity * total);
    const long long n = count(rng);
    out.reserve(static_cast<std::size_t>(n));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (long long i = 0; i < n; ++i) {
        out.push_back(std::min(r_max, tier.density.cumulative_inverse(unif(rng) * total)));
    }
    return out;
}

}  // namespace hetnet
