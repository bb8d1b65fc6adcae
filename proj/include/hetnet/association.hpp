#pragma once

#include <cstddef>
#include <vector>

#include "hetnet/gaussian.hpp"
#include "hetnet/spatial.hpp"

namespace hetnet {

/// Distance inside which no tier-i station can lie when the user is served
/// by a tier-k station at distance r under biased average received power
/// association. Equals r for i == k, and 0 when tier i can never beat the
/// server.
double exclusion_radius(const NetworkScenario& scenario, std::size_t k, std::size_t i, double r);

/// Biased received-power association over a fixed scenario: per-tier
/// association probabilities and conditional serving-distance densities.
class AssociationModel {
public:
    explicit AssociationModel(NetworkScenario scenario);

    const NetworkScenario& scenario() const { return scenario_; }
    std::size_t size() const { return scenario_.size(); }

    double exclusion_radius(std::size_t k, std::size_t i, double r) const;
    ExclusionProfile exclusion_profile(std::size_t k, double r) const;

    /// Probability that tier k serves the user.
    double probability(std::size_t k) const { return p_star_.at(k); }
    const std::vector<double>& probabilities() const { return p_star_; }

    /// p_k times the conditional density of the serving distance at u.
    double joint_density(std::size_t k, double u) const;
    /// Density of the serving distance given that tier k serves.
    double conditional_pdf(std::size_t k, double u) const;

    /// Serving distances at which the integrand of tier k has kinks or jumps.
    const std::vector<double>& breakpoints(std::size_t k) const { return breakpoints_.at(k); }
    /// Typical serving distance of tier k, used to scale quadrature maps.
    double length_scale(std::size_t k) const { return scales_.at(k); }

    /// Association probability from the segment decomposition over the
    /// activation radii of the other tiers (homogeneous tiers only).
    double probability_segmented(std::size_t k) const;
    /// Same probability with one plain adaptive integral over [0, inf).
    double probability_unsplit(std::size_t k) const;
    /// Conditional density from the segment form (homogeneous tiers only).
    double conditional_pdf_segmented(std::size_t k, double u) const;

    /// Activation radii r_0 = 0 < ... < r_K = inf of the segment form, and
    /// the tier order in which the other tiers become active.
    struct Segments {
        std::vector<double> radii;
        std::vector<std::size_t> order;
    };
    Segments segments(std::size_t k) const;

private:
    double integrand_general(std::size_t k, double u) const;
    double joint_density_piece(std::size_t k, std::size_t j, const Segments& seg, double u) const;

    NetworkScenario scenario_;
    std::vector<double> p_star_;
    std::vector<std::vector<double>> breakpoints_;
    std::vector<double> scales_;
};

std::vector<double> association_probability(const NetworkScenario& scenario);
double conditional_distance_pdf(const NetworkScenario& scenario, std::size_t k, double u);

/// Closed-form conditional serving-distance density for two homogeneous
/// tiers, written in terms of the weaker and stronger tier by biased peak
/// power. Uses the supplied association probability for normalization.
double two_tier_conditional_pdf(const NetworkScenario& scenario, std::size_t k, double u, double p_k);

}  // namespace hetnet
