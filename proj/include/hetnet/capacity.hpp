#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <unordered_map>
#include <variant>
#include <vector>

#include "hetnet/association.hpp"
#include "hetnet/gaussian.hpp"
#include "hetnet/numerics.hpp"
#include "hetnet/spatial.hpp"

namespace hetnet {

/// Bounds on a scalar metric; heuristic is the midpoint.
struct CapacityBand {
    double lower = 0.0;
    double upper = 0.0;
    double heuristic = 0.0;

    static CapacityBand from(double lower, double upper) { return {lower, upper, 0.5 * (lower + upper)}; }
};

struct OutageBounds {
    double lower = 0.0;
    double upper = 0.0;
};

struct VPair {
    double minus = 0.0;
    double plus = 0.0;
};

/// User served by tier k at distance r, with the interferer exclusion
/// radii it implies and the resulting interference summary.
struct LinkState {
    std::size_t k = 0;
    double r = 0.0;
    double gain = 0.0;  // G_k(r)
    ExclusionProfile exclusion;
    GaussianSummary summary;
};

/// Fixed serving tier and distance with caller-chosen exclusion radii.
struct GenericPolicy {
    std::size_t k = 0;
    double r = 0.0;
    ExclusionProfile exclusion;
};

/// Biased average received power association.
struct BarssPolicy {};

using Policy = std::variant<GenericPolicy, BarssPolicy>;

struct CapacityOptions {
    numerics::QuadratureSpec fading_spec{1e-9, 1e-14, 2000};
    numerics::QuadratureSpec distance_spec{1e-8, 1e-13, 2000};
    /// Fading average inside rate integrals, where the capped kernel has
    /// kinks and the outer integral absorbs small errors.
    numerics::QuadratureSpec ergodic_fading_spec{1e-7, 1e-12, 2000};
    numerics::QuadratureSpec rate_spec{1e-7, 1e-12, 2000};
    numerics::ThresholdOptions threshold{};
    /// Stop the rate integral once a doubling panel adds less than this
    /// fraction of the running total.
    double ergodic_truncation = 1e-8;
    /// Cap the success probability in ergodic upper bounds by the chance
    /// that no single interferer exceeds the signal budget.
    bool dominant_interferer_cap = true;
    /// Average over the serving distance with a fixed rule per tier, built
    /// once from the association density. Outage bounds are then exactly
    /// monotone in the rate. When false, each average is adaptive.
    bool fixed_distance_rule = true;
    numerics::QuadratureSpec distance_rule_spec{1e-7, 1e-14, 2000};
    int distance_rule_refine = 1;
};

/// Standardized interference level at which a rate of tau nats fails.
double zeta(const NetworkScenario& scenario, const GaussianSummary& summary, std::size_t k, double h, double tau,
            double r);

/// Band kernels (V-, V+) at one fading state; both include the noise
/// indicator. tau == 0 gives (1, 1).
VPair v_kernels(const NetworkScenario& scenario, const GaussianSummary& summary, std::size_t k, double h,
                double tau, double r);

/// Analytical engine for one scenario. Per-distance interference summaries
/// are memoized, so an instance must not be shared between threads.
class CapacityEngine {
public:
    explicit CapacityEngine(NetworkScenario scenario, CapacityOptions options = {});
    ~CapacityEngine();
    CapacityEngine(const CapacityEngine&) = delete;
    CapacityEngine& operator=(const CapacityEngine&) = delete;

    const NetworkScenario& scenario() const { return scenario_; }
    const AssociationModel& association() const;

    LinkState generic_link(std::size_t k, double r, const ExclusionProfile& exclusion) const;
    const LinkState& barss_link(std::size_t k, double r) const;

    /// Fading averages of the band kernels.
    VPair expected_v(const LinkState& link, double tau) const;

    OutageBounds outage_generic(std::size_t k, double r, double tau, const ExclusionProfile& exclusion) const;
    OutageBounds outage_barss(double tau) const;
    /// Outage bounds conditioned on the user being served by tier k.
    OutageBounds outage_conditional(std::size_t k, double tau) const;

    CapacityBand outage_capacity(double gamma, const Policy& policy) const;
    CapacityBand ergodic_capacity(const Policy& policy) const;
    /// Area spectral efficiency with per-tier outage targets; homogeneous
    /// tiers only.
    CapacityBand ase(const std::vector<double>& gamma) const;

    /// Rate integrals of the kernels for one link; the upper value includes
    /// the truncation remainder.
    VPair link_ergodic(const LinkState& link) const;

    /// Serving-distance rule for tier k; weights include the joint
    /// association density, so they sum to the tier's probability.
    const numerics::QuadratureRule& distance_rule(std::size_t k) const;

private:
    class CapTable;

    VPair expected_v_capped(const LinkState& link, double tau, CapTable* cap) const;
    /// Serving-distance average of E[V-], E[V+] weighted by the joint
    /// association density (divided by the tier probability if conditional).
    VPair distance_average(std::size_t k, double tau, bool conditional) const;
    template <class F>
    VPair average_over_distance(std::size_t k, F&& per_link) const;

    NetworkScenario scenario_;
    CapacityOptions options_;
    mutable std::unique_ptr<AssociationModel> association_;
    mutable std::vector<std::unordered_map<double, LinkState>> barss_links_;
    mutable std::vector<std::unordered_map<double, VPair>> barss_ergodic_;
    mutable std::vector<std::optional<numerics::QuadratureRule>> distance_rules_;
    mutable std::unique_ptr<CapTable> cap_table_;
};

OutageBounds outage_bounds_generic(const NetworkScenario& scenario, std::size_t k, double r, double tau,
                                   const ExclusionProfile& exclusion);
OutageBounds outage_bounds_barss(const NetworkScenario& scenario, double tau);
CapacityBand outage_capacity_band(const NetworkScenario& scenario, double gamma, const Policy& policy);
CapacityBand ergodic_capacity_band(const NetworkScenario& scenario, const Policy& policy);
CapacityBand ase_band(const NetworkScenario& scenario, const std::vector<double>& gamma);

}  // namespace hetnet
