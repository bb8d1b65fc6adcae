#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hetnet/gaussian.hpp"
#include "hetnet/spatial.hpp"

namespace hetnet {

/// How stations beyond the simulation window are represented.
enum class TailModel {
    /// Added as one Gaussian draw with the exact far-field mean and variance.
    /// The window is sized so the far field's third cumulant is negligible.
    Gaussian,
    /// Dropped. The window must keep the missing mean below 1e-4 of the total.
    Truncate,
};

struct SimulationPlan {
    std::size_t realizations = 100000;
    std::uint64_t seed = 1;
    /// Per-tier window radii; empty selects them automatically.
    std::vector<double> window;
    std::vector<double> x_grid;
    std::vector<double> tau_grid;
    /// Confidence level of the reported empirical-CDF slack.
    double confidence = 0.99;
    TailModel tail = TailModel::Gaussian;
    /// Far-field third cumulant allowed per tier, relative to the cube of
    /// the total interference standard deviation.
    double far_field_skew = 1e-3;
    /// Truncated-mean fraction allowed per tier in Truncate mode.
    double truncated_mean = 1e-4;
    /// Upper limit on the expected number of stations in all windows.
    double max_expected_stations = 2e6;
    /// Standardize by the sample moments instead of the analytical ones.
    /// For debugging only: containment checks need analytical moments.
    bool self_normalized = false;

    void validate() const;
};

/// Near-field windows and the moments of what lies beyond them.
struct SimulationWindows {
    std::vector<double> radius;
    std::vector<double> far_mean;
    std::vector<double> far_variance;
    std::vector<double> far_third;
    /// Association runs: every candidate server lies inside its window unless
    /// the strongest biased power is below this floor.
    double winner_floor = 0.0;
    double expected_stations = 0.0;
};

/// Windows for interference sampling with per-tier exclusion radii. Throws
/// WindowTooSmall when explicit windows fail the tail rule or automatic
/// ones exceed the station budget.
SimulationWindows interference_windows(const NetworkScenario& scenario, const SimulationPlan& plan,
                                       const ExclusionProfile& exclusion);

/// Interference windows enlarged so that the association winner lies inside
/// them with probability above 1 - 1e-6.
SimulationWindows association_windows(const NetworkScenario& scenario, const SimulationPlan& plan);

/// Dvoretzky-Kiefer-Wolfowitz radius sqrt(ln(2 / (1 - confidence)) / (2 n)).
double dkw_slack(std::size_t n, double confidence);

struct AwiResult {
    std::vector<double> x_grid;
    std::vector<double> empirical_cdf;
    double slack = 0.0;
    double sample_mean = 0.0;
    double sample_variance = 0.0;
    double analytical_mean = 0.0;
    double analytical_variance = 0.0;
    std::size_t realizations = 0;
};

/// Empirical CDF of the standardized aggregate interference at the origin
/// (no exclusion), standardized by the analytical moments.
AwiResult simulate_awi(const NetworkScenario& scenario, const SimulationPlan& plan);

struct AssociationResult {
    std::vector<std::size_t> count;
    std::vector<double> frequency;
    /// Serving distances per tier, in realization order.
    std::vector<std::vector<double>> distances;
    std::size_t realizations = 0;
    std::size_t resampled = 0;
};

/// Association frequencies from the argmax of biased received power over
/// sampled stations, without interference.
AssociationResult simulate_association(const NetworkScenario& scenario, const SimulationPlan& plan);

struct QuantileEstimate {
    double value = 0.0;
    /// One-sigma error from the binomial spread of the order statistic.
    double error = 0.0;
};

struct BarssResult {
    std::vector<double> tau_grid;
    /// Fraction of realizations with rate below each tau.
    std::vector<double> outage_frequency;
    std::vector<double> association_frequency;
    double ergodic_mean = 0.0;
    double ergodic_stderr = 0.0;
    /// Rates log(1 + SINR) per serving tier, sorted ascending.
    std::vector<std::vector<double>> rates;
    /// All rates, sorted ascending.
    std::vector<double> all_rates;
    std::size_t realizations = 0;
    std::size_t resampled = 0;

    /// Largest tau whose empirical outage among tier-k users is at most
    /// gamma.
    QuantileEstimate conditional_outage_capacity(std::size_t k, double gamma) const;
    /// Same over all users.
    QuantileEstimate outage_capacity(double gamma) const;
    /// Intensity-weighted sum of per-tier conditional outage capacities; the
    /// error combines the per-tier errors in quadrature.
    QuantileEstimate ase(const NetworkScenario& scenario, const std::vector<double>& gamma) const;
};

/// Full downlink simulation: biased received-power association, the serving
/// station removed from the interference, SINR = P h G / (N0 + I / PG).
BarssResult simulate_barss(const NetworkScenario& scenario, const SimulationPlan& plan);

/// Sorted rates log(1 + SINR) for a user served by tier k at distance r,
/// with interferers of tier i restricted to distances above exclusion.d[i].
std::vector<double> simulate_link_rates(const NetworkScenario& scenario, const SimulationPlan& plan, std::size_t k,
                                        double r, const ExclusionProfile& exclusion);

/// Fraction of sorted rates strictly below tau.
double empirical_outage(const std::vector<double>& sorted_rates, double tau);

/// Largest tau whose empirical outage is at most gamma.
QuantileEstimate empirical_outage_capacity(const std::vector<double>& sorted_rates, double gamma);

}  // namespace hetnet
