#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hetnet/spatial.hpp"

namespace hetnet {

inline constexpr double kBerryEsseenUniform = 0.4785;
inline constexpr double kBerryEsseenNonUniform = 31.935;

/// Per-tier lower limits of the interference integrals. A tier with an
/// infinite radius contributes nothing.
struct ExclusionProfile {
    std::vector<double> d;

    static ExclusionProfile none(std::size_t tiers) { return {std::vector<double>(tiers, 0.0)}; }
};

struct InterferenceMoments {
    double mean = 0.0;
    double variance = 0.0;
};

struct GaussianSummary {
    double mean = 0.0;
    double variance = 0.0;
    double xi = 0.0;

    double stddev() const;
};

struct Band {
    double lower = 0.0;
    double upper = 0.0;
};

/// lambda P^n E[H^n] times the integral of G^n mu over [lower, inf).
double moment_integral(const TierConfig& tier, int n, double lower);

InterferenceMoments interference_moments(const NetworkScenario& scenario, const ExclusionProfile& excl);

/// Mean, variance and Berry-Esseen coefficient in one pass. An empty
/// interferer set (zero variance) yields the all-zero summary.
GaussianSummary gaussian_summary(const NetworkScenario& scenario, const ExclusionProfile& excl);

/// Third-moment sum over the variance to the 3/2; throws DegenerateVariance
/// when the variance vanishes.
double xi_coefficient(const NetworkScenario& scenario, const ExclusionProfile& excl);
double xi_coefficient(const NetworkScenario& scenario);

/// min(0.4785, 31.935 / (1 + |x|^3)).
double berry_esseen_c(double x);

/// |x| at which the two branches of berry_esseen_c meet.
double berry_esseen_crossover();

/// Clamped band around the normal CDF of the standardized interference.
Band cdf_band(double x, const GaussianSummary& summary);

/// Bands over a grid of x. The optional envelope takes a running max of the
/// lower edge from the left and a running min of the upper edge from the
/// right; xs must then be sorted ascending.
std::vector<Band> cdf_band_curve(std::span<const double> xs, const GaussianSummary& summary,
                                 bool monotone_envelope = false);

struct XiUpperBound {
    double bound = 0.0;
    /// bound * sqrt(||lambda||_2), invariant under common intensity scaling.
    double delta = 0.0;
    double lambda_norm = 0.0;
};

/// Upper bound ||lambda||_2 ||a||_2 / (min_k b_k sum_k lambda_k)^{3/2} with
/// a_k, b_k the per-tier cubic and quadratic integrals (no exclusion).
XiUpperBound xi_upper_bound(const NetworkScenario& scenario);

/// Lower bound (||c||_2 ||b||_2)^{-3/2} sum_k a_k c_k^{3/2} with
/// a_k = lambda_k int G^3 mu, b_k = lambda_k int G^2 mu, c_k = P_k^2 E[H^2].
/// Tight when there is one tier with deterministic fading.
double xi_lower_bound(const NetworkScenario& scenario);

/// Xi for all-homogeneous tiers, evaluated from integrals of G^n(t) t.
double xi_homogeneous(const NetworkScenario& scenario);

/// Xi for K identical homogeneous tiers of intensity lambda each.
double xi_identical_tiers(std::size_t k, double lambda, const PathLossModel& pathloss, const FadingModel& fading);

}  // namespace hetnet
