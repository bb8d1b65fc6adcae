#include "hetnet/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hetnet {
namespace {

constexpr numerics::QuadratureSpec kMomentSpec{1e-12, 1e-300, 4000};

void check_profile(const NetworkScenario& scenario, const ExclusionProfile& excl) {
    if (excl.d.size() != scenario.size()) throw ConfigError("exclusion profile length differs from tier count");
    for (double d : excl.d) {
        if (!(d >= 0.0)) throw ConfigError("exclusion radii must be non-negative");
    }
}

struct Sums {
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
};

Sums moment_sums(const NetworkScenario& scenario, const ExclusionProfile& excl, bool need_first) {
    check_profile(scenario, excl);
    Sums s;
    for (std::size_t k = 0; k < scenario.size(); ++k) {
        try {
            const TierConfig& t = scenario.tier(k);
            if (need_first) s.s1 += moment_integral(t, 1, excl.d[k]);
            s.s2 += moment_integral(t, 2, excl.d[k]);
            s.s3 += moment_integral(t, 3, excl.d[k]);
        } catch (const NonConvergent& e) {
            if (e.tier()) throw;
            throw NonConvergent(e.what(), k);
        }
    }
    return s;
}

// Integral of G(t)^n t over [0, inf).
double planar_integral(const PathLossModel& g, int n) {
    const auto f = [&g, n](double t) { return std::pow(g(t), n) * t; };
    return numerics::integrate_semi_infinite(f, 0.0, g.breakpoints(), kMomentSpec, 1.0);
}

}  // namespace

double GaussianSummary::stddev() const { return std::sqrt(variance); }

double moment_integral(const TierConfig& tier, int n, double lower) {
    if (n < 1 || n > 3) throw ConfigError("moment order must lie in 1..3");
    if (std::isinf(lower)) return 0.0;
    return tier.intensity * std::pow(tier.power, n) * tier.fading.moment(n) *
           radial_integral(tier, n, lower, kMomentSpec);
}

InterferenceMoments interference_moments(const NetworkScenario& scenario, const ExclusionProfile& excl) {
    check_profile(scenario, excl);
    InterferenceMoments m;
    for (std::size_t k = 0; k < scenario.size(); ++k) {
        try {
            m.mean += moment_integral(scenario.tier(k), 1, excl.d[k]);
            m.variance += moment_integral(scenario.tier(k), 2, excl.d[k]);
        } catch (const NonConvergent& e) {
            if (e.tier()) throw;
            throw NonConvergent(e.what(), k);
        }
    }
    return m;
}

GaussianSummary gaussian_summary(const NetworkScenario& scenario, const ExclusionProfile& excl) {
    const Sums s = moment_sums(scenario, excl, true);
    if (s.s2 == 0.0) return {s.s1, 0.0, 0.0};
    if (!std::isnormal(s.s2)) throw DegenerateVariance("interference variance underflows");
    return {s.s1, s.s2, s.s3 / std::pow(s.s2, 1.5)};
}

double xi_coefficient(const NetworkScenario& scenario, const ExclusionProfile& excl) {
    const Sums s = moment_sums(scenario, excl, false);
    if (!std::isnormal(s.s2)) throw DegenerateVariance("interference variance vanishes or underflows");
    return s.s3 / std::pow(s.s2, 1.5);
}

double xi_coefficient(const NetworkScenario& scenario) {
    return xi_coefficient(scenario, ExclusionProfile::none(scenario.size()));
}

double berry_esseen_c(double x) {
    const double ax = std::abs(x);
    return std::min(kBerryEsseenUniform, kBerryEsseenNonUniform / (1.0 + ax * ax * ax));
}

double berry_esseen_crossover() {
    return std::cbrt(kBerryEsseenNonUniform / kBerryEsseenUniform - 1.0);
}

Band cdf_band(double x, const GaussianSummary& summary) {
    const double psi = numerics::std_normal_cdf(x);
    const double w = summary.xi * berry_esseen_c(x);
    return {std::max(0.0, psi - w), std::min(1.0, psi + w)};
}

std::vector<Band> cdf_band_curve(std::span<const double> xs, const GaussianSummary& summary,
                                 bool monotone_envelope) {
    std::vector<Band> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(cdf_band(x, summary));
    if (monotone_envelope) {
        if (!std::is_sorted(xs.begin(), xs.end())) throw ConfigError("monotone envelope needs an ascending grid");
        for (std::size_t i = 1; i < out.size(); ++i) out[i].lower = std::max(out[i].lower, out[i - 1].lower);
        for (std::size_t i = out.size(); i-- > 1;) out[i - 1].upper = std::min(out[i - 1].upper, out[i].upper);
    }
    return out;
}

XiUpperBound xi_upper_bound(const NetworkScenario& scenario) {
    double lambda_sq = 0.0;
    double lambda_sum = 0.0;
    double a_sq = 0.0;
    double b_min = std::numeric_limits<double>::infinity();
    for (const TierConfig& t : scenario.tiers()) {
        const double a = std::pow(t.power, 3) * t.fading.moment(3) * radial_integral(t, 3, 0.0, kMomentSpec);
        const double b = std::pow(t.power, 2) * t.fading.moment(2) * radial_integral(t, 2, 0.0, kMomentSpec);
        lambda_sq += t.intensity * t.intensity;
        lambda_sum += t.intensity;
        a_sq += a * a;
        b_min = std::min(b_min, b);
    }
    XiUpperBound r;
    r.lambda_norm = std::sqrt(lambda_sq);
    r.bound = r.lambda_norm * std::sqrt(a_sq) / std::pow(b_min * lambda_sum, 1.5);
    r.delta = r.bound * std::sqrt(r.lambda_norm);
    return r;
}

double xi_lower_bound(const NetworkScenario& scenario) {
    double b_sq = 0.0;
    double c_sq = 0.0;
    double num = 0.0;
    for (const TierConfig& t : scenario.tiers()) {
        const double a = t.intensity * radial_integral(t, 3, 0.0, kMomentSpec);
        const double b = t.intensity * radial_integral(t, 2, 0.0, kMomentSpec);
        const double c = t.power * t.power * t.fading.moment(2);
        b_sq += b * b;
        c_sq += c * c;
        num += a * std::pow(c, 1.5);
    }
    return num / std::pow(std::sqrt(c_sq) * std::sqrt(b_sq), 1.5);
}

double xi_homogeneous(const NetworkScenario& scenario) {
    if (!scenario.all_homogeneous()) throw NonHomogeneousDensity("xi_homogeneous needs homogeneous tiers");
    double num = 0.0;
    double den = 0.0;
    for (const TierConfig& t : scenario.tiers()) {
        num += t.intensity * std::pow(t.power, 3) * t.fading.moment(3) * planar_integral(t.pathloss, 3);
        den += t.intensity * std::pow(t.power, 2) * t.fading.moment(2) * planar_integral(t.pathloss, 2);
    }
    return num / std::pow(den, 1.5) / std::sqrt(2.0 * std::numbers::pi);
}

double xi_identical_tiers(std::size_t k, double lambda, const PathLossModel& pathloss, const FadingModel& fading) {
    const double kl = static_cast<double>(k) * lambda;
    return 1.0 / std::sqrt(2.0 * std::numbers::pi * kl) * fading.moment(3) / std::pow(fading.moment(2), 1.5) *
           planar_integral(pathloss, 3) / std::pow(planar_integral(pathloss, 2), 1.5);
}

}  // namespace hetnet
