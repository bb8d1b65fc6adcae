#include "hetnet/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "overloaded.hpp"

namespace hetnet {
namespace {

using detail::Overloaded;
using std::numbers::pi;

constexpr double kInf = std::numeric_limits<double>::infinity();

double disk(double r) { return pi * r * r; }

}  // namespace

RadialDensity::RadialDensity(Variant v) : v_(std::move(v)) {
    std::visit(Overloaded{
                   [](const Homogeneous&) {},
                   [](const GuardZone& g) {
                       if (!(g.a >= 0.0) || !std::isfinite(g.a)) throw ConfigError("guard radius must be finite and >= 0");
                   },
                   [](const AnnulusExcluded& a) {
                       if (!(a.a >= 0.0 && a.b > a.a) || !std::isfinite(a.b)) {
                           throw ConfigError("annulus needs 0 <= inner < outer < inf");
                       }
                   },
                   [this](const CustomDensity& c) {
                       if (c.t.size() != c.mu.size() || c.t.size() < 2) {
                           throw ConfigError("custom density needs at least 2 (t, mu) pairs");
                       }
                       if (c.t.front() != 0.0) throw ConfigError("custom density must start at t = 0");
                       for (std::size_t i = 0; i < c.t.size(); ++i) {
                           if (i > 0 && !(c.t[i] > c.t[i - 1])) {
                               throw ConfigError("custom density nodes must increase strictly");
                           }
                           if (!(c.mu[i] >= 0.0) || !std::isfinite(c.mu[i])) {
                               throw ConfigError("custom density values must be finite and non-negative");
                           }
                       }
                       if (!(c.mu.back() > 0.0)) {
                           throw ConfigError("custom density has finite total mass; an infinite station population is required");
                       }
                       cum_.assign(c.t.size(), 0.0);
                       for (std::size_t i = 1; i < c.t.size(); ++i) {
                           cum_[i] = cum_[i - 1] + 0.5 * (c.mu[i] + c.mu[i - 1]) * (c.t[i] - c.t[i - 1]);
                       }
                   },
               },
               v_);
}

double RadialDensity::operator()(double t) const {
    if (t < 0.0) return 0.0;
    return std::visit(Overloaded{
                          [t](const Homogeneous&) { return 2.0 * pi * t; },
                          [t](const GuardZone& g) { return t >= g.a ? 2.0 * pi * t : 0.0; },
                          [t](const AnnulusExcluded& a) { return (t < a.a || t > a.b) ? 2.0 * pi * t : 0.0; },
                          [t](const CustomDensity& c) {
                              if (t >= c.t.back()) return c.mu.back() * t / c.t.back();
                              const auto j = static_cast<std::size_t>(
                                  std::upper_bound(c.t.begin(), c.t.end(), t) - c.t.begin());
                              const double w = (t - c.t[j - 1]) / (c.t[j] - c.t[j - 1]);
                              return c.mu[j - 1] + w * (c.mu[j] - c.mu[j - 1]);
                          },
                      },
                      v_);
}

double RadialDensity::cumulative(double r) const {
    if (!(r > 0.0)) return 0.0;
    return std::visit(Overloaded{
                          [r](const Homogeneous&) { return disk(r); },
                          [r](const GuardZone& g) { return r > g.a ? disk(r) - disk(g.a) : 0.0; },
                          [r](const AnnulusExcluded& a) {
                              return disk(std::min(r, a.a)) + (r > a.b ? disk(r) - disk(a.b) : 0.0);
                          },
                          [this, r](const CustomDensity& c) {
                              const double tn = c.t.back();
                              if (r >= tn) return cum_.back() + c.mu.back() * (r * r - tn * tn) / (2.0 * tn);
                              const auto j = static_cast<std::size_t>(
                                  std::upper_bound(c.t.begin(), c.t.end(), r) - c.t.begin());
                              const double d = r - c.t[j - 1];
                              const double slope = (c.mu[j] - c.mu[j - 1]) / (c.t[j] - c.t[j - 1]);
                              return cum_[j - 1] + c.mu[j - 1] * d + 0.5 * slope * d * d;
                          },
                      },
                      v_);
}

double RadialDensity::cumulative_inverse(double m) const {
    if (!(m > 0.0)) return 0.0;
    if (std::isinf(m)) return kInf;
    return std::visit(Overloaded{
                          [m](const Homogeneous&) { return std::sqrt(m / pi); },
                          [m](const GuardZone& g) { return std::sqrt(g.a * g.a + m / pi); },
                          [m](const AnnulusExcluded& a) {
                              const double inner = disk(a.a);
                              if (m <= inner) return std::sqrt(m / pi);
                              return std::sqrt(a.b * a.b + (m - inner) / pi);
                          },
                          [this, m](const CustomDensity& c) {
                              const double tn = c.t.back();
                              if (m >= cum_.back()) {
                                  return std::sqrt(tn * tn + 2.0 * tn * (m - cum_.back()) / c.mu.back());
                              }
                              // First node whose cumulative reaches m; flat stretches resolve to their start.
                              const auto j = static_cast<std::size_t>(
                                  std::lower_bound(cum_.begin(), cum_.end(), m) - cum_.begin());
                              const double rest = m - cum_[j - 1];
                              const double mu0 = c.mu[j - 1];
                              const double slope = (c.mu[j] - mu0) / (c.t[j] - c.t[j - 1]);
                              const double disc = std::sqrt(std::max(0.0, mu0 * mu0 + 2.0 * slope * rest));
                              const double d = 2.0 * rest / (mu0 + disc);
                              return std::min(c.t[j], c.t[j - 1] + d);
                          },
                      },
                      v_);
}

std::vector<double> RadialDensity::breakpoints() const {
    return std::visit(Overloaded{
                          [](const Homogeneous&) { return std::vector<double>{}; },
                          [](const GuardZone& g) { return std::vector<double>{g.a}; },
                          [](const AnnulusExcluded& a) { return std::vector<double>{a.a, a.b}; },
                          [](const CustomDensity& c) { return std::vector<double>(c.t.begin() + 1, c.t.end()); },
                      },
                      v_);
}

std::string RadialDensity::describe() const {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&os](const Homogeneous&) { os << "homogeneous"; },
                   [&os](const GuardZone& g) { os << "guard_zone(a=" << g.a << ")"; },
                   [&os](const AnnulusExcluded& a) { os << "annulus(a=" << a.a << ", b=" << a.b << ")"; },
                   [&os](const CustomDensity& c) { os << "custom(" << c.t.size() << " nodes)"; },
               },
               v_);
    return os.str();
}

NetworkScenario::NetworkScenario(std::vector<TierConfig> tiers, double noise, double processing_gain,
                                 double kappa)
    : base_(std::move(tiers)), noise_(noise), processing_gain_(processing_gain), kappa_(kappa) {
    if (base_.empty()) throw ConfigError("a scenario needs at least one tier");
    if (!(noise_ >= 0.0) || !std::isfinite(noise_)) throw ConfigError("noise power must be finite and >= 0");
    if (!(processing_gain_ >= 1.0) || !std::isfinite(processing_gain_)) {
        throw ConfigError("processing gain must be finite and >= 1");
    }
    if (!(kappa_ > 0.0) || !std::isfinite(kappa_)) throw ConfigError("kappa must be finite and positive");
    for (std::size_t k = 0; k < base_.size(); ++k) {
        const TierConfig& t = base_[k];
        const std::string where = "tier " + std::to_string(k + 1) + ": ";
        if (!(t.power > 0.0) || !std::isfinite(t.power)) throw ConfigError(where + "power must be positive");
        if (!(t.bias > 0.0) || !std::isfinite(t.bias)) throw ConfigError(where + "bias must be positive");
        if (!(t.intensity > 0.0) || !std::isfinite(t.intensity)) {
            throw ConfigError(where + "intensity must be positive");
        }
        // Every supported density grows like t, so integrability of G mu needs a tail steeper than t^-2.
        if (!(t.pathloss.tail_exponent() > 2.0)) {
            throw ConfigError(where + "path-loss tail too heavy for the radial density");
        }
    }
    effective_ = base_;
    for (auto& t : effective_) {
        if (t.scales_with_kappa) t.intensity *= kappa_;
    }
}

bool NetworkScenario::all_homogeneous() const {
    return std::all_of(effective_.begin(), effective_.end(),
                       [](const TierConfig& t) { return t.density.is_homogeneous(); });
}

NetworkScenario NetworkScenario::with_kappa(double kappa) const {
    return NetworkScenario(base_, noise_, processing_gain_, kappa);
}

NetworkScenario NetworkScenario::with_intensities_scaled(double c) const {
    std::vector<TierConfig> scaled = base_;
    for (auto& t : scaled) t.intensity *= c;
    return NetworkScenario(std::move(scaled), noise_, processing_gain_, kappa_);
}

double mean_measure(const TierConfig& tier, double r) {
    return tier.intensity * tier.density.cumulative(r);
}

double nearest_distance_pdf(const TierConfig& tier, double u) {
    if (u < 0.0) return 0.0;
    const double mu = tier.density(u);
    if (mu == 0.0) return 0.0;
    return tier.intensity * mu * std::exp(-mean_measure(tier, u));
}

double radial_integral(const TierConfig& tier, int n, double lower, const numerics::QuadratureSpec& spec) {
    if (std::isinf(lower)) return 0.0;
    lower = std::max(0.0, lower);
    std::vector<double> bps = tier.density.breakpoints();
    const std::vector<double> pl = tier.pathloss.breakpoints();
    bps.insert(bps.end(), pl.begin(), pl.end());
    const auto f = [&tier, n](double t) {
        const double mu = tier.density(t);
        if (mu == 0.0) return 0.0;
        return std::pow(tier.pathloss(t), n) * mu;
    };
    return numerics::integrate_semi_infinite(f, lower, bps, spec, std::max(1.0, lower));
}

double truncated_mean_window(const TierConfig& tier, double relative) {
    const double full = radial_integral(tier, 1, 0.0);
    const auto tail = [&](double r) { return radial_integral(tier, 1, r) / full; };
    return numerics::invert_monotone_decreasing(tail, relative, {0.0, 10.0});
}

}  // namespace hetnet
