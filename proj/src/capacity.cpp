#include "hetnet/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <map>

namespace hetnet {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZeroProbability = 1e-14;

double noise_threshold(const NetworkScenario& s, std::size_t k, double theta, double gain) {
    if (s.noise() == 0.0) return 0.0;
    if (!(gain > 0.0)) return kInf;
    return s.noise() / s.tier(k).power * theta / gain;
}

// Fading gain at which the standardized level reaches z.
double gain_for_zeta(const NetworkScenario& s, const GaussianSummary& sum, std::size_t k, double theta,
                     double gain, double z) {
    const double pg = s.processing_gain();
    return (z * sum.stddev() + sum.mean + s.noise() * pg) * theta / (s.tier(k).power * gain * pg);
}

}  // namespace

double zeta(const NetworkScenario& scenario, const GaussianSummary& summary, std::size_t k, double h, double tau,
            double r) {
    const TierConfig& t = scenario.tier(k);
    const double theta = std::expm1(tau);
    const double signal = t.power * (h * t.pathloss(r) / theta - scenario.noise() / t.power);
    return (signal * scenario.processing_gain() - summary.mean) / summary.stddev();
}

VPair v_kernels(const NetworkScenario& scenario, const GaussianSummary& summary, std::size_t k, double h,
                double tau, double r) {
    if (tau <= 0.0) return {1.0, 1.0};
    const double gain = scenario.tier(k).pathloss(r);
    const double theta = std::expm1(tau);
    if (!(h >= noise_threshold(scenario, k, theta, gain))) return {0.0, 0.0};
    if (summary.variance == 0.0) return {1.0, 1.0};
    const double z = zeta(scenario, summary, k, h, tau, r);
    const double psi = numerics::std_normal_cdf(z);
    const double w = summary.xi * berry_esseen_c(z);
    return {std::max(0.0, psi - w), std::min(1.0, psi + w)};
}

// Lower bound on the mean number of interferers whose received power
// reaches x, as a lower Riemann sum over a geometric distance grid. Its
// exponential therefore upper-bounds the probability that none does.
// Per-cell sums are memoized on a log grid in x, shared by every link, and
// interpolated so that the result stays conservative and continuous in x.
class CapacityEngine::CapTable {
public:
    explicit CapTable(const NetworkScenario& s) : scenario_(s) {
        constexpr double ratio = 1.04;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const TierConfig& t = s.tier(i);
            Cells c;
            double prev_mass = 0.0;
            for (double u = 1e-3; u < 1e6; u *= ratio) {
                const double mass = mean_measure(t, u);
                c.edge.push_back(u);
                c.cumulative.push_back(mass);
                c.received.push_back(t.power * t.pathloss(u));
                c.mass.push_back(mass - prev_mass);
                prev_mass = mass;
            }
            cells_.push_back(std::move(c));
        }
    }

    double success_cap(double x, const ExclusionProfile& excl) {
        if (!(x > 0.0)) return 0.0;
        const double pos = kSteps * std::log2(x);
        const double j = std::floor(pos);
        const double w = pos - j;
        const auto key = static_cast<long>(j);
        const double l = (1.0 - w) * lambda_at(key + 1, excl) + w * lambda_at(key + 2, excl);
        return std::exp(-l);
    }

private:
    static constexpr double kSteps = 16.0;

    struct Cells {
        std::vector<double> edge;        // far edge of each cell
        std::vector<double> cumulative;  // mean measure up to the far edge
        std::vector<double> received;    // P G at the far edge
        std::vector<double> mass;        // mean station count in the cell
    };

    // Survival of each cell at one x, and suffix sums of survival times mass.
    struct Level {
        std::vector<std::vector<double>> survival;
        std::vector<std::vector<double>> suffix;
    };

    const Level& level(long key) {
        const auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        const double x = std::exp2(static_cast<double>(key) / kSteps);
        Level lv;
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            const Cells& c = cells_[i];
            const FadingModel& f = scenario_.tier(i).fading;
            const std::size_t n = c.edge.size();
            std::vector<double> surv(n, 0.0);
            std::vector<double> suffix(n + 1, 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                surv[j] = f.survival(x / c.received[j]);
                if (surv[j] < 1e-17) break;
            }
            for (std::size_t j = n; j-- > 0;) suffix[j] = suffix[j + 1] + surv[j] * c.mass[j];
            lv.survival.push_back(std::move(surv));
            lv.suffix.push_back(std::move(suffix));
        }
        return memo_.emplace(key, std::move(lv)).first->second;
    }

    double lambda_at(long key, const ExclusionProfile& excl) {
        const Level& lv = level(key);
        double total = 0.0;
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            const double d = excl.d[i];
            if (std::isinf(d)) continue;
            const Cells& c = cells_[i];
            const auto first = static_cast<std::size_t>(
                std::upper_bound(c.edge.begin(), c.edge.end(), d) - c.edge.begin());
            if (first >= c.edge.size()) continue;
            // The cell holding d only counts from d outward.
            const double partial = c.cumulative[first] - mean_measure(scenario_.tier(i), d);
            total += lv.survival[i][first] * std::max(0.0, partial) + lv.suffix[i][first + 1];
        }
        return total;
    }

    const NetworkScenario& scenario_;
    std::vector<Cells> cells_;
    std::map<long, Level> memo_;
};

CapacityEngine::CapacityEngine(NetworkScenario scenario, CapacityOptions options)
    : scenario_(std::move(scenario)),
      options_(options),
      barss_links_(scenario_.size()),
      barss_ergodic_(scenario_.size()),
      distance_rules_(scenario_.size()) {}

CapacityEngine::~CapacityEngine() = default;

const AssociationModel& CapacityEngine::association() const {
    if (!association_) association_ = std::make_unique<AssociationModel>(scenario_);
    return *association_;
}

LinkState CapacityEngine::generic_link(std::size_t k, double r, const ExclusionProfile& exclusion) const {
    if (k >= scenario_.size()) throw ConfigError("serving tier index out of range");
    if (!(r >= 0.0)) throw ConfigError("serving distance must be non-negative");
    LinkState link;
    link.k = k;
    link.r = r;
    link.gain = scenario_.tier(k).pathloss(r);
    link.exclusion = exclusion;
    link.summary = gaussian_summary(scenario_, exclusion);
    return link;
}

const LinkState& CapacityEngine::barss_link(std::size_t k, double r) const {
    auto& cache = barss_links_.at(k);
    const auto it = cache.find(r);
    if (it != cache.end()) return it->second;
    return cache.emplace(r, generic_link(k, r, association().exclusion_profile(k, r))).first->second;
}

VPair CapacityEngine::expected_v(const LinkState& link, double tau) const {
    return expected_v_capped(link, tau, nullptr);
}

VPair CapacityEngine::expected_v_capped(const LinkState& link, double tau, CapTable* cap) const {
    if (tau <= 0.0) return {1.0, 1.0};
    const NetworkScenario& s = scenario_;
    const FadingModel& fading = s.tier(link.k).fading;
    const double theta = std::expm1(tau);
    const double budget_scale = s.processing_gain() * s.tier(link.k).power * link.gain / theta;
    const auto kernel = [&](double h) {
        VPair v = v_kernels(s, link.summary, link.k, h, tau, link.r);
        if (cap != nullptr && v.plus > 0.0) {
            const double budget = budget_scale * h - s.noise() * s.processing_gain();
            v.plus = std::min(v.plus, cap->success_cap(budget, link.exclusion));
        }
        return v;
    };
    if (fading.is_deterministic()) return kernel(fading.deterministic_gain());

    const double h0 = noise_threshold(s, link.k, theta, link.gain);
    if (std::isinf(h0)) return {0.0, 0.0};
    std::vector<double> bps;
    if (link.summary.variance > 0.0) {
        const double xc = berry_esseen_crossover();
        for (double z : {-xc, xc}) bps.push_back(gain_for_zeta(s, link.summary, link.k, theta, link.gain, z));
    }
    const auto integrand = [&](double h) {
        const double p = fading.pdf(h);
        if (p == 0.0) return numerics::Vec<2>{0.0, 0.0};
        const VPair v = kernel(h);
        return numerics::Vec<2>{v.minus * p, v.plus * p};
    };
    const numerics::QuadratureSpec& spec = cap != nullptr ? options_.ergodic_fading_spec : options_.fading_spec;
    const auto sums = numerics::integrate_semi_infinite_vec<2>(integrand, h0, bps, spec, 1.0);
    VPair out{sums[0], sums[1]};
    out.minus = std::clamp(out.minus, 0.0, 1.0);
    out.plus = std::clamp(out.plus, out.minus, 1.0);
    return out;
}

OutageBounds CapacityEngine::outage_generic(std::size_t k, double r, double tau,
                                            const ExclusionProfile& exclusion) const {
    const VPair v = expected_v(generic_link(k, r, exclusion), tau);
    return {1.0 - v.plus, 1.0 - v.minus};
}

const numerics::QuadratureRule& CapacityEngine::distance_rule(std::size_t k) const {
    auto& slot = distance_rules_.at(k);
    if (slot) return *slot;
    const AssociationModel& assoc = association();
    const auto density = [&](double r) { return assoc.joint_density(k, r); };
    numerics::QuadratureRule rule;
    try {
        rule = numerics::semi_infinite_rule(density, 0.0, assoc.breakpoints(k), options_.distance_rule_spec,
                                            assoc.length_scale(k), options_.distance_rule_refine);
    } catch (const NonConvergent& e) {
        if (e.tier()) throw;
        throw NonConvergent(e.what(), k);
    }
    // Fold the density into the weights and drop nodes that carry nothing.
    numerics::QuadratureRule folded;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double w = rule.weights[j] * density(rule.nodes[j]);
        if (w == 0.0) continue;
        folded.nodes.push_back(rule.nodes[j]);
        folded.weights.push_back(w);
    }
    slot = std::move(folded);
    return *slot;
}

template <class F>
VPair CapacityEngine::average_over_distance(std::size_t k, F&& per_link) const {
    const AssociationModel& assoc = association();
    if (options_.fixed_distance_rule) {
        const numerics::QuadratureRule& rule = distance_rule(k);
        VPair sum;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            const VPair v = per_link(rule.nodes[j]);
            sum.minus += rule.weights[j] * v.minus;
            sum.plus += rule.weights[j] * v.plus;
        }
        return sum;
    }
    const auto f = [&](double r) {
        const double w = assoc.joint_density(k, r);
        if (w == 0.0) return numerics::Vec<2>{0.0, 0.0};
        const VPair v = per_link(r);
        return numerics::Vec<2>{w * v.minus, w * v.plus};
    };
    try {
        const auto sums = numerics::integrate_semi_infinite_vec<2>(f, 0.0, assoc.breakpoints(k),
                                                                   options_.distance_spec, assoc.length_scale(k));
        return {sums[0], sums[1]};
    } catch (const NonConvergent& e) {
        if (e.tier()) throw;
        throw NonConvergent(e.what(), k);
    }
}

VPair CapacityEngine::distance_average(std::size_t k, double tau, bool conditional) const {
    const double pk = association().probability(k);
    if (pk < kZeroProbability) {
        if (conditional) throw ZeroProbabilityTier("tier " + std::to_string(k + 1) + " is never selected");
        return {};
    }
    VPair v = average_over_distance(k, [&](double r) { return expected_v(barss_link(k, r), tau); });
    if (conditional) {
        v.minus /= pk;
        v.plus /= pk;
    }
    return v;
}

OutageBounds CapacityEngine::outage_barss(double tau) const {
    if (tau <= 0.0) return {0.0, 0.0};
    double plus = 0.0;
    double minus = 0.0;
    for (std::size_t k = 0; k < scenario_.size(); ++k) {
        const VPair v = distance_average(k, tau, false);
        plus += v.plus;
        minus += v.minus;
    }
    const double lower = std::clamp(1.0 - plus, 0.0, 1.0);
    return {lower, std::clamp(1.0 - minus, lower, 1.0)};
}

OutageBounds CapacityEngine::outage_conditional(std::size_t k, double tau) const {
    if (tau <= 0.0) return {0.0, 0.0};
    const VPair v = distance_average(k, tau, true);
    const double lower = std::clamp(1.0 - v.plus, 0.0, 1.0);
    return {lower, std::clamp(1.0 - v.minus, lower, 1.0)};
}

CapacityBand CapacityEngine::outage_capacity(double gamma, const Policy& policy) const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("target outage probability must lie in (0, 1)");
    std::function<OutageBounds(double)> bounds;
    if (const auto* g = std::get_if<GenericPolicy>(&policy)) {
        const LinkState link = generic_link(g->k, g->r, g->exclusion);
        bounds = [this, link](double tau) {
            const VPair v = expected_v(link, tau);
            return OutageBounds{1.0 - v.plus, 1.0 - v.minus};
        };
    } else {
        bounds = [this](double tau) { return outage_barss(tau); };
    }
    const double upper =
        numerics::sup_threshold([&](double tau) { return bounds(tau).lower; }, gamma, options_.threshold);
    const double lower =
        numerics::sup_threshold([&](double tau) { return bounds(tau).upper; }, gamma, options_.threshold);
    return CapacityBand::from(lower, std::max(lower, upper));
}

VPair CapacityEngine::link_ergodic(const LinkState& link) const {
    const NetworkScenario& s = scenario_;
    CapTable* cap = nullptr;
    if (options_.dominant_interferer_cap) {
        if (!cap_table_) cap_table_ = std::make_unique<CapTable>(s);
        cap = cap_table_.get();
    }

    std::vector<double> bps;
    const FadingModel& fading = s.tier(link.k).fading;
    if (fading.is_deterministic() && s.noise() > 0.0) {
        bps.push_back(std::log1p(s.tier(link.k).power * link.gain * fading.deterministic_gain() / s.noise()));
    }
    // Both kernels share one pass; truncation follows the upper one, and
    // dropping the tail only lowers the lower bound.
    const auto fn = [&](double tau) {
        const VPair v = expected_v_capped(link, tau, cap);
        return numerics::Vec<2>{v.minus, v.plus};
    };
    numerics::Vec<2> total{0.0, 0.0};
    double rem_plus = 0.0;
    double a = 0.0;
    double b = 0.25;
    while (true) {
        const auto v = numerics::integrate_vec<2>(fn, a, b, bps, options_.rate_spec);
        total[0] += v[0];
        total[1] += v[1];
        if (v[1] <= options_.ergodic_truncation * total[1]) {
            rem_plus = v[1];
            break;
        }
        a = b;
        b = 2.0 * b;
        if (b > 1e4) throw NonConvergent("rate integral did not decay", link.k);
    }
    VPair out{total[0], total[1]};
    out.plus = std::max(out.minus, out.plus + rem_plus);
    return out;
}

CapacityBand CapacityEngine::ergodic_capacity(const Policy& policy) const {
    if (const auto* g = std::get_if<GenericPolicy>(&policy)) {
        const VPair v = link_ergodic(generic_link(g->k, g->r, g->exclusion));
        return CapacityBand::from(v.minus, v.plus);
    }
    const AssociationModel& assoc = association();
    const auto per_link = [&](std::size_t k, double r) -> const VPair& {
        auto& cache = barss_ergodic_.at(k);
        const auto it = cache.find(r);
        if (it != cache.end()) return it->second;
        return cache.emplace(r, link_ergodic(barss_link(k, r))).first->second;
    };
    double lower = 0.0;
    double upper = 0.0;
    for (std::size_t k = 0; k < scenario_.size(); ++k) {
        if (assoc.probability(k) < kZeroProbability) continue;
        const VPair v = average_over_distance(k, [&](double r) { return per_link(k, r); });
        lower += v.minus;
        upper += v.plus;
    }
    return CapacityBand::from(lower, std::max(lower, upper));
}

CapacityBand CapacityEngine::ase(const std::vector<double>& gamma) const {
    if (!scenario_.all_homogeneous()) throw NonHomogeneousDensity("area spectral efficiency needs homogeneous tiers");
    if (gamma.size() != scenario_.size()) throw ConfigError("one target outage probability per tier is required");
    double lower = 0.0;
    double upper = 0.0;
    for (std::size_t k = 0; k < scenario_.size(); ++k) {
        const double g = gamma[k];
        if (!(g > 0.0 && g < 1.0)) throw ConfigError("target outage probabilities must lie in (0, 1)");
        const double c_plus = numerics::sup_threshold(
            [&](double tau) { return outage_conditional(k, tau).lower; }, g, options_.threshold);
        const double c_minus = numerics::sup_threshold(
            [&](double tau) { return outage_conditional(k, tau).upper; }, g, options_.threshold);
        const double weight = scenario_.tier(k).intensity * (1.0 - g);
        lower += weight * c_minus;
        upper += weight * std::max(c_minus, c_plus);
    }
    return CapacityBand::from(lower, upper);
}

OutageBounds outage_bounds_generic(const NetworkScenario& scenario, std::size_t k, double r, double tau,
                                   const ExclusionProfile& exclusion) {
    return CapacityEngine(scenario).outage_generic(k, r, tau, exclusion);
}

OutageBounds outage_bounds_barss(const NetworkScenario& scenario, double tau) {
    return CapacityEngine(scenario).outage_barss(tau);
}

CapacityBand outage_capacity_band(const NetworkScenario& scenario, double gamma, const Policy& policy) {
    return CapacityEngine(scenario).outage_capacity(gamma, policy);
}

CapacityBand ergodic_capacity_band(const NetworkScenario& scenario, const Policy& policy) {
    return CapacityEngine(scenario).ergodic_capacity(policy);
}

CapacityBand ase_band(const NetworkScenario& scenario, const std::vector<double>& gamma) {
    return CapacityEngine(scenario).ase(gamma);
}

}  // namespace hetnet
