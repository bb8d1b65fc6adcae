#include "hetnet/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hetnet {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZeroProbability = 1e-14;
constexpr numerics::QuadratureSpec kAssocSpec{1e-11, 1e-300, 4000};

double biased_ratio(const TierConfig& num, const TierConfig& den) {
    return (num.bias * num.power) / (den.bias * den.power);
}

void require_homogeneous(const NetworkScenario& s, const char* what) {
    if (!s.all_homogeneous()) throw NonHomogeneousDensity(std::string(what) + " needs homogeneous tiers");
}

}  // namespace

double exclusion_radius(const NetworkScenario& scenario, std::size_t k, std::size_t i, double r) {
    if (i == k) return r;
    const TierConfig& tk = scenario.tier(k);
    const TierConfig& ti = scenario.tier(i);
    return ti.pathloss.inverse(biased_ratio(tk, ti) * tk.pathloss(r));
}

AssociationModel::AssociationModel(NetworkScenario scenario) : scenario_(std::move(scenario)) {
    const std::size_t n = scenario_.size();
    breakpoints_.resize(n);
    scales_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const TierConfig& tk = scenario_.tier(k);
        scales_[k] = std::max(1e-6, 1.0 / std::sqrt(std::numbers::pi * tk.intensity));
        std::vector<double>& bp = breakpoints_[k];
        const Segments seg = segments(k);
        for (double r : seg.radii) {
            if (r > 0.0 && std::isfinite(r)) bp.push_back(r);
        }
        for (double b : tk.density.breakpoints()) bp.push_back(b);
        for (double b : tk.pathloss.breakpoints()) bp.push_back(b);
        // Tier-i density breakpoints b map to the serving distance where Q_i reaches b.
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const TierConfig& ti = scenario_.tier(i);
            for (double b : ti.density.breakpoints()) {
                const double u = tk.pathloss.inverse(biased_ratio(ti, tk) * ti.pathloss(b));
                if (u > 0.0 && std::isfinite(u)) bp.push_back(u);
            }
        }
        std::sort(bp.begin(), bp.end());
        bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    }
    p_star_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        try {
            const auto f = [this, k](double u) { return integrand_general(k, u); };
            p_star_[k] = numerics::integrate_semi_infinite(f, 0.0, breakpoints_[k], kAssocSpec, scales_[k]);
        } catch (const NonConvergent& e) {
            throw NonConvergent(e.what(), k);
        }
    }
}

double AssociationModel::exclusion_radius(std::size_t k, std::size_t i, double r) const {
    return hetnet::exclusion_radius(scenario_, k, i, r);
}

ExclusionProfile AssociationModel::exclusion_profile(std::size_t k, double r) const {
    ExclusionProfile p;
    p.d.resize(size());
    for (std::size_t i = 0; i < size(); ++i) p.d[i] = exclusion_radius(k, i, r);
    return p;
}

double AssociationModel::integrand_general(std::size_t k, double u) const {
    const TierConfig& tk = scenario_.tier(k);
    const double mu = tk.density(u);
    if (mu == 0.0) return 0.0;
    double exponent = mean_measure(tk, u);
    for (std::size_t i = 0; i < size(); ++i) {
        if (i == k) continue;
        const double q = exclusion_radius(k, i, u);
        if (q > 0.0) exponent += mean_measure(scenario_.tier(i), q);
    }
    return tk.intensity * mu * std::exp(-exponent);
}

double AssociationModel::joint_density(std::size_t k, double u) const {
    if (u < 0.0) return 0.0;
    return integrand_general(k, u);
}

double AssociationModel::conditional_pdf(std::size_t k, double u) const {
    if (p_star_.at(k) < kZeroProbability) {
        throw ZeroProbabilityTier("tier " + std::to_string(k + 1) + " is never selected");
    }
    return joint_density(k, u) / p_star_[k];
}

AssociationModel::Segments AssociationModel::segments(std::size_t k) const {
    const TierConfig& tk = scenario_.tier(k);
    std::vector<std::pair<double, std::size_t>> a;
    for (std::size_t i = 0; i < size(); ++i) {
        if (i == k) continue;
        const TierConfig& ti = scenario_.tier(i);
        a.emplace_back(biased_ratio(ti, tk) * ti.pathloss.at_origin(), i);
    }
    // Descending by a_i, ties by ascending tier index.
    std::stable_sort(a.begin(), a.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    Segments s;
    s.radii.push_back(0.0);
    for (const auto& [ai, i] : a) {
        s.radii.push_back(tk.pathloss.inverse(ai));
        s.order.push_back(i);
    }
    s.radii.push_back(kInf);
    return s;
}

double AssociationModel::probability_segmented(std::size_t k) const {
    require_homogeneous(scenario_, "segmented association probability");
    const Segments seg = segments(k);
    double total = 0.0;
    for (std::size_t j = 1; j < seg.radii.size(); ++j) {
        const double lo = seg.radii[j - 1];
        const double hi = seg.radii[j];
        if (!(hi > lo)) continue;
        const auto f = [this, k, j, &seg](double u) { return joint_density_piece(k, j, seg, u); };
        total += std::isinf(hi) ? numerics::integrate_semi_infinite(f, lo, kAssocSpec, std::max(scales_[k], lo))
                                : numerics::integrate(f, lo, hi, kAssocSpec);
    }
    return total;
}

double AssociationModel::probability_unsplit(std::size_t k) const {
    const auto f = [this, k](double u) { return integrand_general(k, u); };
    return numerics::integrate_semi_infinite(f, 0.0, kAssocSpec, scales_[k]);
}

double AssociationModel::conditional_pdf_segmented(std::size_t k, double u) const {
    require_homogeneous(scenario_, "segmented conditional density");
    if (u < 0.0) return 0.0;
    const Segments seg = segments(k);
    std::size_t j = 1;
    while (j + 1 < seg.radii.size() && u >= seg.radii[j]) ++j;
    return joint_density_piece(k, j, seg, u) / p_star_.at(k);
}

double AssociationModel::joint_density_piece(std::size_t k, std::size_t j, const Segments& seg, double u) const {
    const double lk = scenario_.tier(k).intensity;
    double exponent = lk * u * u;
    for (std::size_t i = 1; i < j; ++i) {
        const std::size_t t = seg.order[i - 1];
        const double q = exclusion_radius(k, t, u);
        exponent += scenario_.tier(t).intensity * q * q;
    }
    return 2.0 * std::numbers::pi * lk * u * std::exp(-std::numbers::pi * exponent);
}

std::vector<double> association_probability(const NetworkScenario& scenario) {
    return AssociationModel(scenario).probabilities();
}

double conditional_distance_pdf(const NetworkScenario& scenario, std::size_t k, double u) {
    return AssociationModel(scenario).conditional_pdf(k, u);
}

double two_tier_conditional_pdf(const NetworkScenario& scenario, std::size_t k, double u, double p_k) {
    if (scenario.size() != 2) throw ConfigError("two-tier closed form needs exactly two tiers");
    require_homogeneous(scenario, "two-tier closed form");
    if (u < 0.0) return 0.0;
    const auto peak = [&](std::size_t i) {
        const TierConfig& t = scenario.tier(i);
        return t.bias * t.power * t.pathloss.at_origin();
    };
    const std::size_t weak = peak(0) <= peak(1) ? 0 : 1;
    const std::size_t strong = 1 - weak;
    const TierConfig& tw = scenario.tier(weak);
    const TierConfig& ts = scenario.tier(strong);
    const double two_pi = 2.0 * std::numbers::pi;
    if (k == weak) {
        const double q = ts.pathloss.inverse(biased_ratio(tw, ts) * tw.pathloss(u));
        return two_pi * tw.intensity / p_k * u *
               std::exp(-std::numbers::pi * (tw.intensity * u * u + ts.intensity * q * q));
    }
    const double u_star = ts.pathloss.inverse(biased_ratio(tw, ts) * tw.pathloss.at_origin());
    if (u < u_star) return two_pi * ts.intensity / p_k * u * std::exp(-std::numbers::pi * ts.intensity * u * u);
    const double q = tw.pathloss.inverse(biased_ratio(ts, tw) * ts.pathloss(u));
    return two_pi * ts.intensity / p_k * u *
           std::exp(-std::numbers::pi * (ts.intensity * u * u + tw.intensity * q * q));
}

}  // namespace hetnet
