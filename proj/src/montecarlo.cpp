#include "hetnet/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <random>

#include "hetnet/errors.hpp"
#include "hetnet/parallel.hpp"
#include "hetnet/random.hpp"

namespace hetnet {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kBlock = 1024;
constexpr int kMaxAttempts = 64;
// Mean station count whose void probability is 1e-7.
const double kVoidMeasure = std::log(1e7);

void for_each_block(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    parallel_for(blocks, [&](std::size_t b) { body(b * kBlock, std::min(n, (b + 1) * kBlock)); });
}

// Retries get their own substreams, disjoint from every first attempt.
RandomStream stream_for(const SimulationPlan& plan, std::size_t index, int attempt) {
    return RandomStream(plan.seed, static_cast<std::uint64_t>(index) | (static_cast<std::uint64_t>(attempt) << 48));
}

double expected_count(const TierConfig& t, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    return t.intensity * (t.density.cumulative(hi) - t.density.cumulative(lo));
}

void fill_far_moments(const NetworkScenario& s, const ExclusionProfile& excl, SimulationWindows& w) {
    const std::size_t K = s.size();
    w.far_mean.assign(K, 0.0);
    w.far_variance.assign(K, 0.0);
    w.far_third.assign(K, 0.0);
    w.expected_stations = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        const double d = excl.d[i];
        if (std::isinf(d)) continue;
        const double lower = std::max(w.radius[i], d);
        w.far_mean[i] = moment_integral(s.tier(i), 1, lower);
        w.far_variance[i] = moment_integral(s.tier(i), 2, lower);
        w.far_third[i] = moment_integral(s.tier(i), 3, lower);
        w.expected_stations += expected_count(s.tier(i), d, w.radius[i]);
    }
}

void check_budget(const SimulationPlan& plan, const SimulationWindows& w) {
    if (w.expected_stations > plan.max_expected_stations) {
        throw WindowTooSmall("simulation windows need " + std::to_string(w.expected_stations) +
                             " stations on average, above the configured budget");
    }
}

struct Draw {
    double biased;
    double distance;
    std::size_t tier;
};

// Argmax of biased power; ties go to the lower tier, then the nearer station.
bool beats(const Draw& a, const Draw& b) {
    if (a.biased != b.biased) return a.biased > b.biased;
    if (a.tier != b.tier) return a.tier < b.tier;
    return a.distance < b.distance;
}

double far_field_draw(const SimulationPlan& plan, const SimulationWindows& w, RandomStream& rng) {
    if (plan.tail != TailModel::Gaussian) return 0.0;
    double mean = 0.0;
    double var = 0.0;
    for (std::size_t i = 0; i < w.far_mean.size(); ++i) {
        mean += w.far_mean[i];
        var += w.far_variance[i];
    }
    if (var <= 0.0) return std::max(0.0, mean);
    std::normal_distribution<double> normal(mean, std::sqrt(var));
    return std::max(0.0, normal(rng));
}

// One realization of all stations inside the windows, each with its biased
// power and received interference power.
struct Realization {
    std::vector<Draw> stations;
    std::vector<double> received;
};

void sample_stations(const NetworkScenario& s, const SimulationWindows& w, const ExclusionProfile& excl,
                     bool with_fading, RandomStream& rng, Realization& out) {
    out.stations.clear();
    out.received.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
        const TierConfig& t = s.tier(i);
        const double lo = excl.d[i];
        if (std::isinf(lo) || !(w.radius[i] > lo)) continue;
        for (double u : sample_distances(t, w.radius[i], rng)) {
            if (u < lo) continue;
            const double g = t.pathloss(u);
            out.stations.push_back({t.bias * t.power * g, u, i});
            out.received.push_back(with_fading ? t.power * g * t.fading.sample(rng) : 0.0);
        }
    }
}

}  // namespace

void SimulationPlan::validate() const {
    if (realizations < 1000) throw ConfigError("simulation needs at least 1000 realizations");
    if (!(confidence > 0.0 && confidence < 1.0)) throw ConfigError("confidence must lie in (0, 1)");
    if (!(far_field_skew > 0.0)) throw ConfigError("far-field skew tolerance must be positive");
    if (!(truncated_mean > 0.0 && truncated_mean < 1.0)) throw ConfigError("truncated mean fraction must lie in (0, 1)");
    for (double r : window) {
        if (!(r > 0.0)) throw ConfigError("simulation windows must be positive");
    }
}

double dkw_slack(std::size_t n, double confidence) {
    return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(n)));
}

SimulationWindows interference_windows(const NetworkScenario& s, const SimulationPlan& plan,
                                       const ExclusionProfile& excl) {
    plan.validate();
    const std::size_t K = s.size();
    if (excl.d.size() != K) throw ConfigError("exclusion profile needs one radius per tier");
    if (!plan.window.empty() && plan.window.size() != K) throw ConfigError("one simulation window per tier is required");
    const InterferenceMoments total = interference_moments(s, excl);
    const double sigma3 = std::pow(total.variance, 1.5);

    // Tail rule for tier i at window radius R.
    const auto tail_ok = [&](std::size_t i, double radius) {
        const double lower = std::max(radius, excl.d[i]);
        if (plan.tail == TailModel::Gaussian) {
            return moment_integral(s.tier(i), 3, lower) <= plan.far_field_skew * sigma3;
        }
        const double full = moment_integral(s.tier(i), 1, excl.d[i]);
        return moment_integral(s.tier(i), 1, lower) <= plan.truncated_mean * full;
    };

    SimulationWindows w;
    w.radius.assign(K, 0.0);
    for (std::size_t i = 0; i < K; ++i) {
        const double d = excl.d[i];
        if (std::isinf(d)) continue;
        if (!plan.window.empty()) {
            w.radius[i] = plan.window[i];
            if (!tail_ok(i, w.radius[i])) {
                throw WindowTooSmall("simulation window of tier " + std::to_string(i + 1) + " fails the tail rule");
            }
            continue;
        }
        const TierConfig& t = s.tier(i);
        double radius = std::max(d, 1.0 / std::sqrt(std::numbers::pi * t.intensity));
        while (!tail_ok(i, radius)) {
            radius *= std::pow(2.0, 0.25);
            if (expected_count(t, d, radius) > plan.max_expected_stations) {
                throw WindowTooSmall("no window of tier " + std::to_string(i + 1) +
                                     " meets the tail rule within the station budget");
            }
        }
        w.radius[i] = radius;
    }
    fill_far_moments(s, excl, w);
    check_budget(plan, w);
    return w;
}

namespace {

// Smallest biased power the winner reaches unless some tier's void event
// (probability 1e-7 each) occurs, and the radius per tier beyond which no
// station can reach it.
std::pair<double, std::vector<double>> winner_reach(const NetworkScenario& s) {
    double floor = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const TierConfig& t = s.tier(k);
        const double r = t.density.cumulative_inverse(kVoidMeasure / t.intensity);
        floor = std::max(floor, t.bias * t.power * t.pathloss(r));
    }
    std::vector<double> reach(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const TierConfig& t = s.tier(i);
        reach[i] = t.pathloss.inverse(floor / (t.bias * t.power));
    }
    return {floor, reach};
}

}  // namespace

SimulationWindows association_windows(const NetworkScenario& s, const SimulationPlan& plan) {
    SimulationWindows w = interference_windows(s, plan, ExclusionProfile::none(s.size()));
    const auto [floor, reach] = winner_reach(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!plan.window.empty() && plan.window[i] < reach[i]) {
            throw WindowTooSmall("simulation window of tier " + std::to_string(i + 1) +
                                 " may miss the serving station");
        }
        w.radius[i] = std::max(w.radius[i], reach[i]);
    }
    w.winner_floor = floor;
    fill_far_moments(s, ExclusionProfile::none(s.size()), w);
    check_budget(plan, w);
    return w;
}

AwiResult simulate_awi(const NetworkScenario& s, const SimulationPlan& plan) {
    const ExclusionProfile none = ExclusionProfile::none(s.size());
    const SimulationWindows w = interference_windows(s, plan, none);
    const std::size_t n = plan.realizations;
    std::vector<double> samples(n);
    for_each_block(n, [&](std::size_t begin, std::size_t end) {
        Realization real;
        for (std::size_t j = begin; j < end; ++j) {
            RandomStream rng = stream_for(plan, j, 0);
            sample_stations(s, w, none, true, rng, real);
            double total = 0.0;
            for (double x : real.received) total += x;
            samples[j] = total + far_field_draw(plan, w, rng);
        }
    });

    AwiResult out;
    out.realizations = n;
    const InterferenceMoments m = interference_moments(s, none);
    out.analytical_mean = m.mean;
    out.analytical_variance = m.variance;
    double sum = 0.0;
    for (double x : samples) sum += x;
    out.sample_mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double x : samples) ss += (x - out.sample_mean) * (x - out.sample_mean);
    out.sample_variance = ss / static_cast<double>(n - 1);

    const double centre = plan.self_normalized ? out.sample_mean : m.mean;
    const double scale = std::sqrt(plan.self_normalized ? out.sample_variance : m.variance);
    if (!(scale > 0.0)) throw DegenerateVariance("interference variance vanishes; nothing to standardize");
    for (double& x : samples) x = (x - centre) / scale;
    std::sort(samples.begin(), samples.end());
    out.x_grid = plan.x_grid;
    for (double x : plan.x_grid) {
        const auto below = std::upper_bound(samples.begin(), samples.end(), x) - samples.begin();
        out.empirical_cdf.push_back(static_cast<double>(below) / static_cast<double>(n));
    }
    out.slack = dkw_slack(n, plan.confidence);
    return out;
}

namespace {

// Index of the winning station, retrying on fresh substreams while the
// realization cannot certify its winner. Returns the attempts used.
template <class Sample>
int certified_winner(const SimulationPlan& plan, std::size_t index, double floor, Realization& real,
                     std::size_t& winner, Sample&& sample) {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        RandomStream rng = stream_for(plan, index, attempt);
        sample(rng);
        if (real.stations.empty()) continue;
        std::size_t best = 0;
        for (std::size_t j = 1; j < real.stations.size(); ++j) {
            if (beats(real.stations[j], real.stations[best])) best = j;
        }
        if (real.stations[best].biased < floor) continue;
        winner = best;
        return attempt;
    }
    throw EmptyRealization("realization " + std::to_string(index) + " found no certified serving station in " +
                           std::to_string(kMaxAttempts) + " attempts");
}

}  // namespace

AssociationResult simulate_association(const NetworkScenario& s, const SimulationPlan& plan) {
    plan.validate();
    const std::size_t K = s.size();
    const auto [floor, reach] = winner_reach(s);
    SimulationWindows w;
    w.radius = reach;
    const ExclusionProfile none = ExclusionProfile::none(K);
    const std::size_t n = plan.realizations;
    std::vector<std::size_t> tier(n);
    std::vector<double> distance(n);
    std::vector<int> retries(n, 0);
    for_each_block(n, [&](std::size_t begin, std::size_t end) {
        Realization real;
        for (std::size_t j = begin; j < end; ++j) {
            std::size_t win = 0;
            retries[j] = certified_winner(plan, j, floor, real, win, [&](RandomStream& rng) {
                sample_stations(s, w, none, false, rng, real);
            });
            tier[j] = real.stations[win].tier;
            distance[j] = real.stations[win].distance;
        }
    });
    AssociationResult out;
    out.realizations = n;
    out.count.assign(K, 0);
    out.distances.assign(K, {});
    for (std::size_t j = 0; j < n; ++j) {
        ++out.count[tier[j]];
        out.distances[tier[j]].push_back(distance[j]);
        out.resampled += static_cast<std::size_t>(retries[j]);
    }
    for (std::size_t k = 0; k < K; ++k) out.frequency.push_back(static_cast<double>(out.count[k]) / n);
    return out;
}

BarssResult simulate_barss(const NetworkScenario& s, const SimulationPlan& plan) {
    const std::size_t K = s.size();
    const SimulationWindows w = association_windows(s, plan);
    const ExclusionProfile none = ExclusionProfile::none(K);
    const std::size_t n = plan.realizations;
    std::vector<double> rate(n);
    std::vector<std::size_t> tier(n);
    std::vector<int> retries(n, 0);
    const double pg = s.processing_gain();
    for_each_block(n, [&](std::size_t begin, std::size_t end) {
        Realization real;
        for (std::size_t j = begin; j < end; ++j) {
            std::size_t win = 0;
            double far = 0.0;
            retries[j] = certified_winner(plan, j, w.winner_floor, real, win, [&](RandomStream& rng) {
                sample_stations(s, w, none, true, rng, real);
                far = far_field_draw(plan, w, rng);
            });
            double interference = far;
            for (std::size_t m = 0; m < real.received.size(); ++m) {
                if (m != win) interference += real.received[m];
            }
            const double signal = real.received[win];
            rate[j] = std::log1p(signal / (s.noise() + interference / pg));
            tier[j] = real.stations[win].tier;
        }
    });

    BarssResult out;
    out.realizations = n;
    out.tau_grid = plan.tau_grid;
    out.rates.assign(K, {});
    std::vector<std::size_t> count(K, 0);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        out.rates[tier[j]].push_back(rate[j]);
        ++count[tier[j]];
        sum += rate[j];
        out.resampled += static_cast<std::size_t>(retries[j]);
    }
    out.ergodic_mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double r : rate) ss += (r - out.ergodic_mean) * (r - out.ergodic_mean);
    out.ergodic_stderr = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    for (std::size_t k = 0; k < K; ++k) {
        out.association_frequency.push_back(static_cast<double>(count[k]) / n);
        std::sort(out.rates[k].begin(), out.rates[k].end());
    }
    std::sort(rate.begin(), rate.end());
    for (double tau : plan.tau_grid) out.outage_frequency.push_back(empirical_outage(rate, tau));
    out.all_rates = std::move(rate);
    return out;
}

double empirical_outage(const std::vector<double>& sorted, double tau) {
    if (sorted.empty()) return 0.0;
    const auto below = std::lower_bound(sorted.begin(), sorted.end(), tau) - sorted.begin();
    return static_cast<double>(below) / static_cast<double>(sorted.size());
}

QuantileEstimate empirical_outage_capacity(const std::vector<double>& sorted, double gamma) {
    if (sorted.empty()) return {};
    const double n = static_cast<double>(sorted.size());
    // Outage at tau counts rates strictly below tau, so the supremum is the
    // order statistic just past the allowed count.
    const auto at = [&](double pos) {
        const double clamped = std::clamp(std::floor(pos), 0.0, n - 1.0);
        return sorted[static_cast<std::size_t>(clamped)];
    };
    const double allowed = std::floor(gamma * n);
    if (allowed >= n) return {kInf, 0.0};
    const double spread = std::sqrt(n * gamma * (1.0 - gamma));
    return {sorted[static_cast<std::size_t>(allowed)], 0.5 * (at(allowed + spread) - at(allowed - spread))};
}

QuantileEstimate BarssResult::conditional_outage_capacity(std::size_t k, double gamma) const {
    return empirical_outage_capacity(rates.at(k), gamma);
}

QuantileEstimate BarssResult::outage_capacity(double gamma) const {
    return empirical_outage_capacity(all_rates, gamma);
}

QuantileEstimate BarssResult::ase(const NetworkScenario& scenario, const std::vector<double>& gamma) const {
    if (gamma.size() != scenario.size()) throw ConfigError("one target outage probability per tier is required");
    QuantileEstimate total;
    double var = 0.0;
    for (std::size_t k = 0; k < scenario.size(); ++k) {
        if (rates.at(k).empty()) continue;
        const double weight = scenario.tier(k).intensity * (1.0 - gamma[k]);
        const QuantileEstimate c = conditional_outage_capacity(k, gamma[k]);
        total.value += weight * c.value;
        var += weight * weight * c.error * c.error;
    }
    total.error = std::sqrt(var);
    return total;
}

std::vector<double> simulate_link_rates(const NetworkScenario& s, const SimulationPlan& plan, std::size_t k,
                                        double r, const ExclusionProfile& excl) {
    if (k >= s.size()) throw ConfigError("serving tier index out of range");
    const SimulationWindows w = interference_windows(s, plan, excl);
    const std::size_t n = plan.realizations;
    const TierConfig& serving = s.tier(k);
    const double signal_scale = serving.power * serving.pathloss(r);
    const double pg = s.processing_gain();
    std::vector<double> rate(n);
    for_each_block(n, [&](std::size_t begin, std::size_t end) {
        Realization real;
        for (std::size_t j = begin; j < end; ++j) {
            RandomStream rng = stream_for(plan, j, 0);
            const double signal = signal_scale * serving.fading.sample(rng);
            sample_stations(s, w, excl, true, rng, real);
            double interference = far_field_draw(plan, w, rng);
            for (double x : real.received) interference += x;
            rate[j] = std::log1p(signal / (s.noise() + interference / pg));
        }
    });
    std::sort(rate.begin(), rate.end());
    return rate;
}

}  // namespace hetnet
