#include "hetnet/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "hetnet/numerics.hpp"
#include "overloaded.hpp"

namespace hetnet {
namespace {

using detail::Overloaded;

constexpr double kInf = std::numeric_limits<double>::infinity();

double table_value(const TabulatedPathLoss& tab, double tail_slope, double t) {
    const auto& ts = tab.t;
    const auto& gs = tab.g;
    if (t >= ts.back()) return gs.back() * std::pow(t / ts.back(), -tail_slope);
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - ts.begin());
    const double w = (t - ts[j - 1]) / (ts[j] - ts[j - 1]);
    return gs[j - 1] + w * (gs[j] - gs[j - 1]);
}

}  // namespace

PathLossModel::PathLossModel(Variant v) : v_(std::move(v)) {
    std::visit(Overloaded{
                   [](const BoundedPowerLaw& m) {
                       if (!(m.alpha > 2.0) || !std::isfinite(m.alpha)) {
                           throw ConfigError("bounded power-law exponent must exceed 2");
                       }
                   },
                   [](const StretchedExponential& m) {
                       if (!(m.alpha > 0.0) || !std::isfinite(m.alpha)) {
                           throw ConfigError("stretched-exponential rate must be positive");
                       }
                       if (!(m.beta > 0.0 && m.beta <= 1.0)) {
                           throw ConfigError("stretched-exponential shape must lie in (0, 1]");
                       }
                   },
                   [this](const TabulatedPathLoss& m) {
                       if (m.t.size() != m.g.size() || m.t.size() < 3) {
                           throw ConfigError("tabulated path loss needs at least 3 (t, g) pairs");
                       }
                       if (m.t.front() != 0.0) throw ConfigError("tabulated path loss must start at t = 0");
                       for (std::size_t i = 1; i < m.t.size(); ++i) {
                           if (!(m.t[i] > m.t[i - 1])) {
                               throw ConfigError("tabulated path-loss distances must increase strictly");
                           }
                           if (!(m.g[i] < m.g[i - 1]) || !(m.g[i] > 0.0)) {
                               throw ConfigError(
                                   "tabulated path-loss gains must be positive and strictly decreasing");
                           }
                       }
                       if (!std::isfinite(m.g.front())) throw ConfigError("tabulated G(0) must be finite");
                       const std::size_t n = m.t.size();
                       tail_slope_ = -std::log(m.g[n - 1] / m.g[n - 2]) / std::log(m.t[n - 1] / m.t[n - 2]);
                       if (!(tail_slope_ > 2.0)) {
                           throw ConfigError("tabulated path loss must end with a log-log slope steeper than -2");
                       }
                   },
               },
               v_);
}

double PathLossModel::operator()(double t) const {
    return std::visit(Overloaded{
                          [t](const BoundedPowerLaw& m) { return 1.0 / (1.0 + std::pow(t, m.alpha)); },
                          [t](const StretchedExponential& m) { return std::exp(-m.alpha * std::pow(t, m.beta)); },
                          [this, t](const TabulatedPathLoss& m) { return table_value(m, tail_slope_, t); },
                      },
                      v_);
}

double PathLossModel::inverse(double y) const {
    if (y >= at_origin()) return 0.0;
    if (!(y > 0.0)) return kInf;
    return std::visit(Overloaded{
                          [y](const BoundedPowerLaw& m) { return std::pow((1.0 - y) / y, 1.0 / m.alpha); },
                          [y](const StretchedExponential& m) {
                              return std::pow(-std::log(y) / m.alpha, 1.0 / m.beta);
                          },
                          [this, y](const TabulatedPathLoss& m) {
                              if (y <= m.g.back()) {
                                  return m.t.back() * std::pow(y / m.g.back(), -1.0 / tail_slope_);
                              }
                              return numerics::invert_monotone_decreasing(*this, y, {0.0, m.t.back()});
                          },
                      },
                      v_);
}

double PathLossModel::at_origin() const {
    if (const auto* tab = std::get_if<TabulatedPathLoss>(&v_)) return tab->g.front();
    return 1.0;
}

double PathLossModel::tail_exponent() const {
    return std::visit(Overloaded{
                          [](const BoundedPowerLaw& m) { return m.alpha; },
                          [](const StretchedExponential&) { return kInf; },
                          [this](const TabulatedPathLoss&) { return tail_slope_; },
                      },
                      v_);
}

std::vector<double> PathLossModel::breakpoints() const {
    if (const auto* tab = std::get_if<TabulatedPathLoss>(&v_)) {
        return {tab->t.begin() + 1, tab->t.end()};
    }
    return {};
}

std::string PathLossModel::describe() const {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&os](const BoundedPowerLaw& m) { os << "bounded_power_law(alpha=" << m.alpha << ")"; },
                   [&os](const StretchedExponential& m) {
                       os << "stretched_exponential(alpha=" << m.alpha << ", beta=" << m.beta << ")";
                   },
                   [&os](const TabulatedPathLoss& m) { os << "tabulated(" << m.t.size() << " nodes)"; },
               },
               v_);
    return os.str();
}

FadingModel::FadingModel(Variant v) : v_(v) {
    if (const auto* n = std::get_if<NakagamiPower>(&v_)) {
        if (!(n->m >= 0.5) || !std::isfinite(n->m)) throw ConfigError("Nakagami shape m must be at least 0.5");
    }
    if (const auto* d = std::get_if<DeterministicGain>(&v_)) {
        if (!(d->h > 0.0) || !std::isfinite(d->h)) throw ConfigError("deterministic gain must be positive");
    }
}

double FadingModel::moment(int n) const {
    if (n < 1 || n > 4) throw ConfigError("fading moment order must lie in 1..4");
    return std::visit(Overloaded{
                          [n](const RayleighPower&) { return std::tgamma(n + 1.0); },
                          [n](const NakagamiPower& f) {
                              double prod = 1.0;
                              for (int j = 0; j < n; ++j) prod *= (f.m + j) / f.m;
                              return prod;
                          },
                          [n](const DeterministicGain& f) { return std::pow(f.h, n); },
                      },
                      v_);
}

double FadingModel::pdf(double h) const {
    if (h < 0.0) return 0.0;
    return std::visit(Overloaded{
                          [h](const RayleighPower&) { return std::exp(-h); },
                          [h](const NakagamiPower& f) {
                              if (h == 0.0) return f.m == 1.0 ? 1.0 : (f.m < 1.0 ? kInf : 0.0);
                              return std::exp((f.m - 1.0) * std::log(h) - f.m * h + f.m * std::log(f.m) - std::lgamma(f.m));
                          },
                          [](const DeterministicGain&) { return 0.0; },
                      },
                      v_);
}

double FadingModel::survival(double h) const {
    if (h <= 0.0) return 1.0;
    return std::visit(Overloaded{
                          [h](const RayleighPower&) { return std::exp(-h); },
                          [h](const NakagamiPower& f) { return boost::math::gamma_q(f.m, f.m * h); },
                          [h](const DeterministicGain& f) { return h < f.h ? 1.0 : 0.0; },
                      },
                      v_);
}

double FadingModel::deterministic_gain() const {
    if (const auto* d = std::get_if<DeterministicGain>(&v_)) return d->h;
    throw Error("fading model is not deterministic");
}

std::string FadingModel::describe() const {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&os](const RayleighPower&) { os << "rayleigh"; },
                   [&os](const NakagamiPower& f) { os << "nakagami(m=" << f.m << ")"; },
                   [&os](const DeterministicGain& f) { os << "deterministic(h=" << f.h << ")"; },
               },
               v_);
    return os.str();
}

}  // namespace hetnet
