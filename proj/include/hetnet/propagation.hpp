#pragma once

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hetnet/errors.hpp"

namespace hetnet {

/// G(t) = 1 / (1 + t^alpha), alpha > 2.
struct BoundedPowerLaw {
    double alpha = 4.0;
};

/// G(t) = exp(-alpha t^beta), alpha > 0, beta in (0, 1].
struct StretchedExponential {
    double alpha = 1.0;
    double beta = 1.0;
};

/// Strictly decreasing table starting at t = 0, linearly interpolated.
/// Beyond the last node the curve continues as a power law whose exponent
/// is the log-log slope of the final segment; that exponent must exceed 2.
struct TabulatedPathLoss {
    std::vector<double> t;
    std::vector<double> g;
};

class PathLossModel {
public:
    using Variant = std::variant<BoundedPowerLaw, StretchedExponential, TabulatedPathLoss>;

    PathLossModel(Variant v);  // NOLINT(google-explicit-constructor)
    PathLossModel(BoundedPowerLaw m) : PathLossModel(Variant{m}) {}  // NOLINT
    PathLossModel(StretchedExponential m) : PathLossModel(Variant{m}) {}  // NOLINT
    PathLossModel(TabulatedPathLoss m) : PathLossModel(Variant{std::move(m)}) {}  // NOLINT

    double operator()(double t) const;
    /// inf{x >= 0 : G(x) = y}; 0 when y >= G(0), +inf when y <= 0.
    double inverse(double y) const;
    double at_origin() const;
    /// Power-law decay order of the tail; +inf for stretched exponentials.
    double tail_exponent() const;
    /// Points where G is not smooth (table nodes).
    std::vector<double> breakpoints() const;
    const Variant& variant() const { return v_; }
    std::string describe() const;

private:
    Variant v_;
    double tail_slope_ = 0.0;
};

inline double attenuation(const PathLossModel& model, double t) { return model(t); }
inline double attenuation_inverse(const PathLossModel& model, double y) { return model.inverse(y); }

struct RayleighPower {};

/// Power gain Gamma(m, 1/m), unit mean.
struct NakagamiPower {
    double m = 1.0;
};

struct DeterministicGain {
    double h = 1.0;
};

class FadingModel {
public:
    using Variant = std::variant<RayleighPower, NakagamiPower, DeterministicGain>;

    FadingModel(Variant v = RayleighPower{});  // NOLINT(google-explicit-constructor)
    FadingModel(RayleighPower f) : FadingModel(Variant{f}) {}  // NOLINT
    FadingModel(NakagamiPower f) : FadingModel(Variant{f}) {}  // NOLINT
    FadingModel(DeterministicGain f) : FadingModel(Variant{f}) {}  // NOLINT

    /// E[H^n] for n in 1..4.
    double moment(int n) const;
    /// Density of the power gain; zero everywhere for deterministic gains.
    double pdf(double h) const;
    /// P(H > h).
    double survival(double h) const;
    bool is_deterministic() const { return std::holds_alternative<DeterministicGain>(v_); }
    double deterministic_gain() const;
    const Variant& variant() const { return v_; }
    std::string describe() const;

    template <class URBG>
    double sample(URBG& rng) const {
        if (const auto* n = std::get_if<NakagamiPower>(&v_)) {
            std::gamma_distribution<double> gamma(n->m, 1.0 / n->m);
            return gamma(rng);
        }
        if (const auto* d = std::get_if<DeterministicGain>(&v_)) return d->h;
        std::exponential_distribution<double> expo(1.0);
        return expo(rng);
    }

private:
    Variant v_;
};

inline double fading_power_moment(const FadingModel& model, int n) { return model.moment(n); }

template <class URBG>
double fading_sample(const FadingModel& model, URBG& rng) {
    return model.sample(rng);
}

}  // namespace hetnet
