#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "hetnet/errors.hpp"

namespace hetnet::numerics {

struct QuadratureSpec {
    double relative_tolerance = 1e-8;
    double absolute_floor = 1e-14;
    std::size_t max_subdivisions = 2000;

    void validate() const;
};

/// Standard normal CDF, accurate to full double precision in both tails.
double std_normal_cdf(double x);

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

struct ThresholdOptions {
    double initial = 1.0;
    double cap = 200.0;
    double relative_tolerance = 1e-6;
    double absolute_floor = 1e-12;
};

template <std::size_t N>
using Vec = std::array<double, N>;

/// Nodes and weights of a fixed composite rule: sum_j w_j f(t_j)
/// approximates the integral it was built for.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

template <std::size_t N>
struct Panel {
    double a;
    double b;
    Vec<N> value;
    double error;
    double roundoff;
    bool operator<(const Panel& other) const { return error < other.error; }
};

inline constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <std::size_t N>
Vec<N> as_vec(const Vec<N>& v) {
    return v;
}
inline Vec<1> as_vec(double v) { return {v}; }

// 21-point Gauss-Kronrod rule with the QUADPACK error heuristic, applied
// componentwise; the panel error is the sum over components.
template <std::size_t N, class F>
Panel<N> gauss_kronrod21(F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    Vec<N> fv1[10];
    Vec<N> fv2[10];
    const Vec<N> fc = as_vec(f(centre));
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        fv1[j] = as_vec(f(centre - dx));
        fv2[j] = as_vec(f(centre + dx));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    Panel<N> p{a, b, {}, 0.0, 0.0};
    for (std::size_t c = 0; c < N; ++c) {
        double resk = kWgk[10] * fc[c];
        double resg = 0.0;
        double resabs = std::abs(resk);
        for (int j = 0; j < 10; ++j) {
            const double sum = fv1[j][c] + fv2[j][c];
            resk += kWgk[j] * sum;
            resabs += kWgk[j] * (std::abs(fv1[j][c]) + std::abs(fv2[j][c]));
            if (j % 2 == 1) resg += kWg[j / 2] * sum;
        }
        const double mean = 0.5 * resk;
        double resasc = kWgk[10] * std::abs(fc[c] - mean);
        for (int j = 0; j < 10; ++j) {
            resasc += kWgk[j] * (std::abs(fv1[j][c] - mean) + std::abs(fv2[j][c] - mean));
        }
        const double scale = std::abs(half);
        resabs *= scale;
        resasc *= scale;
        double err = std::abs((resk - resg) * half);
        if (resasc != 0.0 && err != 0.0) {
            err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
        }
        const double roundoff = 50.0 * eps * resabs;
        if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(roundoff, err);
        p.value[c] = resk * half;
        p.error += err;
        p.roundoff += roundoff;
    }
    return p;
}

template <std::size_t N>
double max_abs(const Vec<N>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Globally adaptive bisection over an initial set of panels. Returns the
// final partition.
template <std::size_t N, class F>
std::vector<Panel<N>> adaptive_panels(F& f, std::span<const double> edges, const QuadratureSpec& spec,
                                      Vec<N>& total) {
    spec.validate();
    std::priority_queue<Panel<N>> heap;
    std::vector<Panel<N>> settled;
    total.fill(0.0);
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (!(edges[i + 1] > edges[i])) continue;
        Panel<N> p = gauss_kronrod21<N>(f, edges[i], edges[i + 1]);
        for (std::size_t c = 0; c < N; ++c) total[c] += p.value[c];
        total_err += p.error;
        heap.push(p);
    }
    std::size_t panels = heap.size();
    constexpr double eps = std::numeric_limits<double>::epsilon();
    while (!heap.empty()) {
        const double tol = std::max(spec.absolute_floor, spec.relative_tolerance * max_abs(total));
        if (total_err <= tol) break;
        Panel<N> worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (worst.error <= worst.roundoff || !(mid > worst.a && mid < worst.b) ||
            worst.b - worst.a <= 8.0 * eps * std::max(std::abs(worst.a), std::abs(worst.b))) {
            // Nothing left to gain by splitting: the error is roundoff.
            settled.push_back(worst);
            continue;
        }
        if (panels >= spec.max_subdivisions) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "adaptive quadrature exhausted %zu subdivisions (estimate %.6g, error %.3g)",
                          spec.max_subdivisions, max_abs(total), total_err);
            throw NonConvergent(buf);
        }
        Panel<N> left = gauss_kronrod21<N>(f, worst.a, mid);
        Panel<N> right = gauss_kronrod21<N>(f, mid, worst.b);
        for (std::size_t c = 0; c < N; ++c) total[c] += left.value[c] + right.value[c] - worst.value[c];
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }
    while (!heap.empty()) {
        settled.push_back(heap.top());
        heap.pop();
    }
    return settled;
}

template <std::size_t N, class F>
Vec<N> adaptive(F& f, std::span<const double> edges, const QuadratureSpec& spec) {
    Vec<N> total{};
    adaptive_panels<N>(f, edges, spec, total);
    return total;
}

template <class T>
double magnitude(const T& v) {
    if constexpr (std::is_arithmetic_v<T>) {
        return std::abs(v);
    } else {
        double m = 0.0;
        for (double x : v) m += std::abs(x);
        return m;
    }
}

// Rejects integrands whose far tail decays no faster than 1/t.
template <class F>
void check_tail_decay(F& f, double lower, double scale) {
    const double t1 = lower + 1e6 * scale;
    const double t2 = lower + 1e7 * scale;
    const double f1 = magnitude(f(t1));
    const double f2 = magnitude(f(t2));
    if (!std::isfinite(f1) || !std::isfinite(f2)) {
        throw NonConvergent("integrand is not finite in its tail");
    }
    constexpr double negligible = 1e-280;
    if (f2 <= negligible) return;
    if (f1 <= negligible || f2 * t2 >= f1 * t1) {
        throw NonConvergent("integrand tail decays no faster than 1/t; integral diverges");
    }
}

inline std::vector<double> finite_edges(double a, double b, std::span<const double> breakpoints) {
    std::vector<double> edges{a};
    for (double x : breakpoints) {
        if (x > a && x < b) edges.push_back(x);
    }
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

// Map t = lower + scale (u / (1 - u))^4. The fourth power keeps the mapped
// integrand bounded for tails decaying like t^-q with q > 1.25, and smooth
// for q > 1.5.
struct TailMap {
    double lower;
    double scale;

    double t(double u) const {
        const double v = u / (1.0 - u);
        return lower + scale * v * v * v * v;
    }
    double jacobian(double u) const {
        const double w = 1.0 - u;
        const double v = u / w;
        return 4.0 * scale * v * v * v / (w * w);
    }
    double u(double t) const {
        const double v = std::sqrt(std::sqrt((t - lower) / scale));
        return v / (1.0 + v);
    }
};

template <class F>
auto mapped_integrand(F& f, const TailMap& map) {
    using R = std::decay_t<decltype(f(0.0))>;
    return [&f, map](double u) -> R {
        R zero{};
        if (!(u > 0.0 && u < 1.0)) return zero;
        const R value = f(map.t(u));
        const double jac = map.jacobian(u);
        if constexpr (std::is_arithmetic_v<R>) {
            return value == 0.0 ? 0.0 : value * jac;
        } else {
            R out = value;
            for (double& x : out) x = x == 0.0 ? 0.0 : x * jac;
            return out;
        }
    };
}

inline std::vector<double> tail_edges(const TailMap& map, std::span<const double> breakpoints) {
    std::vector<double> edges{0.0};
    double last = map.lower;
    for (double x : breakpoints) {
        if (x > map.lower && std::isfinite(x)) {
            edges.push_back(map.u(x));
            last = std::max(last, x);
        }
    }
    // The map stretches panels beyond the last breakpoint, so a jump there
    // followed by a fast decay could fall between Kronrod nodes. Grade the
    // first panels geometrically.
    if (last > map.lower) {
        for (double f : {1e-3, 1e-2, 1e-1}) edges.push_back(map.u(last + (last - map.lower) * f));
    }
    edges.push_back(1.0);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

}  // namespace detail

/// Componentwise integral of a vector-valued f over [a, b].
template <std::size_t N, class F>
Vec<N> integrate_vec(F&& f, double a, double b, std::span<const double> breakpoints,
                     const QuadratureSpec& spec = {}) {
    if (a == b) return Vec<N>{};
    const std::vector<double> edges = detail::finite_edges(a, b, breakpoints);
    return detail::adaptive<N>(f, edges, spec);
}

/// Integral of f over the finite interval [a, b].
template <class F>
double integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
    if (a == b) return 0.0;
    if (b < a) return -integrate(f, b, a, spec);
    const double edges[2] = {a, b};
    return detail::adaptive<1>(f, edges, spec)[0];
}

/// Integral over [a, b] with the initial panels split at `breakpoints`
/// (values outside (a, b) are ignored).
template <class F>
double integrate(F&& f, double a, double b, std::span<const double> breakpoints,
                 const QuadratureSpec& spec = {}) {
    if (a == b) return 0.0;
    const std::vector<double> edges = detail::finite_edges(a, b, breakpoints);
    return detail::adaptive<1>(f, edges, spec)[0];
}

/// Componentwise integral of a vector-valued f over [lower, inf).
template <std::size_t N, class F>
Vec<N> integrate_semi_infinite_vec(F&& f, double lower, std::span<const double> breakpoints,
                                   const QuadratureSpec& spec = {}, double scale = 1.0) {
    if (std::isinf(lower)) return Vec<N>{};
    if (!(scale > 0.0)) throw ConfigError("integrate_semi_infinite: scale must be positive");
    detail::check_tail_decay(f, lower, scale);
    const detail::TailMap map{lower, scale};
    auto mapped = detail::mapped_integrand(f, map);
    return detail::adaptive<N>(mapped, detail::tail_edges(map, breakpoints), spec);
}

/// Integral of f over [lower, inf) after the map
/// t = lower + scale * (u / (1 - u))^4, u in [0, 1). Breakpoints in t become
/// initial panel edges; `scale` should match the length scale of f.
template <class F>
double integrate_semi_infinite(F&& f, double lower, std::span<const double> breakpoints,
                               const QuadratureSpec& spec = {}, double scale = 1.0) {
    return integrate_semi_infinite_vec<1>(f, lower, breakpoints, spec, scale)[0];
}

template <class F>
double integrate_semi_infinite(F&& f, double lower, const QuadratureSpec& spec = {},
                               double scale = 1.0) {
    return integrate_semi_infinite(f, lower, std::span<const double>{}, spec, scale);
}

/// Fixed composite rule for integrals over [lower, inf) against densities
/// shaped like f: the partition adapted to f, each panel split into
/// `refine` equal parts carrying the 21-point Kronrod nodes. Weights include
/// the map Jacobian but not f itself.
template <class F>
QuadratureRule semi_infinite_rule(F&& f, double lower, std::span<const double> breakpoints,
                                  const QuadratureSpec& spec, double scale, int refine = 2) {
    if (!(scale > 0.0)) throw ConfigError("semi_infinite_rule: scale must be positive");
    detail::check_tail_decay(f, lower, scale);
    const detail::TailMap map{lower, scale};
    auto mapped = detail::mapped_integrand(f, map);
    Vec<1> total{};
    auto panels = detail::adaptive_panels<1>(mapped, detail::tail_edges(map, breakpoints), spec, total);
    std::sort(panels.begin(), panels.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    QuadratureRule rule;
    for (const auto& p : panels) {
        const double width = (p.b - p.a) / refine;
        for (int s = 0; s < refine; ++s) {
            const double a = p.a + s * width;
            const double centre = a + 0.5 * width;
            const double half = 0.5 * width;
            for (int j = 0; j < 21; ++j) {
                const double x = j < 10 ? -detail::kXgk[j] : (j < 20 ? detail::kXgk[j - 10] : 0.0);
                const double wk = j < 10 ? detail::kWgk[j] : (j < 20 ? detail::kWgk[j - 10] : detail::kWgk[10]);
                const double u = centre + half * x;
                if (!(u > 0.0 && u < 1.0)) continue;
                rule.nodes.push_back(map.t(u));
                rule.weights.push_back(wk * half * map.jacobian(u));
            }
        }
    }
    return rule;
}

/// inf{x >= 0 : g(x) = y} for continuous non-increasing g. Returns 0 when
/// y > g(0) and +inf when y lies below every value g attains.
template <class G>
double invert_monotone_decreasing(G&& g, double y, Interval hint = {}) {
    const double g0 = g(0.0);
    if (y >= g0) return 0.0;
    double lo = 0.0;
    double hi = std::max(hint.hi, 1e-6);
    if (hint.lo > 0.0 && g(hint.lo) > y) lo = hint.lo;
    while (g(hi) > y) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) return std::numeric_limits<double>::infinity();
    }
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        if (g(mid) > y) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// sup{t >= 0 : g(t) <= gamma} for non-decreasing g, by geometric bracket
/// expansion followed by bisection.
template <class G>
double sup_threshold(G&& g, double gamma, const ThresholdOptions& opt = {}) {
    if (g(0.0) > gamma) return 0.0;
    double lo = 0.0;
    double hi = opt.initial;
    while (g(hi) <= gamma) {
        lo = hi;
        hi *= 2.0;
        if (hi > opt.cap) {
            throw Unbounded("threshold search exceeded cap " + std::to_string(opt.cap) +
                            " without crossing the target");
        }
    }
    while (hi - lo > opt.relative_tolerance * std::max(lo, opt.absolute_floor)) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) <= gamma) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

}  // namespace hetnet::numerics
