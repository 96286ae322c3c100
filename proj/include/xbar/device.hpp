#pragma once

// Cell models for a crosspoint: the intrinsically rectifying memristive
// device, its linear (non-rectifying) counterpart, and a sinh selector in
// series with a fixed resistor (1S1M). Everything here is a pure function.

#include "xbar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <type_traits>
#include <variant>
#include <vector>

namespace xbar {

struct DeviceParams {
    double r_off = 5e8;   // Ohm
    double r_on = 5e5;    // Ohm
    double v_th = 1.5;    // V
    double alpha = 2.5e8; // 1/(V s)
    double beta = 0.0;    // 1/(V s)
    bool rectifying = true;

    double ratio() const noexcept { return r_off / r_on; }

    void validate() const {
        if (!(r_on > 0.0) || !(r_off >= r_on))
            throw InvalidConfig("device requires r_off >= r_on > 0");
        if (!(v_th > 0.0) || !(alpha >= 0.0) || !(beta >= 0.0))
            throw InvalidConfig("device requires v_th > 0, alpha >= 0, beta >= 0");
    }
};

/// Normalized state; w = 0 is R_OFF, w = 1 is R_ON.
struct DeviceState {
    double w = 0.0;

    static constexpr DeviceState lrs() noexcept { return {1.0}; }
    static constexpr DeviceState hrs() noexcept { return {0.0}; }
};

struct SelectorParams {
    double gamma = 1e-8; // A
    double k = 1.0;
    double p = 18.4;     // 1/V

    double exponent() const noexcept { return k * p; }

    void validate() const {
        if (!(gamma > 0.0) || !(k > 0.0) || !(p > 0.0))
            throw InvalidConfig("selector requires gamma, k, p > 0");
    }
};

struct RectifyingMemristor {
    DeviceParams params;
    DeviceState state;
};

struct LinearMemristor {
    DeviceParams params;
    DeviceState state;
};

struct SelectorPlusResistor {
    SelectorParams selector;
    double resistance; // one of r_on / r_off of the paired memristive device
};

using CellModel = std::variant<RectifyingMemristor, LinearMemristor, SelectorPlusResistor>;

/// Forward/reverse conductance blend happens over [0, kRectifyWindow].
inline constexpr double kRectifyWindow = 1e-3;

/// Residual bound for the selector/resistor internal node (A).
inline constexpr double kSeriesTolerance = 1e-12;

inline double memristance(const DeviceParams& params, DeviceState state, double v) {
    if (params.rectifying && v < 0.0)
        return params.r_off;
    return params.r_off * std::pow(params.r_on / params.r_off, state.w);
}

inline double selector_current(const SelectorParams& sel, double v) {
    return sel.gamma * std::sinh(sel.exponent() * v);
}

namespace detail {

// Reverse branch is exactly v/r_rev for v <= 0 and the forward branch is
// exactly v/r_fwd for v >= window. In between, a cubic Hermite segment
// matches both values and slopes, so I(v) is C1 and monotone.
struct RectifiedIV {
    double current;
    double conductance;
};

inline RectifiedIV rectified_iv(double r_fwd, double r_rev, double v) {
    const double g_fwd = 1.0 / r_fwd;
    const double g_rev = 1.0 / r_rev;
    if (v <= 0.0 || r_fwd == r_rev)
        return {v / r_rev, g_rev};
    if (v >= kRectifyWindow)
        return {v / r_fwd, g_fwd};
    const double t = v / kRectifyWindow;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double current = kRectifyWindow * (g_rev * (t3 - 2.0 * t2 + t) + g_fwd * (2.0 * t2 - t3));
    const double conductance = g_rev * (3.0 * t2 - 4.0 * t + 1.0) + g_fwd * (4.0 * t - 3.0 * t2);
    return {current, conductance};
}

struct SeriesPoint {
    double selector_voltage; // magnitude, for |v|
    double current;          // magnitude
};

// Balances gamma*sinh(a*x) = (|v| - x)/R for the selector voltage x in [0, |v|].
// f(x) is strictly increasing, so a bracketed Newton with bisection fallback
// always makes progress.
inline SeriesPoint solve_series(const SelectorPlusResistor& cell, double magnitude) {
    const double a = cell.selector.exponent();
    const double gamma = cell.selector.gamma;
    const double r = cell.resistance;
    if (magnitude == 0.0)
        return {0.0, 0.0};
    if (r == 0.0)
        return {magnitude, gamma * std::sinh(a * magnitude)};

    auto residual = [&](double x) { return gamma * std::sinh(a * x) - (magnitude - x) / r; };

    double lo = 0.0;
    double hi = magnitude;
    // Current can never exceed |v|/R, which bounds the selector voltage.
    double x = std::min(magnitude, std::asinh(magnitude / (r * gamma)) / a);
    double f = residual(x);
    for (int it = 0; it < 200; ++it) {
        if (f == 0.0)
            break;
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        const double slope = gamma * a * std::cosh(a * x) + 1.0 / r;
        double next = x - f / slope;
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (next == x || hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * hi)
            break;
        x = next;
        f = residual(x);
    }
    if (!(std::abs(f) <= kSeriesTolerance))
        throw SeriesSolveFailure(magnitude, f);
    const double current = x <= 0.5 * magnitude ? (magnitude - x) / r : gamma * std::sinh(a * x);
    return {x, current};
}

} // namespace detail

struct CurrentAndConductance {
    double current;
    double conductance;
};

/// Current and small-signal conductance in one evaluation (the Newton stamp).
inline CurrentAndConductance cell_iv(const CellModel& model, double v) {
    return std::visit(
        [v](const auto& cell) -> CurrentAndConductance {
            using T = std::decay_t<decltype(cell)>;
            if constexpr (std::is_same_v<T, RectifyingMemristor>) {
                const double r_fwd = cell.params.r_off * std::pow(cell.params.r_on / cell.params.r_off, cell.state.w);
                const auto iv = detail::rectified_iv(r_fwd, cell.params.r_off, v);
                return {iv.current, iv.conductance};
            } else if constexpr (std::is_same_v<T, LinearMemristor>) {
                DeviceParams linear = cell.params;
                linear.rectifying = false;
                const double g = 1.0 / memristance(linear, cell.state, v);
                return {v * g, g};
            } else {
                const auto point = detail::solve_series(cell, std::abs(v));
                const double a = cell.selector.exponent();
                const double g_sel = cell.selector.gamma * a * std::cosh(a * point.selector_voltage);
                const double g = g_sel / (1.0 + g_sel * cell.resistance);
                return {std::copysign(point.current, v), g};
            }
        },
        model);
}

inline double cell_current(const CellModel& model, double v) { return cell_iv(model, v).current; }

inline double cell_conductance(const CellModel& model, double v) { return cell_iv(model, v).conductance; }

inline double rate_of_change(const DeviceParams& params, double v) {
    if (v >= params.v_th)
        return params.alpha * (v - params.v_th);
    if (v <= -params.v_th)
        return params.alpha * (v + params.v_th);
    return params.beta * v;
}

/// One explicit step of the threshold dynamics. The bound is held while the
/// drive keeps pushing into it (w at 1 while v > 0, at 0 while v < 0).
inline DeviceState step_state(const DeviceParams& params, DeviceState state, double v, double dt) {
    if (!(dt > 0.0))
        throw InvalidConfig("step_state requires dt > 0");
    double w = state.w + rate_of_change(params, v) * dt;
    if (w >= 1.0 && v > 0.0)
        w = 1.0;
    else if (w <= 0.0 && v < 0.0)
        w = 0.0;
    return {std::clamp(w, 0.0, 1.0)};
}

struct Waveform {
    double amplitude = 2.0;  // peak, V
    double frequency = 1e7;  // Hz
    double cycles = 1.0;
};

struct IvSample {
    double t;
    double v;
    double i;
    double w;
};

/// Sinusoidal drive of a single memristive device, integrated with explicit
/// Euler. Returns steps_per_cycle * cycles + 1 samples starting at t = 0.
inline std::vector<IvSample> trace_iv(const DeviceParams& params, DeviceState initial, const Waveform& wave,
                                      std::size_t steps_per_cycle = 10000) {
    params.validate();
    if (steps_per_cycle < 1000)
        throw InvalidConfig("trace_iv requires at least 1000 steps per cycle");
    if (!(wave.frequency > 0.0) || !(wave.cycles > 0.0))
        throw InvalidConfig("trace_iv requires positive frequency and cycle count");

    const double dt = 1.0 / (wave.frequency * static_cast<double>(steps_per_cycle));
    const auto steps = static_cast<std::size_t>(std::llround(wave.cycles * static_cast<double>(steps_per_cycle)));
    const double omega = 2.0 * std::numbers::pi * wave.frequency;

    auto cell_at = [&](DeviceState s) -> CellModel {
        if (params.rectifying)
            return RectifyingMemristor{params, s};
        return LinearMemristor{params, s};
    };

    std::vector<IvSample> samples;
    samples.reserve(steps + 1);
    DeviceState state = initial;
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double v = wave.amplitude * std::sin(omega * t);
        samples.push_back({t, v, cell_current(cell_at(state), v), state.w});
        if (k == steps)
            break;
        state = step_state(params, state, v, dt);
    }
    return samples;
}

} // namespace xbar
