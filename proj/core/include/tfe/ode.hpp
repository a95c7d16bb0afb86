#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

namespace tfe {

struct OdeOptions {
    double rtol = 1e-12;
    double atol = 1e-14;
    double h_init = 0.0;  ///< 0: pick from the interval length
    double h_min = 0.0;   ///< 0: relative to the interval length
    std::size_t max_steps = 200000;
};

enum class OdeStatus { Done, Stopped, Invalid, StepUnderflow, TooManySteps };

template <std::size_t N, class T = double>
struct OdeResult {
    OdeStatus status = OdeStatus::Done;
    T t = 0;
    std::array<T, N> y{};
    std::size_t steps = 0;
};

/// Dormand-Prince 5(4) from t0 to t1 (either direction).
/// `valid(t, y)` rejects a trial state; the step is halved and retried, and the run
/// ends with Invalid when the step cannot shrink further.
/// `stop(t, y)` ends integration early with Stopped after an accepted step.
/// `observe(t, y)` is called after every accepted step.
/// T may be long double for trajectories that amplify rounding.
template <std::size_t N, class T, class Rhs, class Valid, class Stop, class Observe>
OdeResult<N, T> dopri5(Rhs&& rhs, std::type_identity_t<T> t0, std::type_identity_t<T> t1,
                       std::array<T, N> y0, const OdeOptions& opt, Valid&& valid, Stop&& stop,
                       Observe&& observe) {
    using State = std::array<T, N>;
    constexpr T c2 = T(1) / 5, c3 = T(3) / 10, c4 = T(4) / 5, c5 = T(8) / 9;
    constexpr T a21 = T(1) / 5;
    constexpr T a31 = T(3) / 40, a32 = T(9) / 40;
    constexpr T a41 = T(44) / 45, a42 = T(-56) / 15, a43 = T(32) / 9;
    constexpr T a51 = T(19372) / 6561, a52 = T(-25360) / 2187, a53 = T(64448) / 6561,
                a54 = T(-212) / 729;
    constexpr T a61 = T(9017) / 3168, a62 = T(-355) / 33, a63 = T(46732) / 5247,
                a64 = T(49) / 176, a65 = T(-5103) / 18656;
    constexpr T b1 = T(35) / 384, b3 = T(500) / 1113, b4 = T(125) / 192, b5 = T(-2187) / 6784,
                b6 = T(11) / 84;
    constexpr T e1 = T(71) / 57600, e3 = T(-71) / 16695, e4 = T(71) / 1920,
                e5 = T(-17253) / 339200, e6 = T(22) / 525, e7 = T(-1) / 40;

    OdeResult<N, T> res;
    res.t = t0;
    res.y = y0;
    const T span = t1 - t0;
    if (span == 0) return res;
    const T dir = span > 0 ? 1 : -1;
    const T len = std::abs(span);
    T h = opt.h_init > 0 ? T(opt.h_init) : len * T(1e-3);
    const T h_min = opt.h_min > 0 ? T(opt.h_min) : len * T(1e-15);
    const T rtol = opt.rtol, atol = opt.atol;

    State k1, k2, k3, k4, k5, k6, k7, tmp, ynew;
    T t = t0;
    State y = y0;
    rhs(t, y, k1);
    auto combo = [&](const State& base, T hh, std::initializer_list<std::pair<const State*, T>> terms) {
        State out = base;
        for (const auto& [k, c] : terms) {
            for (std::size_t i = 0; i < N; ++i) out[i] += hh * c * (*k)[i];
        }
        return out;
    };

    while (res.steps < opt.max_steps) {
        const T remaining = std::abs(t1 - t);
        if (remaining <= 0) break;
        bool last = false;
        if (h >= remaining) {
            h = remaining;
            last = true;
        }
        const T hs = dir * h;

        tmp = combo(y, hs, {{&k1, a21}});
        if (!valid(t + c2 * hs, tmp)) goto shrink;
        rhs(t + c2 * hs, tmp, k2);
        tmp = combo(y, hs, {{&k1, a31}, {&k2, a32}});
        if (!valid(t + c3 * hs, tmp)) goto shrink;
        rhs(t + c3 * hs, tmp, k3);
        tmp = combo(y, hs, {{&k1, a41}, {&k2, a42}, {&k3, a43}});
        if (!valid(t + c4 * hs, tmp)) goto shrink;
        rhs(t + c4 * hs, tmp, k4);
        tmp = combo(y, hs, {{&k1, a51}, {&k2, a52}, {&k3, a53}, {&k4, a54}});
        if (!valid(t + c5 * hs, tmp)) goto shrink;
        rhs(t + c5 * hs, tmp, k5);
        tmp = combo(y, hs, {{&k1, a61}, {&k2, a62}, {&k3, a63}, {&k4, a64}, {&k5, a65}});
        if (!valid(t + hs, tmp)) goto shrink;
        rhs(t + hs, tmp, k6);
        ynew = combo(y, hs, {{&k1, b1}, {&k3, b3}, {&k4, b4}, {&k5, b5}, {&k6, b6}});
        {
            const T tnew = last ? T(t1) : t + hs;
            if (!valid(tnew, ynew)) goto shrink;
            rhs(tnew, ynew, k7);
            T err = 0;
            for (std::size_t i = 0; i < N; ++i) {
                const T ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                        e6 * k6[i] + e7 * k7[i]);
                const T sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                err = std::max(err, std::abs(ei) / sc);
            }
            if (!std::isfinite(err)) goto shrink;
            if (err <= 1.0) {
                t = tnew;
                y = ynew;
                k1 = k7;
                ++res.steps;
                observe(t, y);
                res.t = t;
                res.y = y;
                if (stop(t, y)) {
                    res.status = OdeStatus::Stopped;
                    return res;
                }
                if (last) {
                    res.status = OdeStatus::Done;
                    return res;
                }
                const T fac = err == 0 ? T(5) : std::clamp(T(0.9) * std::pow(err, T(-0.2)), T(0.2), T(5));
                h *= fac;
                continue;
            }
            h *= std::clamp(T(0.9) * std::pow(err, T(-0.2)), T(0.1), T(0.9));
            if (h < h_min) {
                res.status = OdeStatus::StepUnderflow;
                return res;
            }
            continue;
        }
    shrink:
        h *= 0.5;
        if (h < h_min) {
            res.status = OdeStatus::Invalid;
            return res;
        }
    }
    res.status = res.steps >= opt.max_steps ? OdeStatus::TooManySteps : OdeStatus::Done;
    return res;
}

template <std::size_t N, class T, class Rhs>
OdeResult<N, T> dopri5(Rhs&& rhs, std::type_identity_t<T> t0, std::type_identity_t<T> t1,
                       std::array<T, N> y0, const OdeOptions& opt = {}) {
    auto yes = [](T, const std::array<T, N>&) { return true; };
    auto no = [](T, const std::array<T, N>&) { return false; };
    auto none = [](T, const std::array<T, N>&) {};
    return dopri5<N, T>(rhs, t0, t1, y0, opt, yes, no, none);
}

}  // namespace tfe
