#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "curvres/error.hpp"

namespace curvres {

struct OdeOptions {
    double rtol = 1e-12;
    double atol = 1e-14;
    std::size_t max_steps = 2'000'000;
};

template <std::size_t D>
using OdeState = std::array<double, D>;

namespace detail {

template <std::size_t D>
inline OdeState<D> axpy(const OdeState<D>& y, double h, std::initializer_list<std::pair<double, const OdeState<D>*>> terms)
{
    OdeState<D> out = y;
    for (const auto& [c, k] : terms)
        for (std::size_t i = 0; i < D; ++i) out[i] += h * c * (*k)[i];
    return out;
}

}  // namespace detail

/// Dormand-Prince 5(4) integration of y' = f(x, y) from a to b with local
/// error control.  `on_step(x, y)` is called after every accepted step
/// (including the final one at b).  Throws NumericalError on step-size
/// underflow, step-count overflow or non-finite state.
template <std::size_t D, class Rhs, class OnStep>
OdeState<D> dopri5(Rhs&& f, OdeState<D> y, double a, double b, const OdeOptions& opt, OnStep&& on_step,
                   double first_step = 0.0)
{
    if (a == b) return y;
    const double dir = b > a ? 1.0 : -1.0;
    const double span = std::abs(b - a);
    double h = first_step > 0.0 ? std::min(first_step, span) : std::min(span, 1e-2 * std::max(span, 1e-3));
    double x = a;

    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeState<D> k1 = f(x, y);
    std::size_t steps = 0;
    while (dir * (b - x) > 0.0) {
        if (++steps > opt.max_steps) throw NumericalError("ODE integration exceeded the step limit");
        bool last = false;
        if (h >= std::abs(b - x)) {
            h = std::abs(b - x);
            last = true;
        }
        const double hs = dir * h;
        using detail::axpy;
        const OdeState<D> k2 = f(x + c2 * hs, axpy<D>(y, hs, {{a21, &k1}}));
        const OdeState<D> k3 = f(x + c3 * hs, axpy<D>(y, hs, {{a31, &k1}, {a32, &k2}}));
        const OdeState<D> k4 = f(x + c4 * hs, axpy<D>(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const OdeState<D> k5 = f(x + c5 * hs, axpy<D>(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const OdeState<D> k6 =
            f(x + hs, axpy<D>(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const OdeState<D> ynew = axpy<D>(y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const OdeState<D> k7 = f(x + hs, ynew);

        double err = 0.0;
        for (std::size_t i = 0; i < D; ++i) {
            const double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err = std::max(err, std::abs(e) / sc);
        }
        if (!std::isfinite(err)) throw NumericalError("ODE integration produced a non-finite state");

        if (err <= 1.0) {
            x = last ? b : x + hs;
            y = ynew;
            k1 = k7;
            on_step(x, y);
            const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h *= fac;
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            if (h < 1e-14 * std::max(1.0, std::abs(x))) throw NumericalError("ODE step size underflow");
        }
    }
    return y;
}

template <std::size_t D, class Rhs>
OdeState<D> dopri5(Rhs&& f, OdeState<D> y, double a, double b, const OdeOptions& opt = {})
{
    return dopri5<D>(std::forward<Rhs>(f), y, a, b, opt, [](double, const OdeState<D>&) {});
}

/// Integrates across a grid of abscissae and records the state at every grid
/// point.  `out[k]` receives the state at `grid[k]`.
template <std::size_t D, class Rhs>
void integrate_on_grid(Rhs&& f, const OdeState<D>& y0, std::span<const double> grid, std::span<OdeState<D>> out,
                       const OdeOptions& opt = {})
{
    if (grid.empty()) return;
    if (out.size() != grid.size()) throw ContractError("integrate_on_grid: output size mismatch");
    out[0] = y0;
    OdeState<D> y = y0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        y = dopri5<D>(f, y, grid[k], grid[k + 1], opt, [](double, const OdeState<D>&) {},
                      std::abs(grid[k + 1] - grid[k]));
        out[k + 1] = y;
    }
}

}  // namespace curvres
