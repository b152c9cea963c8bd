#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "memsim/errors.hpp"

namespace memsim {

struct RootResult {
    double x = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/// Safeguarded Newton iteration on a bracket [lo, hi] with f(lo), f(hi) of
/// opposite sign (or zero). `fdf(x)` returns {f(x), f'(x)}. Any Newton step
/// that leaves the current bracket, or has an unusable slope, is replaced by
/// bisection, so the bracket shrinks on every iteration. Iterates to full
/// precision and then requires |f| <= f_tol.
template <typename FDF>
RootResult newton_bisect(FDF&& fdf, double lo, double hi, double x0, double f_tol, int max_iter) {
    auto [f_lo, df_lo] = fdf(lo);
    auto [f_hi, df_hi] = fdf(hi);
    (void)df_lo;
    (void)df_hi;
    if (f_lo == 0.0) return {lo, 0.0, 0};
    if (f_hi == 0.0) return {hi, 0.0, 0};
    if ((f_lo > 0.0) == (f_hi > 0.0)) {
        throw Error(ErrorKind::NoConvergence, "root not bracketed on [" + std::to_string(lo) + ", " +
                                                  std::to_string(hi) + "]");
    }
    // Orient so that f(lo) < 0 < f(hi).
    if (f_lo > 0.0) std::swap(lo, hi);

    constexpr double eps = std::numeric_limits<double>::epsilon();
    double x = (x0 > std::min(lo, hi) && x0 < std::max(lo, hi)) ? x0 : 0.5 * (lo + hi);
    double best_x = x;
    double best_f = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= max_iter; ++it) {
        const auto [f, df] = fdf(x);
        if (std::abs(f) < std::abs(best_f)) {
            best_f = f;
            best_x = x;
        }
        if (f == 0.0) return {x, 0.0, it};
        (f < 0.0 ? lo : hi) = x;

        double next = x - f / df;
        const double a = std::min(lo, hi);
        const double b = std::max(lo, hi);
        if (!std::isfinite(next) || next <= a || next >= b) next = 0.5 * (lo + hi);

        const double scale = std::max(std::abs(x), std::abs(next));
        const bool stalled = std::abs(next - x) <= 2.0 * eps * scale || next == x;
        const bool collapsed = (b - a) <= 4.0 * eps * std::max(std::abs(a), std::abs(b));
        x = next;
        if (stalled || collapsed) {
            const auto [f_last, df_last] = fdf(x);
            (void)df_last;
            if (std::abs(f_last) < std::abs(best_f)) {
                best_f = f_last;
                best_x = x;
            }
            if (std::abs(best_f) <= f_tol) return {best_x, best_f, it};
            break;
        }
    }
    if (std::abs(best_f) <= f_tol) return {best_x, best_f, max_iter};
    throw Error(ErrorKind::NoConvergence,
                "newton/bisection residual " + std::to_string(std::abs(best_f)) + " above tolerance");
}

}  // namespace memsim
