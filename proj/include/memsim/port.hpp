#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>
#include <utility>

#include "memsim/device_state.hpp"
#include "memsim/model.hpp"
#include "memsim/root_find.hpp"

namespace memsim {

struct PortOptions {
    double newton_tol = 1e-12;  ///< relative residual, floored at the device's current scale
    int newton_max_iter = 100;
};

/// Completed terminal pair. For Pickett, v_g is the voltage across the gap;
/// other models report v_g == v.
struct PortPoint {
    double v = 0.0;
    double i = 0.0;
    double v_g = 0.0;
};

/// Gap voltage satisfying v_m = v_g + i(w, v_g) * R_S.
inline double solve_gap_voltage(double w_m, double v_m, const PickettParams& p, const PortOptions& opt = {}) {
    if (v_m == 0.0) return 0.0;
    if (p.r_s == 0.0) return v_m;
    const double target = std::abs(v_m);
    const auto window = pickett_operating_window(w_m, p);
    const double hi = std::min(target, window.v_peak);
    auto fdf = [&](double a) {
        const auto jet = pickett_current_jet(w_m, a, p);
        return std::pair{a + jet.current * p.r_s - target, 1.0 + jet.conductance * p.r_s};
    };
    if (fdf(hi).first < 0.0) {
        throw Error(ErrorKind::OutOfValidityRange,
                    "pickett: |v_m|=" + std::to_string(target) +
                        " V is beyond the tunnel-current operating window at w=" +
                        std::to_string(m_to_nm(w_m)) + " nm");
    }
    const double f_tol = opt.newton_tol * std::max(1.0, target);
    const auto root = newton_bisect(fdf, 0.0, hi, 0.5 * hi, f_tol, opt.newton_max_iter);
    return sign_of(v_m) * root.x;
}

/// Gap voltage at which the tunnel current equals i_m.
inline double solve_gap_for_current(double w_m, double i_m, const PickettParams& p, const PortOptions& opt = {}) {
    if (i_m == 0.0) return 0.0;
    const double target = std::abs(i_m);
    const auto window = pickett_operating_window(w_m, p);
    if (target > window.i_peak) {
        throw Error(ErrorKind::OutOfValidityRange,
                    "pickett: |i|=" + std::to_string(target) + " A exceeds the peak tunnel current " +
                        std::to_string(window.i_peak) + " A at w=" + std::to_string(m_to_nm(w_m)) + " nm");
    }
    auto fdf = [&](double a) {
        const auto jet = pickett_current_jet(w_m, a, p);
        return std::pair{jet.current - target, jet.conductance};
    };
    // The tunnel formula loses relative accuracy as v_g -> 0 (its two exponential
    // terms cancel), so the residual tolerance is floored at the peak current.
    const double f_tol = opt.newton_tol * std::max(target, window.i_peak);
    const auto root = newton_bisect(fdf, 0.0, window.v_peak, 0.5 * window.v_peak, f_tol, opt.newton_max_iter);
    return sign_of(i_m) * root.x;
}

/// Voltage across a Yang device carrying current i_m at normalized state x.
inline double solve_yang_voltage(double x, double i_m, const YangParams& p, const PortOptions& opt = {}) {
    if (i_m == 0.0) return 0.0;
    auto fdf = [&](double v) { return std::pair{yang_current(x, v, p) - i_m, yang_conductance(x, v, p)}; };
    const double v_cap = p.arg_cap / std::max({p.delta, p.gamma, 1e-300});
    double lo = -1.0;
    double hi = 1.0;
    while (fdf(hi).first < 0.0) {
        if (hi >= v_cap) throw Error(ErrorKind::Overflow, "yang: requested current beyond exp cap");
        lo = hi;
        hi = std::min(2.0 * hi, v_cap);
    }
    while (fdf(lo).first > 0.0) {
        if (lo <= -v_cap) throw Error(ErrorKind::Overflow, "yang: requested current beyond exp cap");
        hi = lo;
        lo = std::max(2.0 * lo, -v_cap);
    }
    const double i_ref = std::max(std::abs(i_m), std::abs(yang_current(x, 1.0, p)));
    return newton_bisect(fdf, lo, hi, 0.0, opt.newton_tol * i_ref, opt.newton_max_iter).x;
}

/// Completes (v, i) from the state and one imposed terminal quantity.
inline PortPoint port_solve(const ModelParams& params, const DeviceState& s, double drive_value, DriveKind kind,
                            const PortOptions& opt = {}) {
    return std::visit(
        [&](const auto& p) -> PortPoint {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, StrukovParams>) {
                const double m = strukov_memristance(s.w, p);
                if (kind == DriveKind::Current) return {m * drive_value, drive_value, m * drive_value};
                return {drive_value, drive_value / m, drive_value};
            } else if constexpr (std::is_same_v<T, YangParams>) {
                if (kind == DriveKind::Voltage) {
                    return {drive_value, yang_current(s.w, drive_value, p), drive_value};
                }
                const double v = solve_yang_voltage(s.w, drive_value, p, opt);
                return {v, drive_value, v};
            } else {
                if (kind == DriveKind::Voltage) {
                    const double v_g = solve_gap_voltage(s.w, drive_value, p, opt);
                    return {drive_value, pickett_current(s.w, v_g, p), v_g};
                }
                const double v_g = solve_gap_for_current(s.w, drive_value, p, opt);
                return {v_g + drive_value * p.r_s, drive_value, v_g};
            }
        },
        params);
}

/// Port relation residual, in volts, of a completed pair at state s.
inline double port_residual(const ModelParams& params, const DeviceState& s, const PortPoint& pt) {
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, StrukovParams>) {
                return pt.v - strukov_memristance(s.w, p) * pt.i;
            } else if constexpr (std::is_same_v<T, YangParams>) {
                const double g = yang_conductance(s.w, pt.v, p);
                return (yang_current(s.w, pt.v, p) - pt.i) / g;
            } else {
                return pt.v - pt.v_g - pickett_current(s.w, pt.v_g, p) * p.r_s;
            }
        },
        params);
}

}  // namespace memsim
