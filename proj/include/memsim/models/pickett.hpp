#pragma once

#include <cmath>
#include <string>

#include "memsim/device_state.hpp"
#include "memsim/errors.hpp"
#include "memsim/numeric.hpp"

namespace memsim {

/// Tunnel-barrier model. The state w is the barrier (gap) width in metres;
/// small w is the conducting (ON) end. The conduction formula works in nm and
/// volts, so the state is converted at that boundary only.
struct PickettParams {
    double f_off = 3.5e-6;    ///< m/s
    double f_on = 40e-6;      ///< m/s
    double i_off = 115e-6;    ///< A
    double i_on = 8.9e-6;     ///< A
    double a_off = 1.2e-9;    ///< m
    double a_on = 1.8e-9;     ///< m
    double b = 500e-6;        ///< A
    double w_c = 107e-12;     ///< m
    double r_s = 215.0;       ///< series resistance, ohm
    double phi_0 = 0.95;      ///< barrier height, V
    double w_1 = 0.1261e-9;   ///< m
    double current_scale = 1.0;
    double arg_cap = kDefaultArgCap;

    void validate() const {
        const bool scales_ok = f_off > 0 && f_on > 0 && i_off > 0 && i_on > 0 && a_off > 0 &&
                               a_on > 0 && b > 0 && w_c > 0 && phi_0 > 0 && w_1 > 0 &&
                               current_scale > 0;
        if (!scales_ok) throw Error(ErrorKind::Validation, "pickett scales must be strictly positive");
        if (!(r_s >= 0.0)) throw Error(ErrorKind::Validation, "pickett r_s must be nonnegative");
    }
};

/// Quantities of the Simmons barrier at one (w, v_g). Lengths in nm.
struct PickettAuxiliaries {
    double lambda = 0.0;
    double w_2 = 0.0;
    double delta_w = 0.0;
    double b_coef = 0.0;
    double phi_i = 0.0;
};

namespace detail {

inline constexpr double kSimmonsPrefactor = 0.0617;
inline constexpr double kImageForce = 0.1148;
inline constexpr double kBarrierCoef = 10.24634;
inline constexpr double kLambdaCoef = 0.0998;

/// Auxiliaries plus their derivatives with respect to |v_g|.
struct PickettAuxJet {
    PickettAuxiliaries value;
    double d_delta_w = 0.0;
    double d_phi_i = 0.0;
};

/// Non-throwing core. On failure returns false and sets `why`.
inline bool try_pickett_aux_jet(double w_m, double v_g, const PickettParams& p, PickettAuxJet& jet,
                                const char*& why) noexcept {
    const double w = m_to_nm(w_m);
    const double w1 = m_to_nm(p.w_1);
    const double a = std::abs(v_g);
    if (!(w > w1)) return why = "w <= w_1", false;

    auto& x = jet.value;
    x.lambda = kLambdaCoef / w;
    const double den = 2.85 + 4.0 * x.lambda - 2.0 * a;
    if (!(den > 0.0)) return why = "image-force denominator <= 0", false;
    x.w_2 = w1 + w * (1.0 - 9.2 * x.lambda / den);
    x.delta_w = x.w_2 - w1;
    if (!(x.delta_w > 0.0)) return why = "delta_w <= 0", false;
    const double ln_arg = x.w_2 * (w - w1) / (w1 * (w - x.w_2));
    if (!(ln_arg > 0.0)) return why = "log argument <= 0", false;
    const double log_term = std::log(ln_arg);
    x.b_coef = kBarrierCoef * x.delta_w;
    x.phi_i = p.phi_0 - a * (w1 + x.w_2) / w - (kImageForce / x.delta_w) * log_term;
    if (!(x.phi_i > 0.0)) return why = "phi_i <= 0", false;

    const double d_w2 = -w * 18.4 * x.lambda / (den * den);
    const double d_log = d_w2 * (1.0 / x.w_2 + 1.0 / (w - x.w_2));
    jet.d_delta_w = d_w2;
    jet.d_phi_i = -(w1 + x.w_2) / w - a * d_w2 / w +
                  kImageForce * d_w2 * log_term / (x.delta_w * x.delta_w) -
                  kImageForce * d_log / x.delta_w;
    return true;
}

inline PickettAuxJet pickett_aux_jet(double w_m, double v_g, const PickettParams& p) {
    PickettAuxJet jet;
    const char* why = "";
    if (!try_pickett_aux_jet(w_m, v_g, p, jet, why)) {
        throw Error(ErrorKind::OutOfValidityRange, std::string("pickett barrier: ") + why + " at w=" +
                                                       std::to_string(m_to_nm(w_m)) + " nm, v_g=" +
                                                       std::to_string(v_g) + " V");
    }
    return jet;
}

}  // namespace detail

/// Barrier auxiliaries at state w (metres) and gap voltage v_g.
inline PickettAuxiliaries pickett_aux(double w_m, double v_g, const PickettParams& p) {
    return detail::pickett_aux_jet(w_m, v_g, p).value;
}

/// Current magnitude and its derivative with respect to |v_g|.
struct PickettCurrentJet {
    double current = 0.0;     ///< signed, A
    double conductance = 0.0; ///< d current / d v_g, S
};

inline PickettCurrentJet pickett_current_jet(double w_m, double v_g, const PickettParams& p) {
    const auto jet = detail::pickett_aux_jet(w_m, v_g, p);
    const auto& x = jet.value;
    const double a = std::abs(v_g);
    const double scale = p.current_scale * detail::kSimmonsPrefactor;

    const double d_b = detail::kBarrierCoef * jet.d_delta_w;
    const double sq_lo = std::sqrt(x.phi_i);
    const double e_lo = std::exp(-x.b_coef * sq_lo);
    const double psi = x.phi_i + a;
    const double sq_hi = std::sqrt(psi);
    const double e_hi = std::exp(-x.b_coef * sq_hi);

    const double bracket = x.phi_i * e_lo - psi * e_hi;
    const double d_lo = e_lo * (jet.d_phi_i - x.phi_i * (d_b * sq_lo + x.b_coef * jet.d_phi_i / (2.0 * sq_lo)));
    const double d_psi = jet.d_phi_i + 1.0;
    const double d_hi = e_hi * (d_psi - psi * (d_b * sq_hi + x.b_coef * d_psi / (2.0 * sq_hi)));

    const double dw2 = x.delta_w * x.delta_w;
    const double magnitude = scale * bracket / dw2;
    const double d_magnitude = scale * ((d_lo - d_hi) / dw2 - 2.0 * bracket * jet.d_delta_w / (dw2 * x.delta_w));
    return {sign_of(v_g) * magnitude, d_magnitude};
}

/// Simmons tunnel current through the gap; carries the sign of v_g.
inline double pickett_current(double w_m, double v_g, const PickettParams& p) {
    return pickett_current_jet(w_m, v_g, p).current;
}

/// Gap velocity. Positive current widens the gap (OFF switching), negative
/// current narrows it (ON switching).
inline double pickett_dwdt(double w_m, double i_m, const PickettParams& p) {
    if (i_m == 0.0) return 0.0;
    const bool off = i_m > 0.0;
    const double f = off ? p.f_off : p.f_on;
    const double i_scale = off ? p.i_off : p.i_on;
    const double a = off ? p.a_off : p.a_on;
    const double inner = checked_exp((w_m - a) / p.w_c - std::abs(i_m) / p.b, "pickett_dwdt", p.arg_cap);
    return f * checked_sinh(i_m / i_scale, "pickett_dwdt", p.arg_cap) *
           std::exp(-inner - w_m / p.w_c);
}

/// Upper end of the gap-voltage interval [0, v] on which the tunnel current is
/// valid and strictly increasing at state w. Beyond it the image-force term
/// drives phi_i towards zero and the current turns over.
struct PickettWindow {
    double v_edge = 0.0;  ///< last valid |v_g|
    double v_peak = 0.0;  ///< |v_g| of maximum current, <= v_edge
    double i_peak = 0.0;  ///< current at v_peak, A
};

inline PickettWindow pickett_operating_window(double w_m, const PickettParams& p) {
    auto valid = [&](double a) {
        detail::PickettAuxJet scratch;
        const char* why = "";
        return detail::try_pickett_aux_jet(w_m, a, p, scratch, why);
    };
    if (!valid(0.0)) {
        (void)detail::pickett_aux_jet(w_m, 0.0, p);  // rethrow with the reason
    }
    const double lambda = detail::kLambdaCoef / m_to_nm(w_m);
    double lo = 0.0;
    double hi = 0.5 * (2.85 + 4.0 * lambda);
    for (int k = 0; k < 200 && hi - lo > 1e-13 * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        (valid(mid) ? lo : hi) = mid;
    }
    PickettWindow win;
    win.v_edge = lo;

    // The current rises to a first maximum, then turns over; close to the edge
    // (phi_i -> 0) it can rise again, which is an artefact of the barrier
    // approximation. The window ends at the first maximum.
    const double step = std::min(5e-3, 0.5 * lo);
    double prev = 0.0;
    double peak_at = lo;
    for (double v = step; v <= lo; v += step) {
        const double i = pickett_current(w_m, v, p);
        if (i <= prev) {
            peak_at = v - step;
            break;
        }
        prev = i;
    }
    if (peak_at == lo) {
        win.v_peak = lo;
        win.i_peak = pickett_current(w_m, lo, p);
        return win;
    }
    // Golden-section refinement on [peak_at - step, peak_at + step].
    double a = std::max(0.0, peak_at - step);
    double b = std::min(lo, peak_at + step);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = pickett_current(w_m, c, p);
    double fd = pickett_current(w_m, d, p);
    while (b - a > 1e-13) {
        if (fc < fd) {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = pickett_current(w_m, d, p);
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = pickett_current(w_m, c, p);
        }
    }
    win.v_peak = 0.5 * (a + b);
    win.i_peak = pickett_current(w_m, win.v_peak, p);
    return win;
}

}  // namespace memsim
