#pragma once

#include <cmath>

#include "memsim/errors.hpp"
#include "memsim/numeric.hpp"

namespace memsim {

/// Nonlinear drift model with an interface rectifier. The state is the
/// normalized width x in [0, 1]; x = 1 is the conducting (ON) end.
struct YangParams {
    double alpha = 1.0;  ///< rate coefficient, 1/(s V^m) on the normalized state
    int m = 1;           ///< odd exponent of the voltage in the state equation
    double beta = 9e-6;  ///< A
    double delta = 2.0;  ///< 1/V
    double chi = 1e-10;  ///< A
    double gamma = 4.0;  ///< 1/V
    int n = 14;          ///< state-influence exponent
    double arg_cap = kDefaultArgCap;

    void validate() const {
        if (m <= 0 || m % 2 == 0) {
            throw Error(ErrorKind::Validation, "yang exponent m must be a positive odd integer");
        }
        if (n < 0) throw Error(ErrorKind::Validation, "yang exponent n must be nonnegative");
        if (!(beta >= 0.0 && delta >= 0.0 && chi >= 0.0 && gamma >= 0.0)) {
            throw Error(ErrorKind::Validation, "yang beta, delta, chi, gamma must be nonnegative");
        }
        if (!std::isfinite(alpha)) throw Error(ErrorKind::Validation, "yang alpha must be finite");
    }
};

inline double int_pow(double base, int exponent) noexcept {
    double result = 1.0;
    for (; exponent > 0; exponent >>= 1) {
        if (exponent & 1) result *= base;
        base *= base;
    }
    return result;
}

/// alpha * v^m. Odd in v because m is odd.
inline double yang_dwdt(double v_m, const YangParams& p) noexcept {
    return p.alpha * int_pow(v_m, p.m);
}

inline double yang_current(double x, double v_m, const YangParams& p) {
    if (p.gamma * v_m > p.arg_cap) {
        throw Error(ErrorKind::Overflow, "yang_current: exp argument exceeds cap");
    }
    const double memristive = int_pow(x, p.n) * p.beta * checked_sinh(p.delta * v_m, "yang_current", p.arg_cap);
    return memristive + p.chi * std::expm1(p.gamma * v_m);
}

/// d i / d v at fixed state, used by the current-drive port solve.
inline double yang_conductance(double x, double v_m, const YangParams& p) {
    return int_pow(x, p.n) * p.beta * p.delta * std::cosh(p.delta * v_m) +
           p.chi * p.gamma * checked_exp(p.gamma * v_m, "yang_conductance", p.arg_cap);
}

}  // namespace memsim
