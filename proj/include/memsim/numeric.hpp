#pragma once

#include <cmath>
#include <string>

#include "memsim/errors.hpp"

namespace memsim {

/// Largest exponent accepted by exp/sinh before the evaluation is rejected.
inline constexpr double kDefaultArgCap = 700.0;

inline double checked_exp(double arg, const char* where, double cap = kDefaultArgCap) {
    // Large negative arguments underflow to zero harmlessly; only growth is capped.
    if (!(arg <= cap)) {
        throw Error(ErrorKind::Overflow,
                    std::string(where) + ": exp argument " + std::to_string(arg) + " exceeds cap");
    }
    return std::exp(arg);
}

inline double checked_sinh(double arg, const char* where, double cap = kDefaultArgCap) {
    if (!(std::abs(arg) <= cap)) {
        throw Error(ErrorKind::Overflow,
                    std::string(where) + ": sinh argument " + std::to_string(arg) + " exceeds cap");
    }
    return std::sinh(arg);
}

constexpr double sign_of(double x) noexcept { return (x > 0.0) - (x < 0.0); }

}  // namespace memsim
