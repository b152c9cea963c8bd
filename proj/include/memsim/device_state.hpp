#pragma once

#include <algorithm>

#include "memsim/errors.hpp"

namespace memsim {

inline constexpr double kNanometre = 1e-9;

constexpr double nm_to_m(double nm) noexcept { return nm * kNanometre; }
constexpr double m_to_nm(double m) noexcept { return m / kNanometre; }

/// Internal state of a memristor together with the interval it is confined to.
/// Units are model specific: metres for Strukov and Pickett, the normalized
/// fraction w/D for Yang.
struct DeviceState {
    double w = 0.0;
    double w_min = 0.0;
    double w_max = 1.0;

    static DeviceState make(double w, double w_min, double w_max) {
        if (!(w_min < w_max)) {
            throw Error(ErrorKind::Validation, "state bounds require w_min < w_max");
        }
        if (w < w_min || w > w_max) {
            throw Error(ErrorKind::Validation, "initial state outside [w_min, w_max]");
        }
        return DeviceState{w, w_min, w_max};
    }

    [[nodiscard]] DeviceState with(double value) const noexcept { return {value, w_min, w_max}; }
    [[nodiscard]] double clamp(double value) const noexcept { return std::clamp(value, w_min, w_max); }
    [[nodiscard]] DeviceState clamped() const noexcept { return with(clamp(w)); }
    [[nodiscard]] double span() const noexcept { return w_max - w_min; }
};

}  // namespace memsim
