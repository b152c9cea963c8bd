#pragma once

#include <algorithm>
#include <cmath>

#include "memsim/device_state.hpp"
#include "memsim/errors.hpp"

namespace memsim {

/// Linear ion drift (HP TiO2) model. The state w is the doped-region width in
/// metres, w in [0, D]; w = D is the low-resistance (ON) end.
struct StrukovParams {
    double mu_v = 1e-14;  ///< average ion mobility, m^2/(V s)
    double r_on = 100.0;  ///< ohm
    double r_off = 16e3;  ///< ohm
    double d = 10e-9;     ///< device thickness, m

    void validate() const {
        if (!(mu_v > 0.0 && r_on > 0.0 && r_off > r_on && d > 0.0 && std::isfinite(r_off / r_on))) {
            throw Error(ErrorKind::Validation,
                        "strukov params require mu_v > 0, 0 < r_on < r_off, d > 0");
        }
    }

    [[nodiscard]] double transfer_ratio() const noexcept { return r_off / r_on; }
};

/// Boundary velocity of the doped region: mu_v * R_ON / D * i.
inline double strukov_dwdt(double i_m, const StrukovParams& p) noexcept {
    return p.mu_v * (p.r_on / p.d) * i_m;
}

/// Series combination of the doped and undoped regions.
inline double strukov_memristance(double w, const StrukovParams& p) {
    const double tol = 1e-9 * p.d;
    if (w < -tol || w > p.d + tol) {
        throw Error(ErrorKind::StateOutOfBounds, "strukov state w outside [0, D]");
    }
    const double x = std::clamp(w / p.d, 0.0, 1.0);
    return p.r_on * x + p.r_off * (1.0 - x);
}

}  // namespace memsim
