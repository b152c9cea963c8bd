#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "memsim/device_state.hpp"
#include "memsim/drive.hpp"
#include "memsim/model.hpp"
#include "memsim/port.hpp"

namespace memsim {

enum class Method { Rk4Fixed, Rk45Adaptive };

constexpr std::string_view to_string(Method m) noexcept {
    return m == Method::Rk4Fixed ? "rk4_fixed" : "rk45_adaptive";
}

struct SolverConfig {
    Method method = Method::Rk4Fixed;
    double dt = 1e-4;      ///< fixed step, or the initial step for the adaptive method
    double dt_min = 1e-15;
    double dt_max = 1e-2;
    double rel_tol = 1e-8;
    double abs_tol = 1e-14;
    double t_end = 1.0;
    double newton_tol = 1e-12;
    int newton_max_iter = 100;

    void validate() const {
        if (!(t_end > 0.0)) throw Error(ErrorKind::Validation, "solver t_end must be > 0");
        if (!(dt > 0.0)) throw Error(ErrorKind::Validation, "solver dt must be > 0");
        if (!(newton_tol > 0.0) || newton_max_iter <= 0) {
            throw Error(ErrorKind::Validation, "newton tolerance and iteration limit must be > 0");
        }
        if (method == Method::Rk45Adaptive) {
            if (!(dt_min > 0.0 && dt_max >= dt_min && rel_tol > 0.0 && abs_tol > 0.0)) {
                throw Error(ErrorKind::Validation, "adaptive solver needs 0 < dt_min <= dt_max and tolerances > 0");
            }
        }
    }

    [[nodiscard]] PortOptions port_options() const noexcept { return {newton_tol, newton_max_iter}; }

    [[nodiscard]] std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        os << to_string(method) << " dt=" << dt;
        if (method == Method::Rk45Adaptive) {
            os << " dt_min=" << dt_min << " dt_max=" << dt_max << " rel_tol=" << rel_tol << " abs_tol=" << abs_tol;
        }
        os << " t_end=" << t_end << " newton_tol=" << newton_tol << " newton_max_iter=" << newton_max_iter;
        return os.str();
    }
};

/// One recorded point. `dwdt` is the model's state equation evaluated at the
/// sample; when the state is held at a bound the stored w does not move even
/// though dwdt may be nonzero.
struct Sample {
    double t = 0.0;
    double v = 0.0;
    double i = 0.0;
    double w = 0.0;
    double dwdt = 0.0;
};

struct TraceMetadata {
    std::string model;
    std::string params_hash;
    std::string drive;
    std::string solver;
    DriveKind drive_kind = DriveKind::Voltage;
    double w_min = 0.0;
    double w_max = 1.0;
};

struct Trace {
    TraceMetadata meta;
    std::vector<Sample> samples;
};

/// FNV-1a, used for reproducible content hashes of parameter sets and configs.
inline std::uint64_t fnv1a(std::string_view text) noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int k = 15; k >= 0; --k, v >>= 4) out[static_cast<std::size_t>(k)] = digits[v & 0xF];
    return out;
}

inline std::string describe(const ModelParams& params) {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            os << model_traits<T>::id;
            if constexpr (std::is_same_v<T, StrukovParams>) {
                os << " mu_v=" << p.mu_v << " r_on=" << p.r_on << " r_off=" << p.r_off << " d=" << p.d;
            } else if constexpr (std::is_same_v<T, YangParams>) {
                os << " alpha=" << p.alpha << " m=" << p.m << " beta=" << p.beta << " delta=" << p.delta
                   << " chi=" << p.chi << " gamma=" << p.gamma << " n=" << p.n;
            } else {
                os << " f_off=" << p.f_off << " f_on=" << p.f_on << " i_off=" << p.i_off << " i_on=" << p.i_on
                   << " a_off=" << p.a_off << " a_on=" << p.a_on << " b=" << p.b << " w_c=" << p.w_c
                   << " r_s=" << p.r_s << " phi_0=" << p.phi_0 << " w_1=" << p.w_1
                   << " current_scale=" << p.current_scale;
            }
            if constexpr (!std::is_same_v<T, StrukovParams>) os << " arg_cap=" << p.arg_cap;
        },
        params);
    return os.str();
}

namespace detail {

/// Right-hand side shared by both integrators. Stage states are projected onto
/// the admissible interval before the model is evaluated, then the clamp rule
/// zeroes outward motion at a bound.
class StateEquation {
public:
    StateEquation(const ModelParams& params, const DriveSignal& drive, DeviceState bounds, PortOptions opt)
        : params_(params), drive_(drive), bounds_(bounds), opt_(opt) {}

    double operator()(double t, double w) const {
        const DeviceState s = bounds_.with(bounds_.clamp(w));
        const PortPoint pt = port_solve(params_, s, drive_.evaluate(t), drive_.kind, opt_);
        return bounded_rate(state_rate(params_, s.w, pt.v, pt.i), s);
    }

    Sample sample(double t, double w) const {
        const DeviceState s = bounds_.with(w);
        const PortPoint pt = port_solve(params_, s, drive_.evaluate(t), drive_.kind, opt_);
        return {t, pt.v, pt.i, w, state_rate(params_, w, pt.v, pt.i)};
    }

private:
    const ModelParams& params_;
    const DriveSignal& drive_;
    DeviceState bounds_;
    PortOptions opt_;
};

[[noreturn]] inline void rethrow_at(const Error& e, double t) {
    std::ostringstream os;
    os.precision(17);
    os << e.what() << " (t=" << t << " s)";
    // Drop the "Kind: " prefix the original message already carries.
    std::string msg = os.str();
    const auto prefix = std::string(to_string(e.kind())) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
    throw Error(e.kind(), msg);
}

inline void integrate_rk4(const StateEquation& f, const SolverConfig& cfg, const DeviceState& w0, Trace& trace) {
    const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt * (1.0 - 1e-12)));
    trace.samples.reserve(steps + 1);
    double w = w0.w;
    double t = 0.0;
    trace.samples.push_back(f.sample(t, w));
    for (std::size_t k = 1; k <= steps; ++k) {
        // Times are k*dt rather than accumulated so half-period samples land exactly.
        const double t_next = k == steps ? cfg.t_end : std::min(static_cast<double>(k) * cfg.dt, cfg.t_end);
        const double h = t_next - t;
        try {
            const double k1 = f(t, w);
            const double k2 = f(t + 0.5 * h, w + 0.5 * h * k1);
            const double k3 = f(t + 0.5 * h, w + 0.5 * h * k2);
            const double k4 = f(t_next, w + h * k3);
            w = w0.clamp(w + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
            t = t_next;
            trace.samples.push_back(f.sample(t, w));
        } catch (const Error& e) {
            rethrow_at(e, t);
        }
    }
}

// Dormand-Prince 5(4) tableau.
inline constexpr std::array<double, 7> kDpC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double kDpA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
inline constexpr std::array<double, 7> kDpB5{35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
inline constexpr std::array<double, 7> kDpB4{5179.0 / 57600, 0.0,        7571.0 / 16695, 393.0 / 640,
                                             -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

inline void integrate_dp45(const StateEquation& f, const SolverConfig& cfg, const DeviceState& w0, Trace& trace) {
    double w = w0.w;
    double t = 0.0;
    double h = std::clamp(cfg.dt, cfg.dt_min, cfg.dt_max);
    trace.samples.push_back(f.sample(t, w));
    std::array<double, 7> k{};
    while (t < cfg.t_end) {
        const bool last = t + h >= cfg.t_end * (1.0 - 1e-14);
        const double step = last ? cfg.t_end - t : h;
        try {
            for (std::size_t s = 0; s < 7; ++s) {
                double ws = w;
                for (std::size_t j = 0; j < s; ++j) ws += step * kDpA[s][j] * k[j];
                k[s] = f(t + kDpC[s] * step, ws);
            }
        } catch (const Error& e) {
            rethrow_at(e, t);
        }
        double w5 = w;
        double w4 = w;
        for (std::size_t s = 0; s < 7; ++s) {
            w5 += step * kDpB5[s] * k[s];
            w4 += step * kDpB4[s] * k[s];
        }
        const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(w), std::abs(w5));
        const double err = std::abs(w5 - w4) / scale;
        if (err <= 1.0) {
            t = last ? cfg.t_end : t + step;
            w = w0.clamp(w5);
            try {
                trace.samples.push_back(f.sample(t, w));
            } catch (const Error& e) {
                rethrow_at(e, t);
            }
        }
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h = std::min(step * factor, cfg.dt_max);
        if (h < cfg.dt_min && t < cfg.t_end) {
            std::ostringstream os;
            os.precision(17);
            os << "adaptive step fell below dt_min=" << cfg.dt_min << " (t=" << t << " s)";
            throw Error(ErrorKind::SolverDiverged, os.str());
        }
    }
}

}  // namespace detail

/// Integrates dw/dt = f(w, drive(t)) on [0, t_end] and records every accepted
/// step. The port relation is resolved at each stage; clamping to
/// [w_min, w_max] is applied after each accepted step.
inline Trace integrate(const ModelParams& params, const DriveSignal& drive, const DeviceState& w0,
                       const SolverConfig& cfg) {
    validate(params);
    drive.validate();
    cfg.validate();
    if (w0.w < w0.w_min || w0.w > w0.w_max || !(w0.w_min < w0.w_max)) {
        throw Error(ErrorKind::Validation, "initial state outside its bounds");
    }

    Trace trace;
    trace.meta.model = std::string(model_id(params));
    trace.meta.params_hash = hex64(fnv1a(describe(params)));
    trace.meta.drive = drive.describe();
    trace.meta.solver = cfg.describe();
    trace.meta.drive_kind = drive.kind;
    trace.meta.w_min = w0.w_min;
    trace.meta.w_max = w0.w_max;

    const detail::StateEquation f(params, drive, w0, cfg.port_options());
    if (cfg.method == Method::Rk4Fixed) {
        detail::integrate_rk4(f, cfg, w0, trace);
    } else {
        detail::integrate_dp45(f, cfg, w0, trace);
    }
    return trace;
}

}  // namespace memsim
