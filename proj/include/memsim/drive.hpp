#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>

#include "memsim/errors.hpp"

namespace memsim {

enum class DriveKind { Current, Voltage };
enum class WaveShape { Sine, Triangle, PulseTrain };

constexpr std::string_view to_string(DriveKind k) noexcept {
    return k == DriveKind::Current ? "current" : "voltage";
}

constexpr std::string_view to_string(WaveShape s) noexcept {
    switch (s) {
        case WaveShape::Sine: return "sine";
        case WaveShape::Triangle: return "triangle";
        case WaveShape::PulseTrain: return "pulse_train";
    }
    return "unknown";
}

/// Levels and durations of a rectangular pulse train (zero rise and fall).
struct PulseSpec {
    double high = 1.0;
    double low = 0.0;
    double t_high = 0.5;
    double t_low = 0.5;
};

/// Periodic source in amperes (current drive) or volts (voltage drive).
struct DriveSignal {
    DriveKind kind = DriveKind::Voltage;
    WaveShape shape = WaveShape::Sine;
    double amplitude = 1.0;  ///< peak
    double frequency = 1.0;  ///< Hz; pulse trains use 1 / (t_high + t_low)
    double phase = 0.0;      ///< rad
    double offset = 0.0;
    PulseSpec pulse{};

    void validate() const {
        if (shape == WaveShape::PulseTrain) {
            if (!(pulse.t_high >= 0.0 && pulse.t_low >= 0.0 && pulse.t_high + pulse.t_low > 0.0)) {
                throw Error(ErrorKind::Validation, "pulse durations must be nonnegative with a positive period");
            }
            return;
        }
        if (!(frequency > 0.0)) throw Error(ErrorKind::Validation, "drive frequency must be > 0");
        if (!(amplitude >= 0.0)) throw Error(ErrorKind::Validation, "drive amplitude must be >= 0");
    }

    [[nodiscard]] double period() const noexcept {
        return shape == WaveShape::PulseTrain ? pulse.t_high + pulse.t_low : 1.0 / frequency;
    }

    [[nodiscard]] double evaluate(double t) const noexcept {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        switch (shape) {
            case WaveShape::Sine:
                return offset + amplitude * std::sin(two_pi * frequency * t + phase);
            case WaveShape::Triangle: {
                double cycle = frequency * t + phase / two_pi;
                cycle -= std::floor(cycle);
                double unit = 0.0;
                if (cycle < 0.25) {
                    unit = 4.0 * cycle;
                } else if (cycle < 0.75) {
                    unit = 2.0 - 4.0 * cycle;
                } else {
                    unit = 4.0 * cycle - 4.0;
                }
                return offset + amplitude * unit;
            }
            case WaveShape::PulseTrain: {
                const double T = period();
                double local = t + phase / two_pi * T;
                local -= std::floor(local / T) * T;
                return offset + (local < pulse.t_high ? pulse.high : pulse.low);
            }
        }
        return 0.0;
    }

    [[nodiscard]] std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        os << to_string(kind) << ' ' << to_string(shape);
        if (shape == WaveShape::PulseTrain) {
            os << " high=" << pulse.high << " low=" << pulse.low << " t_high=" << pulse.t_high
               << " t_low=" << pulse.t_low;
        } else {
            os << " amplitude=" << amplitude << " frequency=" << frequency << " phase=" << phase;
        }
        os << " offset=" << offset;
        return os.str();
    }
};

}  // namespace memsim
