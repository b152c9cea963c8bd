#pragma once

#include <string_view>
#include <type_traits>
#include <variant>

#include "memsim/drive.hpp"
#include "memsim/models/pickett.hpp"
#include "memsim/models/strukov.hpp"
#include "memsim/models/yang.hpp"

namespace memsim {

using ModelParams = std::variant<StrukovParams, YangParams, PickettParams>;

template <typename P>
struct model_traits;

template <>
struct model_traits<StrukovParams> {
    static constexpr std::string_view id = "strukov";
    static constexpr DriveKind controlling = DriveKind::Current;
    static constexpr bool on_at_high_state = true;
};

template <>
struct model_traits<YangParams> {
    static constexpr std::string_view id = "yang";
    static constexpr DriveKind controlling = DriveKind::Voltage;
    static constexpr bool on_at_high_state = true;
};

template <>
struct model_traits<PickettParams> {
    static constexpr std::string_view id = "pickett";
    static constexpr DriveKind controlling = DriveKind::Current;
    static constexpr bool on_at_high_state = false;
};

/// Static description of a model, recoverable from its id alone so that a
/// stored trace can be analysed without the parameter set.
struct ModelInfo {
    std::string_view id;
    DriveKind controlling;
    bool on_at_high_state;
};

inline ModelInfo model_info(const ModelParams& params) noexcept {
    return std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            return ModelInfo{model_traits<T>::id, model_traits<T>::controlling,
                             model_traits<T>::on_at_high_state};
        },
        params);
}

inline ModelInfo model_info(std::string_view id) {
    if (id == model_traits<StrukovParams>::id) return model_info(ModelParams{StrukovParams{}});
    if (id == model_traits<YangParams>::id) return model_info(ModelParams{YangParams{}});
    if (id == model_traits<PickettParams>::id) return model_info(ModelParams{PickettParams{}});
    throw Error(ErrorKind::Config, "unknown model '" + std::string(id) + "'");
}

inline std::string_view model_id(const ModelParams& params) noexcept { return model_info(params).id; }

inline void validate(const ModelParams& params) {
    std::visit([](const auto& p) { p.validate(); }, params);
}

/// Unwindowed state derivative f(w, drive) from the completed port pair.
inline double state_rate(const ModelParams& params, double w, double v_m, double i_m) {
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, StrukovParams>) {
                return strukov_dwdt(i_m, p);
            } else if constexpr (std::is_same_v<T, YangParams>) {
                return yang_dwdt(v_m, p);
            } else {
                return pickett_dwdt(w, i_m, p);
            }
        },
        params);
}

/// Hard-clamp boundary rule: at a bound, a derivative pointing outward is zero.
inline double bounded_rate(double rate, const DeviceState& s) noexcept {
    if (s.w <= s.w_min && rate < 0.0) return 0.0;
    if (s.w >= s.w_max && rate > 0.0) return 0.0;
    return rate;
}

}  // namespace memsim
