#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "memsim/model.hpp"
#include "memsim/solver.hpp"

namespace memsim {

enum class Polarity { Positive, Negative };

/// Knobs for metric extraction and for the linear/symmetric classification.
struct AnalysisOptions {
    double threshold_fraction = 0.05;
    double band_lo = 0.1;
    double band_hi = 0.9;
    double linear_r2_min = 0.99;
    double symmetric_ratio_lo = 0.9;
    double symmetric_ratio_hi = 1.11;

    void validate() const {
        if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
            throw Error(ErrorKind::Validation, "threshold fraction must lie in (0, 1)");
        }
        if (!(band_lo > 0.0 && band_lo < band_hi && band_hi < 1.0)) {
            throw Error(ErrorKind::Validation, "switching band requires 0 < lo < hi < 1");
        }
        if (!(linear_r2_min > 0.0 && linear_r2_min <= 1.0)) {
            throw Error(ErrorKind::Validation, "linear r2 cutoff must lie in (0, 1]");
        }
        if (!(symmetric_ratio_lo > 0.0 && symmetric_ratio_lo <= 1.0 && symmetric_ratio_hi >= 1.0)) {
            throw Error(ErrorKind::Validation, "symmetric ratio window must contain 1");
        }
    }
};

/// Max |i| at the zero crossings of v, with i interpolated linearly between
/// samples. Zero means a perfectly pinched loop.
inline double pinched_check(const Trace& trace) {
    const auto& s = trace.samples;
    double residual = 0.0;
    bool found = false;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k].v == 0.0) {
            residual = std::max(residual, std::abs(s[k].i));
            found = true;
            continue;
        }
        if (k + 1 < s.size() && s[k + 1].v != 0.0 && (s[k].v > 0.0) != (s[k + 1].v > 0.0)) {
            const double frac = s[k].v / (s[k].v - s[k + 1].v);
            const double i = s[k].i + frac * (s[k + 1].i - s[k].i);
            residual = std::max(residual, std::abs(i));
            found = true;
        }
    }
    if (!found) throw Error(ErrorKind::InsufficientData, "no zero crossing of v in trace");
    return residual;
}

inline double peak_current(const Trace& trace) noexcept {
    double peak = 0.0;
    for (const auto& s : trace.samples) peak = std::max(peak, std::abs(s.i));
    return peak;
}

/// Smallest |v| of the given polarity at which |dw/dt| rises through
/// fraction * max|dw/dt|.
inline double estimate_threshold(const Trace& trace, double fraction, Polarity polarity) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw Error(ErrorKind::Validation, "threshold fraction must lie in (0, 1)");
    }
    const auto& s = trace.samples;
    double peak = 0.0;
    for (const auto& p : s) peak = std::max(peak, std::abs(p.dwdt));
    if (!(peak > 0.0)) throw Error(ErrorKind::InsufficientData, "dw/dt is identically zero");
    const double level = fraction * peak;
    const double sgn = polarity == Polarity::Positive ? 1.0 : -1.0;
    auto in_polarity = [&](const Sample& p) { return sgn * p.v >= 0.0; };

    double best = std::numeric_limits<double>::infinity();
    if (!s.empty() && in_polarity(s.front()) && std::abs(s.front().dwdt) >= level) {
        best = std::abs(s.front().v);
    }
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        const double a = std::abs(s[k].dwdt);
        const double b = std::abs(s[k + 1].dwdt);
        if (!(a < level && level <= b)) continue;
        if (!in_polarity(s[k]) || !in_polarity(s[k + 1])) continue;
        const double frac = (level - a) / (b - a);
        best = std::min(best, std::abs(s[k].v + frac * (s[k + 1].v - s[k].v)));
    }
    if (!std::isfinite(best)) {
        throw Error(ErrorKind::InsufficientData, "|dw/dt| never reaches the threshold level at this polarity");
    }
    return best;
}

/// Durations of the first complete upward and downward traversals of the
/// [lo, hi] band of the state range.
struct BandTraversal {
    std::optional<double> rise;
    std::optional<double> fall;
};

namespace detail {

inline std::optional<double> crossing_time(const std::vector<Sample>& s, double level, bool upward,
                                           std::size_t from, std::size_t& at) {
    for (std::size_t k = from; k + 1 < s.size(); ++k) {
        const double a = s[k].w;
        const double b = s[k + 1].w;
        const bool hit = upward ? (a < level && level <= b) : (a > level && level >= b);
        if (hit) {
            at = k + 1;
            return s[k].t + (level - a) / (b - a) * (s[k + 1].t - s[k].t);
        }
    }
    return std::nullopt;
}

inline std::optional<double> traversal(const std::vector<Sample>& s, double first, double second, bool upward) {
    std::size_t at = 0;
    const auto t0 = crossing_time(s, first, upward, 0, at);
    if (!t0) return std::nullopt;
    const auto t1 = crossing_time(s, second, upward, at - 1, at);
    if (!t1) return std::nullopt;
    return *t1 - *t0;
}

}  // namespace detail

inline BandTraversal band_traversal(const Trace& trace, double lo = 0.1, double hi = 0.9) {
    const double span = trace.meta.w_max - trace.meta.w_min;
    const double w_lo = trace.meta.w_min + lo * span;
    const double w_hi = trace.meta.w_min + hi * span;
    return {detail::traversal(trace.samples, w_lo, w_hi, true),
            detail::traversal(trace.samples, w_hi, w_lo, false)};
}

struct SwitchingTimes {
    double t_on_to_off = 0.0;
    double t_off_to_on = 0.0;
};

inline SwitchingTimes extract_switching_times(const Trace& trace, double lo = 0.1, double hi = 0.9) {
    const auto band = band_traversal(trace, lo, hi);
    if (!band.rise || !band.fall) {
        throw Error(ErrorKind::InsufficientData, "state does not traverse the switching band in both directions");
    }
    const bool on_high = model_info(trace.meta.model).on_at_high_state;
    return on_high ? SwitchingTimes{*band.fall, *band.rise} : SwitchingTimes{*band.rise, *band.fall};
}

inline double symmetry_metric(const Trace& trace, double lo = 0.1, double hi = 0.9) {
    const auto times = extract_switching_times(trace, lo, hi);
    return times.t_on_to_off / times.t_off_to_on;
}

/// Coefficient of determination of a least-squares line through (x, y).
inline double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw Error(ErrorKind::InsufficientData, "too few points for a fit");
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dx = x[k] - mx;
        const double dy = y[k] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw Error(ErrorKind::InsufficientData, "regressor has zero variance");
    if (!(syy > 0.0)) throw Error(ErrorKind::InsufficientData, "response has zero variance");
    return std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
}

/// R^2 of dw/dt against the model's controlling drive quantity.
inline double linearity_metric(const Trace& trace) {
    const bool by_current = model_info(trace.meta.model).controlling == DriveKind::Current;
    std::vector<double> x;
    std::vector<double> y;
    x.reserve(trace.samples.size());
    y.reserve(trace.samples.size());
    std::size_t nonzero = 0;
    for (const auto& s : trace.samples) {
        const double u = by_current ? s.i : s.v;
        nonzero += u != 0.0;
        x.push_back(u);
        y.push_back(s.dwdt);
    }
    if (nonzero < 10) throw Error(ErrorKind::InsufficientData, "fewer than 10 samples with nonzero drive");
    return r_squared(x, y);
}

enum class Linearity { Linear, Nonlinear };
enum class Symmetry { Symmetric, Asymmetric, Undetermined };

constexpr std::string_view to_string(Linearity l) noexcept { return l == Linearity::Linear ? "linear" : "nonlinear"; }
constexpr std::string_view to_string(Symmetry s) noexcept {
    switch (s) {
        case Symmetry::Symmetric: return "symmetric";
        case Symmetry::Asymmetric: return "asymmetric";
        case Symmetry::Undetermined: return "undetermined";
    }
    return "undetermined";
}

struct AnalysisReport {
    std::string label;
    std::string model;
    std::optional<double> threshold_pos;
    std::optional<double> threshold_neg;
    std::optional<double> t_on_to_off;
    std::optional<double> t_off_to_on;
    std::optional<double> symmetry_ratio;
    double linearity_r2 = 0.0;
    double pinched_residual = 0.0;
    double peak_current = 0.0;
    double threshold_fraction = 0.0;
    Linearity linearity = Linearity::Nonlinear;
    Symmetry symmetry = Symmetry::Undetermined;
};

inline Linearity classify_linearity(double r2, const AnalysisOptions& opt) noexcept {
    return r2 >= opt.linear_r2_min ? Linearity::Linear : Linearity::Nonlinear;
}

inline Symmetry classify_symmetry(const std::optional<double>& ratio, const AnalysisOptions& opt) noexcept {
    if (!ratio) return Symmetry::Undetermined;
    return (*ratio >= opt.symmetric_ratio_lo && *ratio <= opt.symmetric_ratio_hi) ? Symmetry::Symmetric
                                                                                 : Symmetry::Asymmetric;
}

/// Full metric set for one trace. Thresholds and switching times are optional
/// because non-saturating runs need not cross the band; linearity and the
/// pinch residual are required.
inline AnalysisReport analyze(const Trace& trace, const AnalysisOptions& opt, std::string label = {}) {
    opt.validate();
    AnalysisReport r;
    r.label = label.empty() ? trace.meta.model : std::move(label);
    r.model = trace.meta.model;
    r.threshold_fraction = opt.threshold_fraction;
    r.pinched_residual = pinched_check(trace);
    r.peak_current = peak_current(trace);
    r.linearity_r2 = linearity_metric(trace);

    auto optional_threshold = [&](Polarity p) -> std::optional<double> {
        try {
            return estimate_threshold(trace, opt.threshold_fraction, p);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::InsufficientData) throw;
            return std::nullopt;
        }
    };
    r.threshold_pos = optional_threshold(Polarity::Positive);
    r.threshold_neg = optional_threshold(Polarity::Negative);

    const auto band = band_traversal(trace, opt.band_lo, opt.band_hi);
    const bool on_high = model_info(trace.meta.model).on_at_high_state;
    r.t_on_to_off = on_high ? band.fall : band.rise;
    r.t_off_to_on = on_high ? band.rise : band.fall;
    if (r.t_on_to_off && r.t_off_to_on && *r.t_off_to_on > 0.0) {
        r.symmetry_ratio = *r.t_on_to_off / *r.t_off_to_on;
    }
    r.linearity = classify_linearity(r.linearity_r2, opt);
    r.symmetry = classify_symmetry(r.symmetry_ratio, opt);
    return r;
}

struct SummaryRow {
    std::string label;
    std::string model;
    Linearity linearity = Linearity::Nonlinear;
    Symmetry symmetry = Symmetry::Undetermined;
    double linearity_r2 = 0.0;
    std::optional<double> symmetry_ratio;
};

struct SummaryTable {
    std::vector<SummaryRow> rows;

    [[nodiscard]] std::string to_text() const {
        std::size_t w_label = 8;
        for (const auto& r : rows) w_label = std::max(w_label, r.label.size());
        std::ostringstream os;
        auto pad = [](std::string s, std::size_t n) {
            s.resize(std::max(n, s.size()), ' ');
            return s;
        };
        os << pad("scenario", w_label) << "  " << pad("model", 8) << "  " << pad("dynamics", 9) << "  "
           << pad("switching", 12) << "  " << pad("r2", 12) << "  ratio\n";
        for (const auto& r : rows) {
            std::ostringstream r2;
            r2.precision(6);
            r2 << r.linearity_r2;
            std::ostringstream ratio;
            ratio.precision(6);
            if (r.symmetry_ratio) {
                ratio << *r.symmetry_ratio;
            } else {
                ratio << '-';
            }
            os << pad(r.label, w_label) << "  " << pad(r.model, 8) << "  "
               << pad(std::string(to_string(r.linearity)), 9) << "  "
               << pad(std::string(to_string(r.symmetry)), 12) << "  " << pad(r2.str(), 12) << "  " << ratio.str()
               << '\n';
        }
        return os.str();
    }

    [[nodiscard]] std::string to_csv() const {
        std::ostringstream os;
        os.precision(17);
        os << "scenario,model,dynamics,switching,linearity_r2,symmetry_ratio\n";
        for (const auto& r : rows) {
            os << r.label << ',' << r.model << ',' << to_string(r.linearity) << ',' << to_string(r.symmetry) << ','
               << r.linearity_r2 << ',';
            if (r.symmetry_ratio) os << *r.symmetry_ratio;
            os << '\n';
        }
        return os.str();
    }
};

inline SummaryTable build_summary_table(const std::vector<AnalysisReport>& reports) {
    SummaryTable table;
    table.rows.reserve(reports.size());
    for (const auto& r : reports) {
        table.rows.push_back({r.label, r.model, r.linearity, r.symmetry, r.linearity_r2, r.symmetry_ratio});
    }
    return table;
}

}  // namespace memsim
