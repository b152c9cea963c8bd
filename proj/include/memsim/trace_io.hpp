#pragma once

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "memsim/analysis.hpp"
#include "memsim/solver.hpp"

namespace memsim {

inline constexpr std::array<std::string_view, 5> kTraceColumns{"t", "v", "i", "w", "dwdt"};

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double x) {
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc{}) throw Error(ErrorKind::Config, "cannot format number");
    return {buf.data(), end};
}

inline void write_trace_csv(std::ostream& os, const Trace& trace) {
    os << "t,v,i,w,dwdt\n";
    for (const auto& s : trace.samples) {
        os << format_double(s.t) << ',' << format_double(s.v) << ',' << format_double(s.i) << ','
           << format_double(s.w) << ',' << format_double(s.dwdt) << '\n';
    }
}

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view field, std::size_t line_no) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw Error(ErrorKind::Config,
                    "malformed number '" + std::string(field) + "' on line " + std::to_string(line_no));
    }
    return value;
}

}  // namespace detail

/// Reads the sample columns of a trace CSV. Column order is free; all five
/// columns are required. Metadata is not part of the CSV.
inline std::vector<Sample> read_trace_samples(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorKind::Config, "trace CSV is empty (no header)");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = detail::split_commas(line);
    std::array<std::size_t, 5> index{};
    for (std::size_t c = 0; c < kTraceColumns.size(); ++c) {
        std::optional<std::size_t> found;
        for (std::size_t h = 0; h < header.size(); ++h) {
            if (header[h] == kTraceColumns[c]) found = h;
        }
        if (!found) {
            throw Error(ErrorKind::Config, "trace CSV is missing column '" + std::string(kTraceColumns[c]) + "'");
        }
        index[c] = *found;
    }

    std::vector<Sample> samples;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split_commas(line);
        if (fields.size() != header.size()) {
            throw Error(ErrorKind::Config, "wrong field count on line " + std::to_string(line_no));
        }
        Sample s;
        s.t = detail::parse_double(fields[index[0]], line_no);
        s.v = detail::parse_double(fields[index[1]], line_no);
        s.i = detail::parse_double(fields[index[2]], line_no);
        s.w = detail::parse_double(fields[index[3]], line_no);
        s.dwdt = detail::parse_double(fields[index[4]], line_no);
        if (!samples.empty() && !(s.t > samples.back().t)) {
            throw Error(ErrorKind::Config, "timestamps not strictly increasing at line " + std::to_string(line_no));
        }
        samples.push_back(s);
    }
    if (samples.empty()) throw Error(ErrorKind::InsufficientData, "trace CSV has a header but no samples");
    return samples;
}

inline nlohmann::json to_json(const TraceMetadata& m) {
    return {{"model", m.model},         {"params_hash", m.params_hash},
            {"drive", m.drive},         {"solver", m.solver},
            {"drive_kind", std::string(to_string(m.drive_kind))},
            {"w_min", m.w_min},         {"w_max", m.w_max}};
}

inline TraceMetadata metadata_from_json(const nlohmann::json& j) {
    try {
        TraceMetadata m;
        m.model = j.at("model").get<std::string>();
        m.params_hash = j.value("params_hash", "");
        m.drive = j.value("drive", "");
        m.solver = j.value("solver", "");
        m.drive_kind = j.value("drive_kind", "voltage") == "current" ? DriveKind::Current : DriveKind::Voltage;
        m.w_min = j.at("w_min").get<double>();
        m.w_max = j.at("w_max").get<double>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("bad trace metadata: ") + e.what());
    }
}

inline nlohmann::json to_json(const AnalysisReport& r) {
    auto opt = [](const std::optional<double>& x) { return x ? nlohmann::json(*x) : nlohmann::json(nullptr); };
    return {{"label", r.label},
            {"model", r.model},
            {"threshold_fraction", r.threshold_fraction},
            {"threshold_pos", opt(r.threshold_pos)},
            {"threshold_neg", opt(r.threshold_neg)},
            {"t_on_to_off", opt(r.t_on_to_off)},
            {"t_off_to_on", opt(r.t_off_to_on)},
            {"symmetry_ratio", opt(r.symmetry_ratio)},
            {"linearity_r2", r.linearity_r2},
            {"pinched_residual", r.pinched_residual},
            {"peak_current", r.peak_current},
            {"linearity", std::string(to_string(r.linearity))},
            {"symmetry", std::string(to_string(r.symmetry))}};
}

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Config, "cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error(ErrorKind::Config, "write failed for '" + path.string() + "'");
}

inline std::string trace_csv_string(const Trace& trace) {
    std::ostringstream os;
    write_trace_csv(os, trace);
    return os.str();
}

/// Plot-ready column pairs: I-V loop, state vs time, dw/dt vs v.
inline void write_plot_data(const std::filesystem::path& stem, const Trace& trace) {
    std::ostringstream iv;
    std::ostringstream wt;
    std::ostringstream rate;
    iv << "v,i\n";
    wt << "t,w\n";
    rate << "v,dwdt\n";
    for (const auto& s : trace.samples) {
        iv << format_double(s.v) << ',' << format_double(s.i) << '\n';
        wt << format_double(s.t) << ',' << format_double(s.w) << '\n';
        rate << format_double(s.v) << ',' << format_double(s.dwdt) << '\n';
    }
    write_text_file(stem.string() + ".iv.csv", iv.str());
    write_text_file(stem.string() + ".wt.csv", wt.str());
    write_text_file(stem.string() + ".dwdt_v.csv", rate.str());
}

}  // namespace memsim
