#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "memsim/analysis.hpp"
#include "memsim/solver.hpp"
#include "memsim/trace_io.hpp"

namespace memsim {

namespace fs = std::filesystem;
using ConfigTree = boost::property_tree::ptree;

/// Resistance transfer ratio R_OFF / R_ON shared by the replication setups.
inline constexpr double kReplicationTransferRatio = 160.0;

struct OutputOptions {
    fs::path dir = "out";
    bool plots = false;
};

struct Scenario {
    std::string name;
    ModelParams model;
    DriveSignal drive;
    DeviceState initial;
    SolverConfig solver;
    AnalysisOptions analysis;
    OutputOptions output;
    bool paper_replication = false;
    std::vector<std::string> warnings;
    fs::path source;
};

namespace detail {

class Section {
public:
    Section(const ConfigTree& tree, std::string name) : name_(std::move(name)) {
        if (const auto child = tree.get_child_optional(name_)) node_ = &*child;
    }

    [[nodiscard]] bool present() const noexcept { return node_ != nullptr; }

    [[nodiscard]] std::optional<std::string> raw(const std::string& key) {
        used_.insert(key);
        if (!node_) return std::nullopt;
        const auto v = node_->get_optional<std::string>(key);
        if (!v) return std::nullopt;
        return trim(*v);
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const auto v = raw(key);
        if (!v) {
            if (fallback) return *fallback;
            throw Error(ErrorKind::Config, "missing key [" + name_ + "] " + key);
        }
        try {
            std::size_t used = 0;
            const double x = std::stod(*v, &used);
            if (used != v->size() || !std::isfinite(x)) throw std::invalid_argument("trailing text");
            return x;
        } catch (const std::exception&) {
            throw Error(ErrorKind::Config, "[" + name_ + "] " + key + " = '" + *v + "' is not a number");
        }
    }

    int integer(const std::string& key, std::optional<int> fallback = std::nullopt) {
        const double x = number(key, fallback ? std::optional<double>(*fallback) : std::nullopt);
        if (x != std::floor(x) || std::abs(x) > 1e9) {
            throw Error(ErrorKind::Config, "[" + name_ + "] " + key + " must be an integer");
        }
        return static_cast<int>(x);
    }

    std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        const auto v = raw(key);
        if (v) return *v;
        if (fallback) return *fallback;
        throw Error(ErrorKind::Config, "missing key [" + name_ + "] " + key);
    }

    bool flag(const std::string& key, bool fallback) {
        const auto v = raw(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        throw Error(ErrorKind::Config, "[" + name_ + "] " + key + " must be true or false");
    }

    /// Rejects keys nobody asked for, which catches misspelt parameter names.
    void reject_unknown(const std::set<std::string>& also_allowed = {}) const {
        if (!node_) return;
        for (const auto& [key, _] : *node_) {
            if (!used_.contains(key) && !also_allowed.contains(key)) {
                throw Error(ErrorKind::Config, "unknown key [" + name_ + "] " + key);
            }
        }
    }

private:
    static std::string trim(std::string s) {
        const auto first = s.find_first_not_of(" \t");
        if (first == std::string::npos) return {};
        const auto last = s.find_last_not_of(" \t");
        return s.substr(first, last - first + 1);
    }

    const ConfigTree* node_ = nullptr;
    std::string name_;
    std::set<std::string> used_;
};

inline ModelParams parse_model(Section& s) {
    const std::string type = s.text("type");
    if (type == "strukov") {
        StrukovParams p;
        p.mu_v = s.number("mu_v");
        p.r_on = s.number("r_on");
        p.r_off = s.number("r_off");
        p.d = nm_to_m(s.number("d_nm"));
        s.reject_unknown({"params"});
        return p;
    }
    if (type == "yang") {
        YangParams p;
        p.alpha = s.number("alpha");
        p.m = s.integer("m");
        p.beta = s.number("beta");
        p.delta = s.number("delta");
        p.chi = s.number("chi");
        p.gamma = s.number("gamma");
        p.n = s.integer("n");
        p.arg_cap = s.number("arg_cap", kDefaultArgCap);
        s.reject_unknown({"params"});
        return p;
    }
    if (type == "pickett") {
        PickettParams p;
        p.f_off = s.number("f_off");
        p.f_on = s.number("f_on");
        p.i_off = s.number("i_off");
        p.i_on = s.number("i_on");
        p.a_off = nm_to_m(s.number("a_off_nm"));
        p.a_on = nm_to_m(s.number("a_on_nm"));
        p.b = s.number("b");
        p.w_c = nm_to_m(s.number("w_c_nm"));
        p.r_s = s.number("r_s");
        p.phi_0 = s.number("phi_0", 0.95);
        p.w_1 = nm_to_m(s.number("w_1_nm", 0.1261));
        p.current_scale = s.number("current_scale", 1.0);
        p.arg_cap = s.number("arg_cap", kDefaultArgCap);
        s.reject_unknown({"params"});
        return p;
    }
    throw Error(ErrorKind::Config, "unknown model type '" + type + "'");
}

inline DriveSignal parse_drive(Section& s) {
    DriveSignal d;
    const std::string kind = s.text("kind");
    if (kind == "current") {
        d.kind = DriveKind::Current;
    } else if (kind == "voltage") {
        d.kind = DriveKind::Voltage;
    } else {
        throw Error(ErrorKind::Config, "[drive] kind must be current or voltage");
    }
    const std::string shape = s.text("shape", "sine");
    if (shape == "sine") {
        d.shape = WaveShape::Sine;
    } else if (shape == "triangle") {
        d.shape = WaveShape::Triangle;
    } else if (shape == "pulse_train") {
        d.shape = WaveShape::PulseTrain;
    } else {
        throw Error(ErrorKind::Config, "[drive] shape must be sine, triangle or pulse_train");
    }
    d.phase = s.number("phase", 0.0);
    d.offset = s.number("offset", 0.0);
    if (d.shape == WaveShape::PulseTrain) {
        d.pulse.high = s.number("high");
        d.pulse.low = s.number("low", 0.0);
        d.pulse.t_high = s.number("t_high");
        d.pulse.t_low = s.number("t_low");
        d.frequency = 1.0 / (d.pulse.t_high + d.pulse.t_low);
        d.amplitude = std::max(std::abs(d.pulse.high), std::abs(d.pulse.low));
    } else {
        d.amplitude = s.number("amplitude");
        d.frequency = s.number("frequency");
    }
    s.reject_unknown();
    return d;
}

inline DeviceState parse_state(Section& s, const ModelParams& model) {
    return std::visit(
        [&](const auto& p) -> DeviceState {
            using T = std::decay_t<decltype(p)>;
            DeviceState st;
            if constexpr (std::is_same_v<T, StrukovParams>) {
                st.w_min = nm_to_m(s.number("w_min_nm", 0.0));
                st.w_max = s.raw("w_max_nm") ? nm_to_m(s.number("w_max_nm")) : p.d;
                st.w = nm_to_m(s.number("w0_nm"));
            } else if constexpr (std::is_same_v<T, YangParams>) {
                st.w_min = s.number("w_min", 0.0);
                st.w_max = s.number("w_max", 1.0);
                st.w = s.number("w0");
            } else {
                st.w_min = nm_to_m(s.number("w_min_nm"));
                st.w_max = nm_to_m(s.number("w_max_nm"));
                st.w = nm_to_m(s.number("w0_nm"));
            }
            s.reject_unknown();
            return st;
        },
        model);
}

inline SolverConfig parse_solver(Section& s) {
    SolverConfig c;
    const std::string method = s.text("method", "rk4_fixed");
    if (method == "rk4_fixed") {
        c.method = Method::Rk4Fixed;
    } else if (method == "rk45_adaptive") {
        c.method = Method::Rk45Adaptive;
    } else {
        throw Error(ErrorKind::Config, "[solver] method must be rk4_fixed or rk45_adaptive");
    }
    c.t_end = s.number("t_end");
    c.dt = s.number("dt");
    c.dt_min = s.number("dt_min", c.dt_min);
    c.dt_max = s.number("dt_max", std::max(c.dt, c.dt_max));
    c.rel_tol = s.number("rel_tol", c.rel_tol);
    c.abs_tol = s.number("abs_tol", c.abs_tol);
    c.newton_tol = s.number("newton_tol", c.newton_tol);
    c.newton_max_iter = s.integer("newton_max_iter", c.newton_max_iter);
    s.reject_unknown();
    return c;
}

inline AnalysisOptions parse_analysis(Section& s) {
    AnalysisOptions a;
    a.threshold_fraction = s.number("threshold_fraction", a.threshold_fraction);
    a.band_lo = s.number("band_lo", a.band_lo);
    a.band_hi = s.number("band_hi", a.band_hi);
    a.linear_r2_min = s.number("linear_r2_min", a.linear_r2_min);
    a.symmetric_ratio_lo = s.number("symmetric_ratio_lo", a.symmetric_ratio_lo);
    a.symmetric_ratio_hi = s.number("symmetric_ratio_hi", a.symmetric_ratio_hi);
    s.reject_unknown();
    return a;
}

inline ConfigTree read_ini(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open '" + path.string() + "'");
    ConfigTree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw Error(ErrorKind::Config, "'" + path.string() + "': " + e.message() + " (line " +
                                           std::to_string(e.line()) + ")");
    }
    return tree;
}

}  // namespace detail

/// Reads a scenario file and merges the [model] section of the referenced
/// parameter file underneath the scenario's own [model] keys.
inline ConfigTree load_scenario_tree(const fs::path& path) {
    if (!fs::exists(path)) throw Error(ErrorKind::Config, "scenario file '" + path.string() + "' not found");
    ConfigTree tree = detail::read_ini(path);
    const auto params_ref = tree.get_optional<std::string>("model.params");
    if (params_ref) {
        const fs::path params_path = path.parent_path() / *params_ref;
        if (!fs::exists(params_path)) {
            throw Error(ErrorKind::Config, "parameter file '" + params_path.string() + "' not found");
        }
        const ConfigTree params = detail::read_ini(params_path);
        ConfigTree merged = params.get_child("model", ConfigTree{});
        for (const auto& [key, value] : tree.get_child("model")) {
            if (key != "params") merged.put(key, value.data());
        }
        tree.put_child("model", merged);
    }
    tree.put("scenario.source", path.string());
    return tree;
}

/// Builds and validates a scenario from a merged configuration tree.
inline Scenario scenario_from_tree(const ConfigTree& tree) {
    Scenario sc;
    detail::Section head(tree, "scenario");
    sc.name = head.text("name");
    if (sc.name.empty()) throw Error(ErrorKind::Config, "[scenario] name must not be empty");
    sc.paper_replication = head.flag("paper_replication", false);
    sc.source = head.text("source", "");
    (void)head.text("description", "");
    head.reject_unknown();

    for (const auto& [section, _] : tree) {
        static const std::set<std::string> known{"scenario", "model", "drive", "state", "solver", "analysis", "output"};
        if (!known.contains(section)) throw Error(ErrorKind::Config, "unknown section [" + section + "]");
    }

    detail::Section model(tree, "model");
    if (!model.present()) throw Error(ErrorKind::Config, "missing [model] section");
    sc.model = detail::parse_model(model);
    detail::Section drive(tree, "drive");
    sc.drive = detail::parse_drive(drive);
    detail::Section state(tree, "state");
    sc.initial = detail::parse_state(state, sc.model);
    detail::Section solver(tree, "solver");
    sc.solver = detail::parse_solver(solver);
    detail::Section analysis(tree, "analysis");
    sc.analysis = detail::parse_analysis(analysis);
    detail::Section output(tree, "output");
    sc.output.dir = output.text("dir", "out");
    sc.output.plots = output.flag("plots", false);
    output.reject_unknown();

    validate(sc.model);
    sc.drive.validate();
    sc.solver.validate();
    sc.analysis.validate();
    (void)DeviceState::make(sc.initial.w, sc.initial.w_min, sc.initial.w_max);

    if (const auto* p = std::get_if<StrukovParams>(&sc.model)) {
        if (sc.initial.w_min < 0.0 || sc.initial.w_max > p->d * (1.0 + 1e-12)) {
            throw Error(ErrorKind::Validation, "strukov state bounds must lie within [0, D]");
        }
        if (sc.paper_replication && std::abs(p->transfer_ratio() - kReplicationTransferRatio) > 1e-9 * kReplicationTransferRatio) {
            sc.warnings.push_back("resistance transfer ratio R_OFF/R_ON = " + std::to_string(p->transfer_ratio()) +
                                  " differs from 160");
        }
    } else if (const auto* p = std::get_if<PickettParams>(&sc.model)) {
        if (!(p->w_1 < sc.initial.w_min)) {
            throw Error(ErrorKind::Validation, "pickett w_1 must be smaller than w_min");
        }
        for (const double w : {sc.initial.w_min, sc.initial.w_max}) {
            try {
                (void)pickett_aux(w, 0.0, *p);
            } catch (const Error& e) {
                throw Error(ErrorKind::Validation, std::string("state bound outside barrier validity: ") + e.what());
            }
        }
    } else if (std::get_if<YangParams>(&sc.model)) {
        if (sc.initial.w_min < 0.0 || sc.initial.w_max > 1.0) {
            throw Error(ErrorKind::Validation, "yang normalized state bounds must lie within [0, 1]");
        }
    }
    return sc;
}

inline Scenario load_scenario(const fs::path& path) { return scenario_from_tree(load_scenario_tree(path)); }

/// Content hash over everything that influences the numerical result.
inline std::string config_hash(const Scenario& s) {
    std::ostringstream os;
    os.precision(17);
    os << describe(s.model) << '|' << s.drive.describe() << '|' << s.solver.describe() << '|' << s.initial.w << ','
       << s.initial.w_min << ',' << s.initial.w_max << '|' << s.analysis.threshold_fraction << ','
       << s.analysis.band_lo << ',' << s.analysis.band_hi << ',' << s.analysis.linear_r2_min << ','
       << s.analysis.symmetric_ratio_lo << ',' << s.analysis.symmetric_ratio_hi;
    return hex64(fnv1a(os.str()));
}

struct RunResult {
    Trace trace;
    AnalysisReport report;
    std::string config_hash;
};

inline nlohmann::json run_record(const Scenario& s, const RunResult& r) {
    nlohmann::json j;
    j["scenario"] = s.name;
    j["config_hash"] = r.config_hash;
    j["determinism"] = "no random inputs; identical configuration reproduces the trace bit for bit";
    j["trace"] = to_json(r.trace.meta);
    j["report"] = to_json(r.report);
    j["warnings"] = s.warnings;
    return j;
}

/// Simulates, analyses, and (when out_dir is set) writes
/// <name>.csv, <name>.meta.json and <name>.report.json.
inline RunResult run_scenario(const Scenario& s, const std::optional<fs::path>& out_dir = std::nullopt) {
    RunResult result;
    try {
        result.trace = integrate(s.model, s.drive, s.initial, s.solver);
        result.report = analyze(result.trace, s.analysis, s.name);
    } catch (const Error& e) {
        std::string msg = e.what();
        const auto prefix = std::string(to_string(e.kind())) + ": ";
        if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
        throw Error(e.kind(), "scenario '" + s.name + "': " + msg);
    }
    result.config_hash = config_hash(s);
    if (out_dir) {
        fs::create_directories(*out_dir);
        const fs::path stem = *out_dir / s.name;
        write_text_file(stem.string() + ".csv", trace_csv_string(result.trace));
        nlohmann::json meta = to_json(result.trace.meta);
        meta["scenario"] = s.name;
        meta["config_hash"] = result.config_hash;
        write_text_file(stem.string() + ".meta.json", meta.dump(2) + "\n");
        write_text_file(stem.string() + ".report.json", run_record(s, result).dump(2) + "\n");
        if (s.output.plots) write_plot_data(stem, result.trace);
    }
    return result;
}

struct SweepOutcome {
    std::string value;
    std::string name;
    std::optional<RunResult> result;
    std::optional<Error> error;
};

inline std::string sanitize_suffix(std::string value) {
    for (char& c : value) {
        const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
        if (!keep) c = '_';
    }
    return value;
}

/// One independent run per value of the dotted key `param_path`
/// (e.g. "model.m", "drive.amplitude"). Runs execute in parallel; a failing
/// run is recorded and the others continue.
inline std::vector<SweepOutcome> run_sweep(const ConfigTree& base, const std::string& param_path,
                                           const std::vector<std::string>& values,
                                           const std::optional<fs::path>& out_dir = std::nullopt) {
    const auto dot = param_path.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == param_path.size()) {
        throw Error(ErrorKind::Config, "sweep parameter must be written section.key, got '" + param_path + "'");
    }
    if (!base.get_child_optional(param_path.substr(0, dot))) {
        throw Error(ErrorKind::Config, "sweep parameter section '" + param_path.substr(0, dot) + "' not in scenario");
    }
    const std::string base_name = base.get<std::string>("scenario.name", "scenario");

    std::vector<std::future<SweepOutcome>> jobs;
    jobs.reserve(values.size());
    for (const auto& value : values) {
        jobs.push_back(std::async(std::launch::async, [&base, &param_path, &base_name, value, &out_dir] {
            SweepOutcome out;
            out.value = value;
            out.name = base_name + "_" + sanitize_suffix(value);
            try {
                ConfigTree tree = base;
                tree.put(param_path, value);
                tree.put("scenario.name", out.name);
                const Scenario s = scenario_from_tree(tree);
                out.result = run_scenario(s, out_dir);
            } catch (const Error& e) {
                out.error = e;
            }
            return out;
        }));
    }
    std::vector<SweepOutcome> outcomes;
    outcomes.reserve(jobs.size());
    for (auto& j : jobs) outcomes.push_back(j.get());
    return outcomes;
}

}  // namespace memsim
