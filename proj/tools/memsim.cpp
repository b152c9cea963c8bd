// memsim: command-line front end for the memristor simulation library.
//
// Exit code 0 is success. 1 means the configuration or input was rejected; 2
// means the run itself failed. Diagnostics go to standard error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "memsim/memsim.hpp"

namespace fs = std::filesystem;
using namespace memsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

int exit_code_for(const Error& e) { return is_config_error(e.kind()) ? kExitConfig : kExitRuntime; }

fs::path scenario_dir() {
    if (const char* env = std::getenv("MEMSIM_SCENARIO_DIR"); env && *env) return env;
    return "scenarios";
}

/// Accepts a path, or a bare scenario name looked up in the scenario directory.
fs::path resolve_scenario(const std::string& arg) {
    const fs::path direct(arg);
    if (fs::is_regular_file(direct)) return direct;
    const fs::path dir = scenario_dir();
    for (const auto& candidate : {dir / arg, dir / (arg + ".cfg")}) {
        if (fs::is_regular_file(candidate)) return candidate;
    }
    throw Error(ErrorKind::Config, "scenario '" + arg + "' not found (also searched " + dir.string() + ")");
}

void print_report(const AnalysisReport& r) {
    std::cout << to_json(r).dump(2) << '\n';
}

struct Options {
    std::string scenario;
    std::vector<std::string> scenarios;
    std::string out_dir;
    bool plots = false;
    std::string param;
    std::vector<std::string> values;
    std::string trace_csv;
    std::string meta_path;
    std::string model;
    std::optional<double> w_min;
    std::optional<double> w_max;
    AnalysisOptions analysis;
    std::string list_dir;
};

int cmd_simulate(const Options& o) {
    try {
        Scenario s = load_scenario(resolve_scenario(o.scenario));
        if (o.plots) s.output.plots = true;
        for (const auto& w : s.warnings) std::cerr << "warning: " << s.name << ": " << w << '\n';
        const fs::path out = o.out_dir.empty() ? s.output.dir : fs::path(o.out_dir);
        const auto result = run_scenario(s, out);
        std::cerr << "wrote " << (out / (s.name + ".csv")).string() << " (" << result.trace.samples.size()
                  << " samples)\n";
        print_report(result.report);
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

int cmd_sweep(const Options& o) {
    try {
        const fs::path path = resolve_scenario(o.scenario);
        const ConfigTree base = load_scenario_tree(path);
        (void)scenario_from_tree(base);
        const fs::path out = o.out_dir.empty() ? fs::path(base.get<std::string>("output.dir", "out")) : fs::path(o.out_dir);
        const auto outcomes = run_sweep(base, o.param, o.values, out);
        int code = kExitOk;
        std::vector<AnalysisReport> reports;
        for (const auto& oc : outcomes) {
            if (oc.result) {
                reports.push_back(oc.result->report);
            } else {
                std::cerr << "error: " << oc.name << ": " << oc.error->what() << '\n';
                code = std::max(code, exit_code_for(*oc.error));
            }
        }
        if (!reports.empty()) std::cout << build_summary_table(reports).to_text();
        return code;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

int cmd_analyze(const Options& o) {
    Trace trace;
    std::string label;
    try {
        const fs::path csv(o.trace_csv);
        std::ifstream in(csv, std::ios::binary);
        if (!in) throw Error(ErrorKind::Config, "cannot open trace '" + csv.string() + "'");
        trace.samples = read_trace_samples(in);

        fs::path meta = o.meta_path;
        if (meta.empty()) {
            fs::path sidecar = csv;
            sidecar.replace_extension(".meta.json");
            if (fs::is_regular_file(sidecar)) meta = sidecar;
        }
        if (!meta.empty()) {
            std::ifstream mi(meta);
            if (!mi) throw Error(ErrorKind::Config, "cannot open metadata '" + meta.string() + "'");
            nlohmann::json j;
            try {
                mi >> j;
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorKind::Config, "malformed metadata '" + meta.string() + "': " + e.what());
            }
            trace.meta = metadata_from_json(j);
            label = j.value("scenario", "");
        } else {
            if (o.model.empty()) {
                throw Error(ErrorKind::Config, "no metadata sidecar found; pass --model (and optionally bounds)");
            }
            trace.meta.model = o.model;
            double lo = trace.samples.front().w;
            double hi = lo;
            for (const auto& s : trace.samples) {
                lo = std::min(lo, s.w);
                hi = std::max(hi, s.w);
            }
            trace.meta.w_min = lo;
            trace.meta.w_max = hi;
        }
        if (!o.model.empty()) trace.meta.model = o.model;
        if (o.w_min) trace.meta.w_min = *o.w_min;
        if (o.w_max) trace.meta.w_max = *o.w_max;
        (void)model_info(trace.meta.model);
    } catch (const Error& e) {
        // Unreadable or empty input is a usage problem regardless of its kind.
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    try {
        const auto report = analyze(trace, o.analysis, label);
        print_report(report);
        if (!o.out_dir.empty()) {
            fs::create_directories(o.out_dir);
            const std::string stem = label.empty() ? fs::path(o.trace_csv).stem().string() : label;
            write_text_file(fs::path(o.out_dir) / (stem + ".analysis.json"), to_json(report).dump(2) + "\n");
        }
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

int cmd_compare(const Options& o) {
    if (o.scenarios.size() < 2) {
        std::cerr << "error: compare needs at least two scenarios\n";
        return kExitConfig;
    }
    std::vector<AnalysisReport> reports;
    int code = kExitOk;
    for (const auto& arg : o.scenarios) {
        try {
            Scenario s = load_scenario(resolve_scenario(arg));
            for (const auto& w : s.warnings) std::cerr << "warning: " << s.name << ": " << w << '\n';
            const fs::path out = o.out_dir.empty() ? s.output.dir : fs::path(o.out_dir);
            reports.push_back(run_scenario(s, out).report);
        } catch (const Error& e) {
            std::cerr << "error: " << arg << ": " << e.what() << '\n';
            code = std::max(code, exit_code_for(e));
        }
    }
    if (!reports.empty()) {
        const auto table = build_summary_table(reports);
        std::cout << table.to_text();
        if (!o.out_dir.empty()) {
            fs::create_directories(o.out_dir);
            write_text_file(fs::path(o.out_dir) / "summary.csv", table.to_csv());
            write_text_file(fs::path(o.out_dir) / "summary.txt", table.to_text());
        }
    }
    // Failures were only partial if something succeeded; a config-only failure set stays 1.
    if (code != kExitOk && !reports.empty()) code = kExitRuntime;
    return code;
}

int cmd_list(const Options& o) {
    const fs::path dir = o.list_dir.empty() ? scenario_dir() : fs::path(o.list_dir);
    if (!fs::is_directory(dir)) {
        std::cerr << "error: scenario directory '" << dir.string() << "' not found\n";
        return kExitConfig;
    }
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".cfg") names.push_back(entry.path().stem().string());
    }
    std::sort(names.begin(), names.end());
    for (const auto& n : names) std::cout << n << '\n';
    return kExitOk;
}

void add_analysis_flags(CLI::App* cmd, AnalysisOptions& a) {
    cmd->add_option("--fraction", a.threshold_fraction, "threshold fraction of max |dw/dt|");
    cmd->add_option("--band-lo", a.band_lo, "lower switching band level (fraction of state range)");
    cmd->add_option("--band-hi", a.band_hi, "upper switching band level");
    cmd->add_option("--r2-min", a.linear_r2_min, "linear classification cutoff");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"memsim - memristor model simulation and switching-dynamics analysis"};
    app.require_subcommand(1, 1);
    Options o;

    auto* simulate = app.add_subcommand("simulate", "run one scenario and write its trace and report");
    simulate->add_option("scenario", o.scenario, "scenario file or name")->required();
    simulate->add_option("-o,--out", o.out_dir, "output directory (default: the scenario's [output] dir)");
    simulate->add_flag("--plots", o.plots, "also write I-V, w-t and dw/dt-v data files");

    auto* sweep = app.add_subcommand("sweep", "run a scenario once per value of one parameter");
    sweep->add_option("scenario", o.scenario, "scenario file or name")->required();
    sweep->add_option("-p,--param", o.param, "section.key to vary, e.g. model.m")->required();
    sweep->add_option("-v,--values", o.values, "values, comma separated")->delimiter(',');
    sweep->add_option("-o,--out", o.out_dir, "output directory");

    auto* analyze_cmd = app.add_subcommand("analyze", "analyse an existing trace CSV");
    analyze_cmd->add_option("trace", o.trace_csv, "trace CSV with columns t,v,i,w,dwdt")->required();
    analyze_cmd->add_option("--meta", o.meta_path, "metadata JSON (default: <trace>.meta.json if present)");
    analyze_cmd->add_option("--model", o.model, "model id: strukov, yang or pickett");
    analyze_cmd->add_option("--w-min", o.w_min, "lower state bound, trace units");
    analyze_cmd->add_option("--w-max", o.w_max, "upper state bound, trace units");
    analyze_cmd->add_option("-o,--out", o.out_dir, "directory for the analysis JSON");
    add_analysis_flags(analyze_cmd, o.analysis);

    auto* compare = app.add_subcommand("compare", "run scenarios and print the classification table");
    compare->add_option("scenarios", o.scenarios, "two or more scenario files or names")->required();
    compare->add_option("-o,--out", o.out_dir, "output directory");

    auto* list = app.add_subcommand("list-scenarios", "list scenarios in the scenario directory");
    list->add_option("--dir", o.list_dir, "directory (default: $MEMSIM_SCENARIO_DIR or ./scenarios)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (*simulate) return cmd_simulate(o);
    if (*sweep) return cmd_sweep(o);
    if (*analyze_cmd) return cmd_analyze(o);
    if (*compare) return cmd_compare(o);
    if (*list) return cmd_list(o);
    return kExitConfig;
}
