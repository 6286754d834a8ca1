// Command-line front end: loads a scenario, runs both routes and writes
// CSV files, optional SVG overlays and a key-value report.
//
// Exit status: 0 all comparisons pass, 1 a comparison failed,
// 2 invalid scenario or arguments, 3 numerical or I/O failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "roadmodal/roadmodal.hpp"

namespace {

// "name=value" sets one tolerance; a bare number sets all four.
void apply_override(roadmodal::ScenarioTolerances& t, const std::string& spec)
{
    const auto eq = spec.find('=');
    const std::string key = eq == std::string::npos ? "all" : spec.substr(0, eq);
    const std::string text = eq == std::string::npos ? spec : spec.substr(eq + 1);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty())
        throw roadmodal::UsageError("tolerance override '" + spec + "' needs a numeric value");
    if (key == "all") {
        t.psd_pointwise = t.psd_relative_rms = t.corr_relative_rms = t.corr_pointwise = value;
    } else if (key == "psd_pointwise") {
        t.psd_pointwise = value;
    } else if (key == "psd_relative_rms") {
        t.psd_relative_rms = value;
    } else if (key == "corr_relative_rms") {
        t.corr_relative_rms = value;
    } else if (key == "corr_pointwise") {
        t.corr_pointwise = value;
    } else if (key == "corr_central_fraction") {
        t.corr_central_fraction = value;
    } else {
        throw roadmodal::UsageError("unknown tolerance '" + key + "'");
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Road-induced vehicle response: modal synthesis checked against the input-output formula"};
    std::string scenario_path;
    std::string output_dir;
    bool defaults = false;
    bool check = false;
    bool print_scenario = false;
    std::vector<std::string> overrides;
    app.add_option("scenario", scenario_path, "Scenario JSON file");
    app.add_option("-o,--output-dir", output_dir, "Directory for CSV, SVG and report files");
    app.add_flag("--defaults", defaults, "Use the built-in reference scenario (a scenario file, if given, is ignored)");
    app.add_flag("--check", check, "Run the comparisons and write CSV and report only, no plots");
    app.add_option("--tolerance-override", overrides, "NAME=VALUE or a bare VALUE for all tolerances; repeatable");
    app.add_flag("--print-scenario", print_scenario, "Print the effective scenario as JSON and exit");
    CLI11_PARSE(app, argc, argv);

    roadmodal::Scenario scenario;
    try {
        if (defaults || scenario_path.empty()) {
            if (!defaults)
                throw roadmodal::UsageError("give a scenario file or --defaults");
            scenario = roadmodal::default_scenario();
        } else {
            scenario = roadmodal::load_scenario(scenario_path);
        }
        for (const auto& o : overrides)
            apply_override(scenario.tolerances, o);
        if (!output_dir.empty())
            scenario.output_dir = output_dir;
        if (auto v = roadmodal::scenario_violations(scenario); !v.empty())
            throw roadmodal::ValidationError(v);
    } catch (const roadmodal::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const roadmodal::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const roadmodal::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }

    if (print_scenario) {
        std::cout << roadmodal::scenario_to_json(scenario).dump(2) << "\n";
        return 0;
    }

    try {
        const auto result = roadmodal::run_scenario(scenario, {!check});
        for (const auto& w : result.warnings)
            std::cerr << "warning: " << w << "\n";
        std::cout << result.report_text;
        std::cout << "wrote " << result.files.size() << " files to " << scenario.output_dir << "\n";
        return result.pass ? 0 : 1;
    } catch (const roadmodal::Error& e) {
        const std::string where = defaults ? std::string("default scenario") : "scenario " + scenario_path;
        std::cerr << "error while running " << where << ": " << e.what() << "\n";
        return 3;
    }
}
