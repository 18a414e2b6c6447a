#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tikflow/experiment.hpp"

namespace {

int fail_with_error_json(const std::exception& e) {
    nlohmann::ordered_json err;
    err["error"] = true;
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inertial Tikhonov-regularized flow solver for comonotone inclusions"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "run an experiment config end to end");
    run_cmd->add_option("config", config_path, "experiment config file (JSON)")->required();

    std::string check_config;
    auto* check_cmd = app.add_subcommand("check", "validate hypotheses only");
    check_cmd->add_option("config", check_config, "experiment config file (JSON)")->required();

    std::string sweep_config, sweep_param;
    std::vector<double> sweep_values;
    auto* sweep_cmd = app.add_subcommand("sweep", "run once per parameter value");
    sweep_cmd->add_option("config", sweep_config, "experiment config file (JSON)")->required();
    sweep_cmd->add_option("--param", sweep_param, "parameter: q, gamma, delta, eta, tf")
        ->required();
    sweep_cmd->add_option("--values", sweep_values, "parameter values")
        ->required()
        ->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            const tikflow::RunResult res = tikflow::run_experiment(config_path);
            if (res.artifacts.hypothesis_warning)
                std::cerr << "warning: some hypothesis conditions are not satisfied "
                             "(see hypotheses.json)\n";
            std::cout << "trajectory:  " << res.artifacts.trajectory_csv.string() << "\n"
                      << "diagnostics: " << res.artifacts.diagnostics_csv.string() << "\n"
                      << "summary:     " << res.artifacts.summary_json.string() << "\n"
                      << "hypotheses:  " << res.artifacts.hypotheses_json.string() << "\n";
        } else if (*check_cmd) {
            const auto cfg = tikflow::ExperimentConfig::from_file(check_config);
            std::cout << tikflow::hypotheses_to_json(tikflow::check_experiment(cfg));
        } else if (*sweep_cmd) {
            const tikflow::SweepResult res =
                tikflow::sweep(sweep_config, sweep_param, sweep_values);
            for (const auto& f : res.failures) std::cerr << "run failed: " << f << "\n";
            std::cout << "rates: " << res.rates_csv.string() << "\n";
        }
    } catch (const std::exception& e) {
        return fail_with_error_json(e);
    }
    return 0;
}
