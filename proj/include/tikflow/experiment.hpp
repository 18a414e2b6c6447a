#ifndef TIKFLOW_EXPERIMENT_HPP
#define TIKFLOW_EXPERIMENT_HPP

#include <filesystem>
#include <optional>
#include <string>

#include "tikflow/diagnostics.hpp"

namespace tikflow {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ExperimentConfig {
    ExperimentConfig(OperatorSpec op_, TikhonovSchedule schedule_)
        : op(std::move(op_)), schedule(std::move(schedule_)) {}

    OperatorSpec op;
    TikhonovSchedule schedule;
    SystemKind system = SystemKind::DS;
    DynamicsParams params;
    Vec x0;
    Vec v0;
    double tf = 100.0;
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    std::size_t sample_count = 400;
    std::optional<Vec> x_star;
    std::filesystem::path output_dir = "out";

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_file(const std::filesystem::path& path);
};

struct RunArtifacts {
    std::filesystem::path trajectory_csv;
    std::filesystem::path diagnostics_csv;
    std::filesystem::path summary_json;
    std::filesystem::path hypotheses_json;
    bool hypothesis_warning = false;
};

struct RunResult {
    RunArtifacts artifacts;
    Trajectory trajectory;
    HypothesisReport hypotheses;
    std::optional<RateFit> distance_rate;
    std::optional<DecayCertificate> certificate;
    double final_dist_to_ref = 0.0; // ||x(tf) - x*||, 0 when no reference
};

/// Output root override; paths in configs resolve beneath it when set.
constexpr const char* kOutputRootEnv = "TIKFLOW_OUTPUT_ROOT";

/// Full pipeline: hypothesis check, integration, diagnostics, file outputs.
RunResult run_experiment(const ExperimentConfig& cfg);
RunResult run_experiment(const std::filesystem::path& config_path);

/// Hypothesis check only (the `check` CLI verb).
HypothesisReport check_experiment(const ExperimentConfig& cfg);

struct SweepResult {
    std::vector<std::pair<double, RunArtifacts>> runs;
    std::vector<std::string> failures;
    std::filesystem::path rates_csv;
};

/// One run per value of the swept parameter (q, gamma, delta, eta or tf);
/// aggregates fitted rates into rates.csv. Per-run failures are recorded and
/// the sweep continues.
SweepResult sweep(const std::filesystem::path& config_path, const std::string& parameter,
                  const std::vector<double>& values);

std::string hypotheses_to_json(const HypothesisReport& report);

} // namespace tikflow

#endif
