#include "tikflow/experiment.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tikflow {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

void reject_unknown_keys(const json& obj, const char* block,
                         std::initializer_list<const char*> known) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok)
            throw ConfigError(std::string("unknown key '") + key + "' in block '" + block + "'");
    }
}

const json& require(const json& obj, const char* block, const char* key) {
    if (!obj.contains(key))
        throw ConfigError(std::string("missing key '") + key + "' in block '" + block + "'");
    return obj.at(key);
}

Vec parse_vec(const json& j, const char* where) {
    if (!j.is_array()) throw ConfigError(std::string(where) + ": expected an array of numbers");
    Vec v;
    for (const auto& e : j) {
        if (!e.is_number()) throw ConfigError(std::string(where) + ": expected numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

Mat parse_mat(const json& j, const char* where) {
    if (!j.is_array() || j.empty())
        throw ConfigError(std::string(where) + ": expected an array of rows");
    const std::size_t n = j.size();
    std::vector<double> entries;
    entries.reserve(n * n);
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != n)
            throw ConfigError(std::string(where) + ": matrix must be square, rows of length " +
                              std::to_string(n));
        for (const auto& e : row) entries.push_back(e.get<double>());
    }
    return Mat(n, std::move(entries));
}

OperatorSpec parse_operator(const json& j) {
    reject_unknown_keys(j, "operator", {"kind", "matrix", "offset", "rho", "eta"});
    const std::string kind = require(j, "operator", "kind").get<std::string>();
    const double rho = require(j, "operator", "rho").get<double>();
    const double eta = require(j, "operator", "eta").get<double>();
    const Mat m = parse_mat(require(j, "operator", "matrix"), "operator.matrix");
    try {
        if (kind == "linear") {
            if (j.contains("offset"))
                throw ConfigError("operator.offset is only valid for kind 'affine'");
            return OperatorSpec(LinearMatrix{m}, rho, eta);
        }
        if (kind == "affine") {
            const Vec b = parse_vec(require(j, "operator", "offset"), "operator.offset");
            return OperatorSpec(Affine{m, b}, rho, eta);
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("operator: ") + e.what());
    } catch (const DimensionMismatch& e) {
        throw ConfigError(std::string("operator: ") + e.what());
    }
    throw ConfigError("operator.kind must be 'linear' or 'affine'");
}

TikhonovSchedule parse_schedule(const json& j) {
    reject_unknown_keys(j, "schedule", {"kind", "q", "t0"});
    const std::string kind = require(j, "schedule", "kind").get<std::string>();
    if (kind != "power")
        throw ConfigError("schedule.kind: only 'power' is configurable from files");
    const double q = require(j, "schedule", "q").get<double>();
    const double t0 = require(j, "schedule", "t0").get<double>();
    try {
        return TikhonovSchedule(PowerSchedule{q}, t0);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("schedule: ") + e.what());
    }
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void atomic_write(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
    }
    fs::rename(tmp, path);
}

fs::path resolve_output_dir(const fs::path& configured) {
    if (const char* root = std::getenv(kOutputRootEnv); root && *root)
        return fs::path(root) / configured;
    return configured;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    reject_unknown_keys(j, "<root>", {"operator", "schedule", "dynamics", "initial",
                                      "integration", "reference", "output"});

    ExperimentConfig cfg(parse_operator(require(j, "<root>", "operator")),
                         parse_schedule(require(j, "<root>", "schedule")));

    const json& dyn = require(j, "<root>", "dynamics");
    reject_unknown_keys(dyn, "dynamics", {"system", "gamma", "delta", "alpha", "beta"});
    const std::string sys = require(dyn, "dynamics", "system").get<std::string>();
    if (sys == "ds")
        cfg.system = SystemKind::DS;
    else if (sys == "tds")
        cfg.system = SystemKind::TDS;
    else
        throw ConfigError("dynamics.system must be 'ds' or 'tds'");
    if (dyn.contains("gamma")) cfg.params.gamma = dyn.at("gamma").get<double>();
    if (dyn.contains("delta")) cfg.params.delta = dyn.at("delta").get<double>();
    if (dyn.contains("alpha")) cfg.params.alpha = dyn.at("alpha").get<double>();
    if (dyn.contains("beta")) cfg.params.beta = dyn.at("beta").get<double>();
    if (!(cfg.params.gamma > 0.0) || !(cfg.params.delta > 0.0))
        throw ConfigError("dynamics.gamma and dynamics.delta must be positive");

    const json& init = require(j, "<root>", "initial");
    reject_unknown_keys(init, "initial", {"x0", "v0"});
    cfg.x0 = parse_vec(require(init, "initial", "x0"), "initial.x0");
    cfg.v0 = parse_vec(require(init, "initial", "v0"), "initial.v0");
    if (cfg.x0.size() != cfg.op.dim() || cfg.v0.size() != cfg.op.dim())
        throw ConfigError("initial.x0/v0 dimension does not match the operator");

    const json& integ = require(j, "<root>", "integration");
    reject_unknown_keys(integ, "integration", {"tf", "rel_tol", "abs_tol", "samples"});
    cfg.tf = require(integ, "integration", "tf").get<double>();
    if (integ.contains("rel_tol")) cfg.rel_tol = integ.at("rel_tol").get<double>();
    if (integ.contains("abs_tol")) cfg.abs_tol = integ.at("abs_tol").get<double>();
    if (integ.contains("samples")) cfg.sample_count = integ.at("samples").get<std::size_t>();
    if (!(cfg.tf > cfg.schedule.t0())) throw ConfigError("integration.tf must exceed schedule.t0");
    if (!(cfg.rel_tol > 0.0 && cfg.abs_tol > 0.0))
        throw ConfigError("integration tolerances must be positive");
    if (cfg.sample_count < 2) throw ConfigError("integration.samples must be at least 2");

    if (j.contains("reference")) {
        const json& ref = j.at("reference");
        reject_unknown_keys(ref, "reference", {"x_star"});
        if (ref.contains("x_star")) {
            Vec xs = parse_vec(ref.at("x_star"), "reference.x_star");
            if (xs.size() != cfg.op.dim())
                throw ConfigError("reference.x_star dimension does not match the operator");
            cfg.x_star = std::move(xs);
        }
    }

    if (j.contains("output")) {
        const json& out = j.at("output");
        reject_unknown_keys(out, "output", {"directory", "formats"});
        if (out.contains("directory"))
            cfg.output_dir = out.at("directory").get<std::string>();
        if (out.contains("formats")) {
            for (const auto& f : out.at("formats")) {
                const std::string name = f.get<std::string>();
                if (name != "csv" && name != "json")
                    throw ConfigError("output.formats entries must be 'csv' or 'json'");
            }
        }
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string hypotheses_to_json(const HypothesisReport& report) {
    ordered_json j;
    j["all_satisfied"] = report.all_satisfied();
    ordered_json entries = ordered_json::array();
    for (const auto& e : report.entries) {
        ordered_json je;
        je["name"] = e.name;
        je["verdict"] = to_string(e.verdict);
        je["pointwise"] = e.pointwise;
        if (e.t1_estimate) je["t1_estimate"] = *e.t1_estimate;
        je["evidence"] = e.evidence;
        entries.push_back(std::move(je));
    }
    j["conditions"] = std::move(entries);
    return j.dump(2) + "\n";
}

HypothesisReport check_experiment(const ExperimentConfig& cfg) {
    const auto grid = log_grid(cfg.schedule.t0(), cfg.tf, 200);
    return check_hypotheses(cfg.schedule, cfg.params, cfg.op, grid);
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    RunResult result;
    result.hypotheses = check_experiment(cfg);

    const PhaseState state0 = initial_phase_state(cfg.system, cfg.x0, cfg.v0,
                                                  cfg.schedule.t0(), cfg.params,
                                                  cfg.schedule, cfg.op);
    IntegratorConfig icfg;
    icfg.rel_tol = cfg.rel_tol;
    icfg.abs_tol = cfg.abs_tol;
    icfg.sample_times = log_grid(cfg.schedule.t0(), cfg.tf, cfg.sample_count);
    result.trajectory =
        integrate_phase(cfg.system, state0, cfg.tf, icfg, cfg.params, cfg.schedule, cfg.op);

    const std::size_t n = cfg.op.dim();
    const auto& samples = result.trajectory.samples;

    // trajectory.csv
    std::ostringstream traj_csv;
    traj_csv << "t";
    for (std::size_t i = 0; i < n; ++i) traj_csv << ",x" << i;
    for (std::size_t i = 0; i < n; ++i) traj_csv << ",xdot" << i;
    traj_csv << ",dist_to_ref,velocity_norm,yosida_norm\n";
    for (const auto& smp : samples) {
        traj_csv << format_g17(smp.t);
        for (double v : smp.x) traj_csv << "," << format_g17(v);
        for (double v : smp.xdot) traj_csv << "," << format_g17(v);
        const double dist = cfg.x_star ? norm(smp.x - *cfg.x_star)
                                       : std::numeric_limits<double>::quiet_NaN();
        traj_csv << "," << format_g17(dist) << "," << format_g17(norm(smp.xdot)) << ","
                 << format_g17(norm(cfg.op.yosida(smp.x))) << "\n";
    }

    // diagnostics.csv + distance series for rate fitting (DS semantics)
    std::ostringstream diag_csv;
    diag_csv << "t,energy,dist_to_viscosity_sq,residual_position,residual_velocity,"
                "residual_operator\n";
    std::vector<std::pair<double, double>> dist_series;
    for (const auto& smp : samples) {
        const EnergyRecord er =
            energy(smp.t, smp.x, smp.xdot, cfg.params, cfg.schedule, cfg.op);
        const Vec diff = smp.x - er.x_eps;
        const double d2 = dot(diff, diff);
        dist_series.emplace_back(smp.t, d2);
        diag_csv << format_g17(er.t) << "," << format_g17(er.energy) << "," << format_g17(d2)
                 << "," << format_g17(er.bound_residuals[0]) << ","
                 << format_g17(er.bound_residuals[1]) << ","
                 << format_g17(er.bound_residuals[2]) << "\n";
    }

    // rate fit over the trailing half of log-time
    const auto q = cfg.schedule.power_q();
    if (cfg.system == SystemKind::DS && q) {
        bool positive = true;
        for (const auto& [t, v] : dist_series) positive = positive && v > 0.0;
        if (positive && dist_series.size() >= 10)
            result.distance_rate = fit_rate(dist_series, 0.5, "dist_to_viscosity_sq",
                                            theory_exponent_distance_sq(*q));
    }

    // decay certificate (needs every hypothesis condition and a reference)
    const HypothesisEntry* cond_e = result.hypotheses.find("second_derivative_decay");
    if (cfg.system == SystemKind::DS && cfg.x_star && result.hypotheses.all_satisfied() &&
        cond_e && cond_e->t1_estimate) {
        result.certificate = decay_certificate(result.trajectory, cfg.params, cfg.schedule,
                                               cfg.op, *cond_e->t1_estimate, cfg.x_star);
    }

    if (cfg.x_star && !samples.empty())
        result.final_dist_to_ref = norm(samples.back().x - *cfg.x_star);

    // summary.json
    ordered_json summary;
    summary["system"] = cfg.system == SystemKind::DS ? "ds" : "tds";
    if (q) summary["q"] = *q;
    if (!samples.empty()) {
        const auto& last = samples.back();
        summary["final_time"] = last.t;
        summary["final_x"] = last.x;
        summary["final_x_norm"] = norm(last.x);
        summary["final_velocity_norm"] = norm(last.xdot);
        summary["final_yosida_norm"] = norm(cfg.op.yosida(last.x));
        if (cfg.x_star) summary["final_dist_to_ref"] = result.final_dist_to_ref;
    }
    if (result.distance_rate) {
        const auto& f = *result.distance_rate;
        summary["rate_fit"] = ordered_json{{"quantity", f.quantity},
                                           {"t_lo", f.t_lo},
                                           {"t_hi", f.t_hi},
                                           {"slope", f.slope},
                                           {"r_squared", f.r_squared},
                                           {"theory_exponent", f.theory_exponent}};
    }
    if (result.certificate) {
        const auto& c = *result.certificate;
        ordered_json jc{{"t1", c.t1}, {"a_choice", c.a_choice}, {"satisfied", c.satisfied}};
        if (c.omega_max_rel_dev) jc["omega_max_rel_dev"] = *c.omega_max_rel_dev;
        summary["decay_certificate"] = std::move(jc);
    }
    summary["hypothesis_warning"] = !result.hypotheses.all_satisfied();
    summary["steps_accepted"] = result.trajectory.stats.accepted;
    summary["steps_rejected"] = result.trajectory.stats.rejected;

    const fs::path dir = resolve_output_dir(cfg.output_dir);
    result.artifacts.trajectory_csv = dir / "trajectory.csv";
    result.artifacts.diagnostics_csv = dir / "diagnostics.csv";
    result.artifacts.summary_json = dir / "summary.json";
    result.artifacts.hypotheses_json = dir / "hypotheses.json";
    result.artifacts.hypothesis_warning = !result.hypotheses.all_satisfied();
    atomic_write(result.artifacts.trajectory_csv, traj_csv.str());
    atomic_write(result.artifacts.diagnostics_csv, diag_csv.str());
    atomic_write(result.artifacts.summary_json, summary.dump(2) + "\n");
    atomic_write(result.artifacts.hypotheses_json, hypotheses_to_json(result.hypotheses));
    return result;
}

RunResult run_experiment(const fs::path& config_path) {
    return run_experiment(ExperimentConfig::from_file(config_path));
}

SweepResult sweep(const fs::path& config_path, const std::string& parameter,
                  const std::vector<double>& values) {
    if (values.empty()) throw InsufficientData("sweep: empty value list");

    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file " + config_path.string());
    json base;
    try {
        base = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    SweepResult result;
    std::ostringstream rates;
    rates << "value,slope,r_squared,theory_exponent,final_x_norm\n";

    for (double v : values) {
        json patched = base;
        if (parameter == "q")
            patched["schedule"]["q"] = v;
        else if (parameter == "gamma")
            patched["dynamics"]["gamma"] = v;
        else if (parameter == "delta")
            patched["dynamics"]["delta"] = v;
        else if (parameter == "eta")
            patched["operator"]["eta"] = v;
        else if (parameter == "tf")
            patched["integration"]["tf"] = v;
        else
            throw ConfigError("sweep: parameter must be one of q, gamma, delta, eta, tf");

        std::ostringstream tag;
        tag << parameter << "_" << v;
        const std::string base_dir =
            patched.contains("output") && patched["output"].contains("directory")
                ? patched["output"]["directory"].get<std::string>()
                : std::string("out");
        patched["output"]["directory"] = base_dir + "/" + tag.str();

        try {
            const RunResult run = run_experiment(ExperimentConfig::from_json_text(patched.dump()));
            rates << format_g17(v);
            if (run.distance_rate)
                rates << "," << format_g17(run.distance_rate->slope) << ","
                      << format_g17(run.distance_rate->r_squared) << ","
                      << format_g17(run.distance_rate->theory_exponent);
            else
                rates << ",nan,nan,nan";
            double final_norm = std::numeric_limits<double>::quiet_NaN();
            if (!run.trajectory.samples.empty())
                final_norm = norm(run.trajectory.samples.back().x);
            rates << "," << format_g17(final_norm) << "\n";
            result.runs.emplace_back(v, run.artifacts);
        } catch (const std::exception& e) {
            result.failures.push_back(tag.str() + ": " + e.what());
            rates << format_g17(v) << ",nan,nan,nan,nan\n";
        }
    }

    const std::string base_dir =
        base.contains("output") && base["output"].contains("directory")
            ? base["output"]["directory"].get<std::string>()
            : std::string("out");
    result.rates_csv = resolve_output_dir(fs::path(base_dir)) / "rates.csv";
    atomic_write(result.rates_csv, rates.str());
    return result;
}

} // namespace tikflow
