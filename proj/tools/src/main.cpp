#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hknoise/ensemble.hpp"
#include "hknoise/io.hpp"
#include "hknoise/version.hpp"
#include "hknoise/walk.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> horizon;
    std::optional<std::size_t> replicates;
    bool record_states = false;
    bool wall_clock_seed = false;
    unsigned threads = 0;
};

void add_common_options(CLI::App* cmd, CommonFlags& flags, bool with_config = true) {
    if (with_config) {
        cmd->add_option("--config", flags.config_path, "Config file (or a manifest to replay)")
            ->required();
    }
    cmd->add_option("--out-dir", flags.out_dir, "Directory for output files");
    auto* seed = cmd->add_option("--seed", flags.seed, "Master seed (overrides the config)");
    cmd->add_option("--horizon", flags.horizon, "Steps to simulate (overrides the config)");
    cmd->add_flag("--record-states", flags.record_states,
                  "Record full per-step states (adds state columns to the CSV)");
    auto* wall = cmd->add_flag("--wall-clock-seed", flags.wall_clock_seed,
                               "Seed from the system clock instead of the config");
    cmd->add_option("--threads", flags.threads,
                    "Worker threads for replicate ensembles (0 = hardware)");
    seed->excludes(wall);
}

hknoise::io::CommandParams resolve_params(const CommonFlags& flags) {
    auto params = hknoise::io::load_config_file(flags.config_path);
    if (flags.wall_clock_seed) {
        params.config.master_seed = static_cast<std::uint64_t>(
            std::chrono::system_clock::now().time_since_epoch().count());
    }
    if (flags.seed) params.config.master_seed = *flags.seed;
    if (flags.horizon) params.config.horizon = *flags.horizon;
    if (flags.record_states) params.config.record_states = true;
    if (flags.replicates) params.replicates = *flags.replicates;
    hknoise::validate(params.config);
    if (params.config.horizon < 1) {
        throw std::invalid_argument("'horizon' must be >= 1");
    }
    return params;
}

void warn_epsilon_range(const hknoise::SimulationConfig& config) {
    hknoise::ConfidenceThreshold eps(config.epsilon);
    if (config.epsilon > 1.0 / 3.0 &&
        static_cast<bool>(hknoise::certify_supercritical(config.noise, eps))) {
        std::cerr << "warning: super-critical noise with epsilon > 1/3; divergence "
                     "behavior in that range is exploratory\n";
    }
}

json verdict_to_json(const hknoise::ConsensusVerdict& verdict) {
    json j;
    j["detected"] = verdict.detected;
    if (verdict.detected) j["T"] = verdict.entry_step;
    j["rule"] = verdict.absorbing_rule ? "absorbing" : "window";
    if (!verdict.absorbing_rule) j["window"] = verdict.window;
    return j;
}

void print_verdict(const hknoise::ConsensusVerdict& verdict,
                   const std::optional<std::int64_t>& divergence) {
    if (verdict.detected) {
        std::cout << "quasi-consensus: T=" << verdict.entry_step
                  << (verdict.absorbing_rule ? " (absorbing rule)" : " (window rule)") << "\n";
    } else {
        std::cout << "quasi-consensus: not detected\n";
    }
    if (divergence) {
        std::cout << "divergence: first t=" << *divergence << "\n";
    } else {
        std::cout << "divergence: none\n";
    }
}

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    out << j.dump(2) << "\n";
    out.flush();
    if (!out) throw std::runtime_error("failed while writing: " + path.string());
}

int cmd_run(const CommonFlags& flags) {
    auto params = resolve_params(flags);
    params.config.record_clusters = true;
    warn_epsilon_range(params.config);

    const std::string started = hknoise::io::utc_timestamp();
    fs::create_directories(flags.out_dir);

    hknoise::Trajectory traj = hknoise::run_trajectory(params.config, std::uint64_t{0});

    hknoise::ConfidenceThreshold eps(params.config.epsilon);
    const bool absorbing =
        static_cast<bool>(hknoise::certify_subcritical(params.config.noise, eps));
    const auto verdict = hknoise::detect_quasi_consensus(
        traj, eps, params.config.detection_window, absorbing);
    const auto divergence = hknoise::divergence_detected(traj, eps);

    const fs::path csv_path = fs::path(flags.out_dir) / "trajectory.csv";
    hknoise::io::write_trajectory_csv(csv_path, traj);

    json summary;
    summary["command"] = "run";
    summary["quasi_consensus"] = verdict_to_json(verdict);
    summary["first_divergence"] = divergence ? json(*divergence) : json(nullptr);
    summary["final_diameter"] = traj.diameter.back();
    summary["final_cluster_count"] =
        hknoise::clusters(traj.final_state, eps).groups.size();
    summary["absorption_violations"] = hknoise::absorption_violations(traj, eps);
    summary["boundary_hits"] = {{"at_zero", traj.boundary_hits.total_at_zero()},
                                {"at_one", traj.boundary_hits.total_at_one()}};
    const fs::path summary_path = fs::path(flags.out_dir) / "run_summary.json";
    write_json_file(summary_path, summary);

    hknoise::io::RunManifest manifest;
    manifest.command = "run";
    manifest.params = params;
    manifest.outputs = {"trajectory.csv", "run_summary.json"};
    manifest.started_utc = started;
    manifest.finished_utc = hknoise::io::utc_timestamp();
    hknoise::io::write_manifest(fs::path(flags.out_dir) / "run_manifest.json", manifest);

    std::cout << "wrote " << csv_path.string() << "\n";
    print_verdict(verdict, divergence);
    return 0;
}

int cmd_sweep(const CommonFlags& flags, const std::vector<double>& cli_ratios) {
    auto params = resolve_params(flags);
    if (!cli_ratios.empty()) params.ratios = cli_ratios;
    if (params.ratios.empty()) params.ratios = hknoise::io::kDefaultSweepRatios;
    for (double r : params.ratios) {
        if (r > 0.5 && params.config.epsilon > 1.0 / 3.0) {
            std::cerr << "warning: sweep ratios beyond 0.5 with epsilon > 1/3; divergence "
                         "behavior in that range is exploratory\n";
            break;
        }
    }

    const std::string started = hknoise::io::utc_timestamp();
    fs::create_directories(flags.out_dir);

    const auto rows = hknoise::sweep_critical(params.ratios, params.config,
                                              params.replicates, flags.threads);
    const fs::path csv_path = fs::path(flags.out_dir) / "sweep.csv";
    hknoise::io::write_sweep_csv(csv_path, rows);

    hknoise::io::RunManifest manifest;
    manifest.command = "sweep";
    manifest.params = params;
    manifest.outputs = {"sweep.csv"};
    manifest.started_utc = started;
    manifest.finished_utc = hknoise::io::utc_timestamp();
    hknoise::io::write_manifest(fs::path(flags.out_dir) / "sweep_manifest.json", manifest);

    std::cout << "wrote " << csv_path.string() << "\n";
    for (const auto& row : rows) {
        std::cout << "ratio=" << row.ratio << " qc_freq=" << row.qc_freq
                  << " div_freq=" << row.div_freq << "\n";
    }
    return 0;
}

int cmd_walk(const CommonFlags& flags, bool identity_check) {
    auto params = resolve_params(flags);
    params.config.record_clusters = false;   // nothing in the walk outputs uses them
    warn_epsilon_range(params.config);

    const std::string started = hknoise::io::utc_timestamp();
    fs::create_directories(flags.out_dir);

    const hknoise::WalkPair pair = hknoise::run_walk_pair(params.config, 0);

    const fs::path series_path = fs::path(flags.out_dir) / "walk_series.csv";
    const fs::path events_path = fs::path(flags.out_dir) / "walk_events.csv";
    hknoise::io::write_walk_csv(series_path, pair.unclamped.walk);
    hknoise::io::write_boundary_events_csv(events_path, pair.clamped.boundary_hits);

    json summary;
    summary["command"] = "walk";
    summary["synchronized_steps"] = pair.unclamped.synchronized_steps;
    summary["synchronized_to_horizon"] = pair.unclamped.synchronized_to_horizon;
    summary["max_identity_residual"] = pair.unclamped.max_identity_residual;
    summary["first_upper_clamp"] =
        pair.first_upper_clamp >= 0 ? json(pair.first_upper_clamp) : json(nullptr);
    summary["coupling_violations"] = pair.coupling_violations;
    summary["boundary_hits"] = {{"at_zero", pair.clamped.boundary_hits.total_at_zero()},
                                {"at_one", pair.clamped.boundary_hits.total_at_one()}};
    const auto bracket = hknoise::walk_variance_bounds(params.config.noise, params.config.n,
                                                       params.config.horizon);
    if (bracket) {
        summary["variance_bracket"] = {
            {"lower", bracket->lower}, {"upper", bracket->upper}, {"exact", bracket->exact}};
    } else {
        summary["variance_bracket"] = {{"refused", bracket.refusal}};
    }
    const fs::path summary_path = fs::path(flags.out_dir) / "walk_summary.json";
    write_json_file(summary_path, summary);

    hknoise::io::RunManifest manifest;
    manifest.command = "walk";
    manifest.params = params;
    manifest.outputs = {"walk_series.csv", "walk_events.csv", "walk_summary.json"};
    manifest.started_utc = started;
    manifest.finished_utc = hknoise::io::utc_timestamp();
    hknoise::io::write_manifest(fs::path(flags.out_dir) / "walk_manifest.json", manifest);

    std::cout << "wrote " << series_path.string() << " and " << events_path.string() << "\n";
    if (identity_check) {
        std::cout << "max closed-form residual: " << pair.unclamped.max_identity_residual
                  << " (synchronized through step " << pair.unclamped.synchronized_steps
                  << " of " << params.config.horizon << ")\n";
    }
    return 0;
}

int cmd_reproduce(const std::string& name, const CommonFlags& flags) {
    const auto scenario = hknoise::scenario_from_name(name);
    if (!scenario) {
        throw std::invalid_argument("unknown scenario '" + name +
                                    "' (valid names: fig1, fig2, fig3)");
    }
    std::uint64_t seed = 1;
    if (flags.wall_clock_seed) {
        seed = static_cast<std::uint64_t>(
            std::chrono::system_clock::now().time_since_epoch().count());
    }
    if (flags.seed) seed = *flags.seed;

    const std::string started = hknoise::io::utc_timestamp();
    fs::create_directories(flags.out_dir);

    const auto result = hknoise::reproduce_scenario(*scenario, seed);

    const fs::path csv_path = fs::path(flags.out_dir) / (name + "_trajectory.csv");
    hknoise::io::write_trajectory_csv(csv_path, result.trajectory);

    json summary;
    summary["command"] = "reproduce";
    summary["scenario"] = name;
    summary["seed_used"] = result.seed_used;
    summary["quasi_consensus"] = verdict_to_json(result.verdict);
    summary["first_divergence"] =
        result.first_divergence ? json(*result.first_divergence) : json(nullptr);
    summary["final_cluster_count"] = result.final_cluster_count;
    summary["fixed_point_step"] = result.trajectory.fixed_point_step >= 0
                                      ? json(result.trajectory.fixed_point_step)
                                      : json(nullptr);
    const fs::path summary_path = fs::path(flags.out_dir) / (name + "_summary.json");
    write_json_file(summary_path, summary);

    hknoise::io::RunManifest manifest;
    manifest.command = "reproduce";
    manifest.params.config = result.config;
    manifest.outputs = {name + "_trajectory.csv", name + "_summary.json"};
    manifest.started_utc = started;
    manifest.finished_utc = hknoise::io::utc_timestamp();
    manifest.extra = {{"scenario", name}, {"seed_requested", seed},
                      {"seed_used", result.seed_used}};
    hknoise::io::write_manifest(fs::path(flags.out_dir) / (name + "_manifest.json"), manifest);

    std::cout << "wrote " << csv_path.string() << "\n";
    std::cout << "scenario " << name << ": seed_used=" << result.seed_used
              << " final_clusters=" << result.final_cluster_count << "\n";
    print_verdict(result.verdict, result.first_divergence);
    return 0;
}

int cmd_certify(const CommonFlags& flags) {
    auto params = hknoise::io::load_config_file(flags.config_path);
    if (flags.seed) params.config.master_seed = *flags.seed;
    hknoise::validate(params.config);

    const hknoise::ConfidenceThreshold eps(params.config.epsilon);
    const auto& model = params.config.noise;
    std::cout << "noise: " << model.describe() << "\n";
    std::cout << "epsilon: " << params.config.epsilon << " (eps/2 = "
              << params.config.epsilon / 2.0 << ")\n";

    const auto sub = hknoise::certify_subcritical(model, eps);
    if (sub) {
        std::cout << "sub-critical certificate: a=" << sub->a << ", p=" << sub->p << "\n";
    } else {
        std::cout << "sub-critical certificate: refused (" << sub.refusal << ")\n";
    }
    const auto super = hknoise::certify_supercritical(model, eps);
    if (super) {
        std::cout << "super-critical certificate: q=" << super->q << "\n";
    } else {
        std::cout << "super-critical certificate: refused (" << super.refusal << ")\n";
    }
    warn_epsilon_range(params.config);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Noisy bounded-confidence (Hegselmann-Krause) opinion dynamics simulator"};
    app.set_version_flag("--version", hknoise::kVersion);
    app.require_subcommand(1);

    CommonFlags run_flags;
    auto* run = app.add_subcommand("run", "Simulate one trajectory, write per-step metrics CSV");
    add_common_options(run, run_flags);

    CommonFlags sweep_flags;
    std::vector<double> sweep_ratios;
    auto* sweep = app.add_subcommand(
        "sweep", "Monte Carlo sweep over delta/eps ratios, write one CSV row per ratio");
    add_common_options(sweep, sweep_flags);
    sweep->add_option("--ratios", sweep_ratios, "delta/eps grid, e.g. 0.1,0.3,0.6")
        ->delimiter(',');
    sweep->add_option("--replicates", sweep_flags.replicates,
                      "Replicates per ratio (overrides the config)");

    CommonFlags walk_flags;
    bool identity_check = false;
    auto* walk = app.add_subcommand(
        "walk", "Aggregated-noise walk diagnostics plus clamp-event log");
    add_common_options(walk, walk_flags);
    walk->add_flag("--identity-check", identity_check,
                   "Print the max closed-form residual of the synchronized phase");

    CommonFlags repro_flags;
    std::string scenario_name;
    auto* repro = app.add_subcommand("reproduce", "Run a bundled demonstration scenario");
    repro->add_option("scenario", scenario_name, "One of: fig1, fig2, fig3")->required();
    repro->add_option("--out-dir", repro_flags.out_dir, "Directory for output files");
    auto* repro_seed =
        repro->add_option("--seed", repro_flags.seed, "Master seed for the scenario");
    auto* repro_wall = repro->add_flag("--wall-clock-seed", repro_flags.wall_clock_seed,
                                       "Seed from the system clock");
    repro_seed->excludes(repro_wall);

    CommonFlags certify_flags;
    auto* certify = app.add_subcommand(
        "certify", "Print the noise certificates for a config's model and epsilon");
    certify->add_option("--config", certify_flags.config_path, "Config file")->required();
    certify->add_option("--seed", certify_flags.seed, "Unused; accepted for consistency");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) return cmd_run(run_flags);
        if (sweep->parsed()) return cmd_sweep(sweep_flags, sweep_ratios);
        if (walk->parsed()) return cmd_walk(walk_flags, identity_check);
        if (repro->parsed()) return cmd_reproduce(scenario_name, repro_flags);
        if (certify->parsed()) return cmd_certify(certify_flags);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
