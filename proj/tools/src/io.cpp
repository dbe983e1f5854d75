#include "hknoise/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include "hknoise/version.hpp"

namespace hknoise::io {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& message) { throw std::invalid_argument(message); }

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& context) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) {
                ok = true;
                break;
            }
        }
        if (!ok) bad("unknown key '" + key + "' in " + context);
    }
}

double get_double(const json& j, const char* key, const std::string& context) {
    if (!j.contains(key)) bad(std::string("missing '") + key + "' in " + context);
    const auto& v = j.at(key);
    if (!v.is_number()) bad(std::string("'") + key + "' in " + context + " must be a number");
    return v.get<double>();
}

NoiseModel noise_from_json(const json& j) {
    if (!j.is_object()) bad("'noise' must be an object with a 'kind'");
    if (!j.contains("kind") || !j.at("kind").is_string()) bad("'noise.kind' must be a string");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") {
        check_keys(j, {"kind"}, "noise");
        return NoiseModel::zero();
    }
    if (kind == "uniform") {
        check_keys(j, {"kind", "delta"}, "noise");
        return NoiseModel::uniform(get_double(j, "delta", "noise"));
    }
    if (kind == "truncated_gaussian") {
        check_keys(j, {"kind", "sigma", "bound"}, "noise");
        return NoiseModel::truncated_gaussian(get_double(j, "sigma", "noise"),
                                              get_double(j, "bound", "noise"));
    }
    if (kind == "discrete") {
        check_keys(j, {"kind", "delta", "p_each"}, "noise");
        const double p = j.contains("p_each") ? get_double(j, "p_each", "noise") : 0.5;
        return NoiseModel::discrete(get_double(j, "delta", "noise"), p);
    }
    bad("unknown noise kind '" + kind +
        "' (expected zero, uniform, truncated_gaussian or discrete)");
}

json noise_to_json(const NoiseModel& model) {
    json j;
    switch (model.kind()) {
        case NoiseKind::Zero:
            j["kind"] = "zero";
            break;
        case NoiseKind::Uniform:
            j["kind"] = "uniform";
            j["delta"] = model.delta();
            break;
        case NoiseKind::TruncatedGaussian:
            j["kind"] = "truncated_gaussian";
            j["sigma"] = model.sigma();
            j["bound"] = model.bound();
            break;
        case NoiseKind::Discrete:
            j["kind"] = "discrete";
            j["delta"] = model.delta();
            j["p_each"] = model.p_each();
            break;
    }
    return j;
}

InitialCondition initial_from_json(const json& j) {
    if (!j.is_object()) bad("'initial' must be an object with a 'kind'");
    if (!j.contains("kind") || !j.at("kind").is_string()) bad("'initial.kind' must be a string");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "uniform_random") {
        check_keys(j, {"kind"}, "initial");
        return InitialCondition::uniform_random();
    }
    if (kind == "all_equal") {
        check_keys(j, {"kind", "value"}, "initial");
        return InitialCondition::all_equal(get_double(j, "value", "initial"));
    }
    if (kind == "explicit") {
        check_keys(j, {"kind", "values"}, "initial");
        if (!j.contains("values") || !j.at("values").is_array()) {
            bad("'initial.values' must be an array of numbers");
        }
        std::vector<double> values;
        for (const auto& v : j.at("values")) {
            if (!v.is_number()) bad("'initial.values' must contain only numbers");
            values.push_back(v.get<double>());
        }
        return InitialCondition::explicit_list(std::move(values));
    }
    bad("unknown initial kind '" + kind + "' (expected uniform_random, all_equal or explicit)");
}

json initial_to_json(const InitialCondition& initial) {
    json j;
    switch (initial.kind) {
        case InitialCondition::Kind::UniformRandom:
            j["kind"] = "uniform_random";
            break;
        case InitialCondition::Kind::AllEqual:
            j["kind"] = "all_equal";
            j["value"] = initial.value;
            break;
        case InitialCondition::Kind::ExplicitList:
            j["kind"] = "explicit";
            j["values"] = initial.values;
            break;
    }
    return j;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open output file: " + path.string());
    }
    return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw std::runtime_error("failed while writing: " + path.string());
    }
}

} // namespace

CommandParams params_from_json(const json& j) {
    if (!j.is_object()) bad("config must be a JSON object");
    check_keys(j,
               {"n", "epsilon", "noise", "initial", "horizon", "master_seed",
                "detection_window", "record_states", "replicates", "ratios"},
               "config");

    CommandParams params;
    SimulationConfig& cfg = params.config;

    if (j.contains("n")) {
        if (!j.at("n").is_number_unsigned()) bad("'n' must be a non-negative integer");
        cfg.n = j.at("n").get<std::size_t>();
    }
    if (j.contains("epsilon")) cfg.epsilon = get_double(j, "epsilon", "config");
    if (j.contains("noise")) cfg.noise = noise_from_json(j.at("noise"));
    if (j.contains("initial")) cfg.initial = initial_from_json(j.at("initial"));
    if (j.contains("horizon")) {
        if (!j.at("horizon").is_number_integer()) bad("'horizon' must be an integer");
        cfg.horizon = j.at("horizon").get<std::int64_t>();
    }
    if (j.contains("master_seed")) {
        if (!j.at("master_seed").is_number_unsigned()) {
            bad("'master_seed' must be a non-negative integer");
        }
        cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    }
    if (j.contains("detection_window")) {
        if (!j.at("detection_window").is_number_integer()) {
            bad("'detection_window' must be an integer");
        }
        cfg.detection_window = j.at("detection_window").get<std::int64_t>();
    }
    if (j.contains("record_states")) {
        if (!j.at("record_states").is_boolean()) bad("'record_states' must be a boolean");
        cfg.record_states = j.at("record_states").get<bool>();
    }
    if (j.contains("replicates")) {
        if (!j.at("replicates").is_number_unsigned()) {
            bad("'replicates' must be a positive integer");
        }
        params.replicates = j.at("replicates").get<std::size_t>();
        if (params.replicates < 1) bad("'replicates' must be >= 1");
    }
    if (j.contains("ratios")) {
        if (!j.at("ratios").is_array()) bad("'ratios' must be an array of numbers");
        for (const auto& v : j.at("ratios")) {
            if (!v.is_number()) bad("'ratios' must contain only numbers");
            params.ratios.push_back(v.get<double>());
        }
    }

    validate(cfg);
    if (cfg.horizon < 1) bad("'horizon' must be >= 1");
    return params;
}

json params_to_json(const CommandParams& params) {
    const SimulationConfig& cfg = params.config;
    json j;
    j["n"] = cfg.n;
    j["epsilon"] = cfg.epsilon;
    j["noise"] = noise_to_json(cfg.noise);
    j["initial"] = initial_to_json(cfg.initial);
    j["horizon"] = cfg.horizon;
    j["master_seed"] = cfg.master_seed;
    j["detection_window"] = cfg.detection_window;
    j["record_states"] = cfg.record_states;
    j["replicates"] = params.replicates;
    if (!params.ratios.empty()) j["ratios"] = params.ratios;
    return j;
}

CommandParams load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open config file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        bad("malformed JSON in " + path.string() + ": " + e.what());
    }
    if (j.is_object() && j.contains("command") && j.contains("config")) {
        j = j.at("config");   // manifest replay
    }
    return params_from_json(j);
}

std::string format_double(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    if (traj.cluster_count.size() != traj.diameter.size()) {
        throw std::invalid_argument(
            "trajectory was recorded without cluster counts; enable record_clusters");
    }
    auto out = open_output(path);
    out << "t,d_V,n_clusters,min,max";
    const bool with_states = !traj.states.empty();
    if (with_states) {
        for (std::size_t i = 0; i < traj.n; ++i) out << ",x" << i;
    }
    out << "\n";
    for (std::size_t t = 0; t < traj.diameter.size(); ++t) {
        out << t << ',' << format_double(traj.diameter[t]) << ',' << traj.cluster_count[t]
            << ',' << format_double(traj.min_value[t]) << ','
            << format_double(traj.max_value[t]);
        if (with_states) {
            for (double v : traj.states[t]) out << ',' << format_double(v);
        }
        out << "\n";
    }
    finish_output(out, path);
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows) {
    auto out = open_output(path);
    out << "ratio,n,epsilon,replicates,qc_freq,mean_T,median_T,div_freq,"
           "mean_first_div_t,master_seed\n";
    for (const auto& row : rows) {
        out << format_double(row.ratio) << ',' << row.n << ',' << format_double(row.epsilon)
            << ',' << row.replicates << ',' << format_double(row.qc_freq) << ','
            << format_double(row.mean_T) << ',' << format_double(row.median_T) << ','
            << format_double(row.div_freq) << ',' << format_double(row.mean_first_div_t)
            << ',' << row.master_seed << "\n";
    }
    finish_output(out, path);
}

void write_walk_csv(const std::filesystem::path& path, const WalkRecord& record) {
    auto out = open_output(path);
    out << "t,eta,S,s2_analytic,lil_stat\n";
    for (std::size_t k = 0; k < record.mean_noise.size(); ++k) {
        const auto t = static_cast<std::int64_t>(k + 1);
        out << t << ',' << format_double(record.mean_noise[k]) << ','
            << format_double(record.walk_sum[k]) << ',' << format_double(record.variance[k])
            << ',' << format_double(lil_statistic_or_nan(record, t)) << "\n";
    }
    finish_output(out, path);
}

void write_boundary_events_csv(const std::filesystem::path& path, const BoundaryHitLog& log) {
    struct Event {
        std::int64_t t;
        std::size_t agent;
        int boundary;
    };
    std::vector<Event> events;
    for (std::size_t agent = 0; agent < log.at_zero.size(); ++agent) {
        for (std::int64_t t : log.at_zero[agent]) events.push_back({t, agent, 0});
    }
    for (std::size_t agent = 0; agent < log.at_one.size(); ++agent) {
        for (std::int64_t t : log.at_one[agent]) events.push_back({t, agent, 1});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.t != b.t) return a.t < b.t;
        if (a.agent != b.agent) return a.agent < b.agent;
        return a.boundary < b.boundary;
    });

    auto out = open_output(path);
    out << "agent,boundary,t\n";
    for (const auto& e : events) {
        out << e.agent << ',' << e.boundary << ',' << e.t << "\n";
    }
    finish_output(out, path);
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
    json j;
    j["tool"] = "hknoise";
    j["version"] = kVersion;
    j["command"] = manifest.command;
    j["started_utc"] = manifest.started_utc;
    j["finished_utc"] = manifest.finished_utc;
    j["config"] = params_to_json(manifest.params);
    j["outputs"] = manifest.outputs;
    if (!manifest.extra.is_null()) j["extra"] = manifest.extra;

    auto out = open_output(path);
    out << j.dump(2) << "\n";
    finish_output(out, path);
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

} // namespace hknoise::io
