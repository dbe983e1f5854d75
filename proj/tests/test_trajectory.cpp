#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "hknoise/metrics.hpp"
#include "hknoise/summation.hpp"
#include "hknoise/trajectory.hpp"

using namespace hknoise;

namespace {

SimulationConfig small_config() {
    SimulationConfig cfg;
    cfg.n = 5;
    cfg.epsilon = 0.3;
    cfg.noise = NoiseModel::uniform(0.1);
    cfg.initial = InitialCondition::uniform_random();
    cfg.horizon = 200;
    cfg.master_seed = 11;
    cfg.record_states = true;
    return cfg;
}

// Replays the engine's documented stream contract with the public step()
// operation only.
std::vector<std::vector<double>> manual_states(const SimulationConfig& cfg,
                                               std::uint64_t replicate) {
    RandomStream rep = RandomStream(cfg.master_seed).substream(replicate);
    RandomStream init = rep.substream(0);
    RandomStream noise_stream = rep.substream(1);

    OpinionState x = make_initial_state(cfg, init);
    std::vector<std::vector<double>> states{x.values};
    std::vector<double> noise(cfg.n);
    for (std::int64_t t = 0; t < cfg.horizon; ++t) {
        cfg.noise.sample_vector(noise, noise_stream);
        x = step(x, noise, ConfidenceThreshold(cfg.epsilon));
        states.push_back(x.values);
    }
    return states;
}

} // namespace

TEST_CASE("horizon zero records only the initial state") {
    SimulationConfig cfg = small_config();
    cfg.horizon = 0;
    const auto traj = run_trajectory(cfg, std::uint64_t{0});
    CHECK(traj.diameter.size() == 1);
    CHECK(traj.states.size() == 1);
    CHECK(traj.final_state.t == 0);
    CHECK(traj.final_state.values == traj.states[0]);
}

TEST_CASE("record lengths cover t = 0..horizon") {
    const SimulationConfig cfg = small_config();
    const auto traj = run_trajectory(cfg, std::uint64_t{0});
    CHECK(traj.diameter.size() == static_cast<std::size_t>(cfg.horizon) + 1);
    CHECK(traj.min_value.size() == traj.diameter.size());
    CHECK(traj.max_value.size() == traj.diameter.size());
    CHECK(traj.cluster_count.size() == traj.diameter.size());
    CHECK(traj.states.size() == traj.diameter.size());
    CHECK(traj.final_state.t == cfg.horizon);
}

TEST_CASE("trajectories are deterministic in (config, stream)") {
    const SimulationConfig cfg = small_config();
    const auto a = run_trajectory(cfg, std::uint64_t{3});
    const auto b = run_trajectory(cfg, std::uint64_t{3});
    CHECK(a.states == b.states);
    CHECK(a.diameter == b.diameter);

    const auto c = run_trajectory(cfg, std::uint64_t{4});
    CHECK(a.states != c.states);
}

TEST_CASE("engine equals the public step() op bitwise, fast path on and off") {
    for (std::uint64_t seed : {1ull, 2ull, 77ull}) {
        SimulationConfig cfg = small_config();
        cfg.master_seed = seed;

        const auto expect = manual_states(cfg, 0);

        EngineOptions fast;
        fast.fast_consensus_path = true;
        EngineOptions slow;
        slow.fast_consensus_path = false;

        const auto with_fast = run_trajectory(cfg, std::uint64_t{0}, fast);
        const auto with_slow = run_trajectory(cfg, std::uint64_t{0}, slow);

        CHECK(with_fast.states == expect);
        CHECK(with_slow.states == expect);
        CHECK(with_fast.diameter == with_slow.diameter);
    }
}

TEST_CASE("engine equals the public step() op under zero noise (frozen tail included)") {
    SimulationConfig cfg = small_config();
    cfg.noise = NoiseModel::zero();
    cfg.horizon = 100;

    const auto expect = manual_states(cfg, 0);
    const auto traj = run_trajectory(cfg, std::uint64_t{0});
    CHECK(traj.states == expect);
    CHECK(traj.fixed_point_step >= 0);  // noise-free HK settles quickly at n = 5
}

TEST_CASE("values stay in [0,1] at every recorded step") {
    SimulationConfig cfg = small_config();
    cfg.noise = NoiseModel::uniform(0.4);
    cfg.epsilon = 0.1;
    cfg.horizon = 500;
    const auto traj = run_trajectory(cfg, std::uint64_t{0});
    for (const auto& row : traj.states) {
        for (double v : row) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    for (double d : traj.diameter) {
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
    }
}

TEST_CASE("closed form through the public ops: tight state means one shared average") {
    // Whenever the state diameter is within eps the pre-clamp update must
    // coincide with mean + noise agent by agent, bitwise.
    std::mt19937_64 gen(2027);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + gen() % 15;
        const double eps = 0.2 + 0.8 * unit(gen);
        const double lo = unit(gen) * (1.0 - eps);
        OpinionState state;
        state.values.resize(n);
        for (auto& v : state.values) v = lo + eps * unit(gen);
        REQUIRE(diameter(state) <= eps);

        std::vector<double> noise(n);
        for (auto& v : noise) v = 0.5 * (2.0 * unit(gen) - 1.0);

        const auto pre = pre_clamp_update(state, noise, ConfidenceThreshold(eps));
        const double mean = compensated_mean(state.values);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(pre.values[i] == mean + noise[i]);
        }
    }
}

TEST_CASE("zero-noise runs preserve order, move extremes monotonically, and freeze") {
    std::mt19937_64 gen(13);
    for (int trial = 0; trial < 40; ++trial) {
        SimulationConfig cfg;
        cfg.n = 2 + gen() % 19;
        cfg.epsilon = 0.05 + 0.95 * (static_cast<double>(gen() % 1000) / 1000.0);
        cfg.noise = NoiseModel::zero();
        cfg.initial = InitialCondition::uniform_random();
        cfg.horizon = 400;
        cfg.master_seed = gen();
        cfg.record_states = true;

        const auto traj = run_trajectory(cfg, std::uint64_t{0});

        // finite convergence to an exact fixed point
        CHECK(traj.fixed_point_step >= 0);
        CHECK(traj.fixed_point_step < cfg.horizon);
        for (std::size_t t = static_cast<std::size_t>(traj.fixed_point_step);
             t + 1 < traj.states.size(); ++t) {
            CHECK(traj.states[t] == traj.states[t + 1]);
        }

        // sorted rank order is preserved at every step
        std::vector<std::size_t> order(cfg.n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (traj.states[0][a] != traj.states[0][b]) {
                return traj.states[0][a] < traj.states[0][b];
            }
            return a < b;
        });
        for (std::size_t t = 1; t < traj.states.size(); ++t) {
            for (std::size_t k = 1; k < order.size(); ++k) {
                CHECK(traj.states[t][order[k - 1]] <= traj.states[t][order[k]]);
            }
        }

        // extremes are monotone
        for (std::size_t t = 1; t < traj.min_value.size(); ++t) {
            CHECK(traj.min_value[t] >= traj.min_value[t - 1]);
            CHECK(traj.max_value[t] <= traj.max_value[t - 1]);
        }

        // with no clamp ever firing there are no boundary hits
        CHECK(traj.boundary_hits.total_at_zero() == 0);
        CHECK(traj.boundary_hits.total_at_one() == 0);
    }
}

TEST_CASE("zero noise from a tight initial state collapses to the mean in one step") {
    SimulationConfig cfg;
    cfg.n = 6;
    cfg.epsilon = 0.3;
    cfg.noise = NoiseModel::zero();
    cfg.initial = InitialCondition::explicit_list({0.4, 0.45, 0.5, 0.55, 0.6, 0.62});
    cfg.horizon = 3;
    cfg.record_states = true;
    const auto traj = run_trajectory(cfg, std::uint64_t{0});
    REQUIRE(traj.diameter[0] <= cfg.epsilon);
    CHECK(traj.diameter[1] == 0.0);
}

TEST_CASE("absorption holds for every noise bounded by eps/2, boundary included") {
    const std::vector<NoiseModel> models = {
        NoiseModel::uniform(0.05),                  // well inside
        NoiseModel::uniform(0.15),                  // exactly eps/2 (continuous)
        NoiseModel::discrete(0.1499, 0.5),          // atoms strictly inside
        NoiseModel::truncated_gaussian(0.1, 0.15),  // bound exactly eps/2 (continuous)
    };
    for (const auto& model : models) {
        SimulationConfig cfg;
        cfg.n = 8;
        cfg.epsilon = 0.3;
        cfg.noise = model;
        cfg.initial = InitialCondition::uniform_random();
        cfg.horizon = 3000;
        cfg.master_seed = 404;
        const auto traj = run_trajectory(cfg, std::uint64_t{0});
        CHECK(absorption_violations(traj, ConfidenceThreshold(cfg.epsilon)) == 0);
    }
}

TEST_CASE("discrete atoms exactly at eps/2 have zero absorption slack in floats") {
    // With +-eps/2 atoms the consensus-phase diameter lands exactly on eps in
    // real arithmetic. Rounding of m + xi can tip the stored diameter one ulp
    // past eps, which disconnects the interaction graph and lets the halves
    // drift apart for real. The trigger is always rounding-scale: at the first
    // step that leaves [0, eps], the excess is at most a few ulps.
    SimulationConfig cfg;
    cfg.n = 8;
    cfg.epsilon = 0.3;
    cfg.noise = NoiseModel::discrete(0.15, 0.5);
    cfg.initial = InitialCondition::all_equal(0.5);
    cfg.horizon = 3000;
    cfg.master_seed = 404;
    const auto traj = run_trajectory(cfg, std::uint64_t{0});
    for (double d : traj.diameter) {
        if (d > cfg.epsilon) {
            CHECK(d - cfg.epsilon <= 5e-16);
            break;
        }
    }
}

TEST_CASE("consensus-phase pre-clamp equals mean + noise on the per-agent path") {
    EngineOptions slow;
    slow.fast_consensus_path = false;
    for (std::uint64_t seed : {5ull, 6ull, 7ull}) {
        SimulationConfig cfg;
        cfg.n = 12;
        cfg.epsilon = 0.4;
        cfg.noise = NoiseModel::uniform(0.2);
        cfg.initial = InitialCondition::uniform_random();
        cfg.horizon = 2000;
        cfg.master_seed = seed;
        const auto traj = run_trajectory(cfg, std::uint64_t{0}, slow);
        CHECK(traj.max_consensus_residual <= 1e-12);
    }
}

TEST_CASE("boundary hits log the clamp, coincidences are counted apart") {
    SimulationConfig cfg;
    cfg.n = 2;
    cfg.epsilon = 1.0;
    cfg.noise = NoiseModel::discrete(0.6, 0.5);   // +-0.6 shifts always clamp from 0.5
    cfg.initial = InitialCondition::all_equal(0.5);
    cfg.horizon = 50;
    cfg.master_seed = 9;
    const auto traj = run_trajectory(cfg, std::uint64_t{0});

    CHECK(traj.boundary_hits.total_at_zero() + traj.boundary_hits.total_at_one() > 0);
    for (const auto& hits : traj.boundary_hits.at_zero) {
        for (std::size_t k = 1; k < hits.size(); ++k) CHECK(hits[k] > hits[k - 1]);
    }
    for (const auto& hits : traj.boundary_hits.at_one) {
        for (std::size_t k = 1; k < hits.size(); ++k) CHECK(hits[k] > hits[k - 1]);
    }

    // zero noise: no clamp can fire, but sitting exactly on a boundary is a
    // coincidence, not a hit
    SimulationConfig still;
    still.n = 3;
    still.epsilon = 0.2;
    still.noise = NoiseModel::zero();
    still.initial = InitialCondition::all_equal(0.0);
    still.horizon = 10;
    const auto quiet = run_trajectory(still, std::uint64_t{0});
    CHECK(quiet.boundary_hits.total_at_zero() == 0);
    CHECK(quiet.boundary_hits.total_at_one() == 0);
    CHECK(quiet.boundary_value_coincidences > 0);
}

TEST_CASE("explicit and all-equal initials skip the init stream") {
    // Two configs differing only in noise share x(0) because initial draws
    // come from a dedicated substream.
    SimulationConfig a = small_config();
    a.record_states = true;
    SimulationConfig b = a;
    b.noise = NoiseModel::discrete(0.01, 0.5);
    const auto ta = run_trajectory(a, std::uint64_t{0});
    const auto tb = run_trajectory(b, std::uint64_t{0});
    CHECK(ta.states[0] == tb.states[0]);
}

TEST_CASE("fixed point at t = 0 for an exact consensus initial") {
    SimulationConfig cfg;
    cfg.n = 7;
    cfg.epsilon = 0.2;
    cfg.noise = NoiseModel::zero();
    cfg.initial = InitialCondition::all_equal(0.5);
    cfg.horizon = 5;
    const auto traj = run_trajectory(cfg, std::uint64_t{0});
    CHECK(traj.fixed_point_step == 0);
    CHECK(traj.diameter.back() == 0.0);
}
