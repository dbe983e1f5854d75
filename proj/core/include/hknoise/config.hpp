#pragma once

#include <cstdint>
#include <vector>

#include "hknoise/noise.hpp"

namespace hknoise {

// x(0) specification.
struct InitialCondition {
    enum class Kind { UniformRandom, ExplicitList, AllEqual };

    Kind kind = Kind::UniformRandom;
    double value = 0.5;            // AllEqual
    std::vector<double> values;    // ExplicitList

    static InitialCondition uniform_random() { return {}; }

    static InitialCondition all_equal(double c) {
        InitialCondition ic;
        ic.kind = Kind::AllEqual;
        ic.value = c;
        return ic;
    }

    static InitialCondition explicit_list(std::vector<double> v) {
        InitialCondition ic;
        ic.kind = Kind::ExplicitList;
        ic.values = std::move(v);
        return ic;
    }
};

struct SimulationConfig {
    std::size_t n = 20;
    double epsilon = 0.2;
    NoiseModel noise = NoiseModel::zero();
    InitialCondition initial = InitialCondition::uniform_random();
    std::int64_t horizon = 100000;
    std::uint64_t master_seed = 1;
    std::int64_t detection_window = 1000;
    bool record_states = false;
    bool record_clusters = true;
};

// Throws std::invalid_argument naming the offending field. horizon = 0 is
// accepted here (a trajectory holding only the initial state); the file
// loader in the CLI additionally requires horizon >= 1.
void validate(const SimulationConfig& config);

// Materialize x(0). UniformRandom consumes exactly n counters of `init`;
// the other kinds consume none.
OpinionState make_initial_state(const SimulationConfig& config, RandomStream& init);

} // namespace hknoise
