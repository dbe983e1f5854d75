#include "hknoise/config.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hknoise {

void validate(const SimulationConfig& config) {
    if (config.n < 1) {
        throw std::invalid_argument("n must be >= 1");
    }
    if (!(config.epsilon > 0.0) || !(config.epsilon <= 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0, 1]");
    }
    if (config.horizon < 0) {
        throw std::invalid_argument("horizon must be >= 0");
    }
    if (config.detection_window < 1) {
        throw std::invalid_argument("detection_window must be >= 1");
    }
    switch (config.initial.kind) {
        case InitialCondition::Kind::UniformRandom:
            break;
        case InitialCondition::Kind::AllEqual:
            if (!(config.initial.value >= 0.0) || !(config.initial.value <= 1.0)) {
                throw std::invalid_argument("all_equal initial value must lie in [0, 1]");
            }
            break;
        case InitialCondition::Kind::ExplicitList: {
            if (config.initial.values.size() != config.n) {
                std::ostringstream os;
                os << "explicit initial list has length " << config.initial.values.size()
                   << ", expected n = " << config.n;
                throw std::invalid_argument(os.str());
            }
            for (double v : config.initial.values) {
                if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
                    throw std::invalid_argument("explicit initial values must lie in [0, 1]");
                }
            }
            break;
        }
    }
}

OpinionState make_initial_state(const SimulationConfig& config, RandomStream& init) {
    OpinionState state;
    state.t = 0;
    state.values.resize(config.n);
    switch (config.initial.kind) {
        case InitialCondition::Kind::UniformRandom:
            for (double& v : state.values) {
                v = init.next_unit();
            }
            break;
        case InitialCondition::Kind::AllEqual:
            for (double& v : state.values) {
                v = config.initial.value;
            }
            break;
        case InitialCondition::Kind::ExplicitList:
            state.values = config.initial.values;
            break;
    }
    return state;
}

} // namespace hknoise
