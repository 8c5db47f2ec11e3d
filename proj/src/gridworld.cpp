#include "erb/gridworld.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "erb/rng.hpp"

namespace erb {

std::size_t EnvSpec::num_cells() const {
    std::size_t cells = 1;
    for (int i = 0; i < dims; ++i) cells *= static_cast<std::size_t>(grid_size);
    return cells;
}

void EnvSpec::validate() const {
    if (grid_size < 1) throw InvalidArgument("EnvSpec: grid_size must be positive");
    if (dims != 2 && dims != 3) throw InvalidArgument("EnvSpec: dims must be 2 or 3");
    if (context_dim < 1) throw InvalidArgument("EnvSpec: context_dim must be positive");
    if (max_steps < 1) throw InvalidArgument("EnvSpec: max_steps must be positive");
    if (!(terminal_radius >= 0.0)) throw InvalidArgument("EnvSpec: terminal_radius must be >= 0");
    if (landmark.size() != static_cast<std::size_t>(dims)) {
        throw InvalidArgument("EnvSpec: landmark dimension does not match dims");
    }
    for (int c : landmark) {
        if (c < 0 || c >= grid_size) throw InvalidArgument("EnvSpec: landmark outside the grid");
    }
}

std::vector<double> context_vector(const EnvSpec& spec) {
    Rng rng(spec.context_seed);
    std::vector<double> c(spec.context_dim);
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (double& x : c) {
            x = rng.next_normal();
            norm2 += x * x;
        }
    } while (norm2 == 0.0);
    const double norm = std::sqrt(norm2);
    for (double& x : c) x /= norm;
    return c;
}

double distance_to_landmark(const EnvSpec& spec, const std::vector<int>& position) {
    double d2 = 0.0;
    for (int i = 0; i < spec.dims; ++i) {
        const double d = position[i] - spec.landmark[i];
        d2 += d * d;
    }
    return std::sqrt(d2);
}

std::size_t flat_index(const EnvSpec& spec, const std::vector<int>& position) {
    std::size_t flat = 0;
    for (int i = 0; i < spec.dims; ++i) {
        flat = flat * static_cast<std::size_t>(spec.grid_size) + static_cast<std::size_t>(position[i]);
    }
    return flat;
}

ObsVec observe(const EnvSpec& spec, const EnvState& state) {
    const std::vector<double> context = context_vector(spec);
    const std::size_t offset = flat_index(spec, state.position) * context.size();
    return ObsVec::block(spec.feature_dim(), offset, context);
}

StepResult step(const EnvSpec& spec, const EnvState& state, int action) {
    if (state.done) throw InvalidArgument("step: episode already finished");
    if (action < 0 || action >= spec.num_actions()) {
        throw InvalidArgument("step: action id out of range");
    }
    const int axis = action / 2;
    const int delta = (action % 2 == 0) ? 1 : -1;

    StepResult result;
    result.state = state;
    auto& pos = result.state.position;
    pos[axis] = std::clamp(pos[axis] + delta, 0, spec.grid_size - 1);

    const double before = distance_to_landmark(spec, state.position);
    const double after = distance_to_landmark(spec, pos);
    result.reward = before - after;

    result.state.steps = state.steps + 1;
    result.terminal = (after <= spec.terminal_radius) || (result.state.steps >= spec.max_steps);
    result.state.done = result.terminal;
    return result;
}

EnvState reset(const EnvSpec& spec, std::uint64_t episode_seed) {
    spec.validate();
    // Enumerate valid starts so the pick is uniform and always terminates.
    std::vector<std::size_t> valid;
    const std::size_t cells = spec.num_cells();
    std::vector<int> pos(spec.dims);
    for (std::size_t flat = 0; flat < cells; ++flat) {
        std::size_t rest = flat;
        for (int i = spec.dims - 1; i >= 0; --i) {
            pos[i] = static_cast<int>(rest % static_cast<std::size_t>(spec.grid_size));
            rest /= static_cast<std::size_t>(spec.grid_size);
        }
        if (distance_to_landmark(spec, pos) > spec.terminal_radius) valid.push_back(flat);
    }
    if (valid.empty()) {
        throw InvalidArgument("reset: no start position farther than terminal_radius from the landmark");
    }
    Rng rng(episode_seed);
    std::size_t flat = valid[rng.next_index(valid.size())];
    EnvState state;
    state.position.resize(spec.dims);
    for (int i = spec.dims - 1; i >= 0; --i) {
        state.position[i] = static_cast<int>(flat % static_cast<std::size_t>(spec.grid_size));
        flat /= static_cast<std::size_t>(spec.grid_size);
    }
    return state;
}

std::vector<EnvSpec> make_env_sequence(const EnvSpec& base, std::uint64_t base_seed, int count) {
    if (count < 1) throw InvalidArgument("make_env_sequence: count must be positive");
    if (static_cast<std::size_t>(count) > base.num_cells()) {
        throw InvalidArgument("make_env_sequence: more environments than grid cells");
    }
    Rng rng(base_seed);
    std::vector<EnvSpec> envs;
    envs.reserve(count);
    std::set<std::vector<int>> used_landmarks;
    std::set<std::uint64_t> used_seeds;
    for (int i = 0; i < count; ++i) {
        EnvSpec spec = base;
        // Redraw on collisions so all landmarks and context seeds are distinct.
        do {
            spec.landmark.resize(spec.dims);
            for (int a = 0; a < spec.dims; ++a) {
                spec.landmark[a] = static_cast<int>(rng.next_index(spec.grid_size));
            }
        } while (used_landmarks.count(spec.landmark));
        do {
            spec.context_seed = rng.next_u64();
        } while (used_seeds.count(spec.context_seed));
        used_landmarks.insert(spec.landmark);
        used_seeds.insert(spec.context_seed);
        char id[16];
        std::snprintf(id, sizeof(id), "env%02d", i);
        spec.env_id = id;
        spec.validate();
        envs.push_back(std::move(spec));
    }
    return envs;
}

} // namespace erb
