#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "erb/replay.hpp"

namespace erb {

// d-dimensional grid with a hidden landmark. Actions move the agent one cell
// along an axis; the reward is the drop in Euclidean distance to the landmark.
// Each environment carries a unit-norm context vector so observations from
// different environments overlap only partially.
struct EnvSpec {
    int grid_size = 16;
    int dims = 2;  // 2 or 3
    std::vector<int> landmark;
    std::uint64_t context_seed = 0;
    int context_dim = 8;
    double terminal_radius = 1.0;
    int max_steps = 64;
    std::string env_id;

    int num_actions() const { return 2 * dims; }
    std::size_t num_cells() const;
    std::size_t feature_dim() const { return num_cells() * static_cast<std::size_t>(context_dim); }
    void validate() const;
};

struct EnvState {
    std::vector<int> position;
    int steps = 0;
    bool done = false;
};

struct StepResult {
    EnvState state;
    double reward = 0.0;
    bool terminal = false;
};

// Unit-norm context vector of length context_dim, deterministic in
// context_seed.
std::vector<double> context_vector(const EnvSpec& spec);

double distance_to_landmark(const EnvSpec& spec, const std::vector<int>& position);

// Row-major cell index.
std::size_t flat_index(const EnvSpec& spec, const std::vector<int>& position);

// One-hot(position) tensor context: the context_dim block at the cell's flat
// index holds the context vector, everything else is zero.
ObsVec observe(const EnvSpec& spec, const EnvState& state);

// Action 2*axis increments that axis, 2*axis+1 decrements it. Moves clamp at
// the grid boundary (zero reward when the clamp nullifies the move).
StepResult step(const EnvSpec& spec, const EnvState& state, int action);

// Uniform random start at distance > terminal_radius from the landmark.
EnvState reset(const EnvSpec& spec, std::uint64_t episode_seed);

// `count` specs sharing base's geometry, with pairwise-distinct landmarks and
// context seeds; deterministic in base_seed.
std::vector<EnvSpec> make_env_sequence(const EnvSpec& base, std::uint64_t base_seed, int count);

} // namespace erb
