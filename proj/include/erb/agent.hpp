#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "erb/compress.hpp"
#include "erb/gridworld.hpp"
#include "erb/replay.hpp"
#include "erb/rng.hpp"

namespace erb {

// Per-action weight vectors of a linear action-value function.
struct QParams {
    int num_actions = 0;
    std::size_t feature_dim = 0;
    std::vector<double> weights;  // row-major, num_actions x feature_dim

    static QParams zeros(int num_actions, std::size_t feature_dim);
    std::span<double> row(int a) {
        return std::span<double>(weights).subspan(static_cast<std::size_t>(a) * feature_dim,
                                                  feature_dim);
    }
    std::span<const double> row(int a) const {
        return std::span<const double>(weights).subspan(static_cast<std::size_t>(a) * feature_dim,
                                                        feature_dim);
    }

    friend bool operator==(const QParams&, const QParams&) = default;
};

struct TrainConfig {
    double gamma = 0.9;
    double lr = 0.05;
    int batch_size = 48;
    int episodes_per_round = 500;
    double epsilon_start = 1.0;
    double epsilon_end = 0.1;
    double epsilon_decay_fraction = 0.5;
    int target_sync_every = 200;  // parameter updates between target copies
    double replay_mix = 0.5;      // fraction of each batch drawn from history
    std::uint64_t seed = 0;

    void validate() const;
};

struct RoundReport {
    int round_index = 0;
    std::string trained_env;
    std::string erb_path;
    std::map<std::string, double> per_env_mean_distance;
    double overall_mean_distance = 0.0;

    friend bool operator==(const RoundReport&, const RoundReport&) = default;
};

std::vector<double> q_values(const QParams& params, const ObsVec& features);

// Mean over the batch of half squared TD errors; the quantity td_update
// descends.
double td_loss(const QParams& params, const QParams& target, std::span<const Experience> batch,
               const TrainConfig& cfg);

// One mini-batch gradient step: w_a += lr * (y - Q) * phi / batch for each
// experience's taken action, with y = r (+ gamma max_a' Q_target unless
// terminal).
QParams td_update(QParams params, const QParams& target, std::span<const Experience> batch,
                  const TrainConfig& cfg);

// Argmax with ties to the lowest action id.
int greedy_action(const QParams& params, const ObsVec& features);

// With probability epsilon a uniform action, otherwise greedy.
int select_action(const QParams& params, const ObsVec& features, double epsilon, Rng& rng);

// Historical entries per batch; 0 when the history pool is empty.
int history_batch_count(const TrainConfig& cfg, bool history_empty);

// Epsilon for episode `episode`, linear from epsilon_start to epsilon_end
// over the first epsilon_decay_fraction of episodes.
double epsilon_for_episode(const TrainConfig& cfg, int episode);

// episodes_per_round episodes on env with one td_update per environment step
// once the round's buffer reaches batch_size. Batches mix history (unpacked,
// canonically ordered) and current-round experiences per replay_mix.
std::pair<QParams, ReplayBuffer> train_round(QParams params, const EnvSpec& env,
                                             std::span<const CompressedERB> history,
                                             const TrainConfig& cfg);

// Greedy rollouts from starts_per_env seeded starts; mean terminal Euclidean
// distance per environment.
std::map<std::string, double> evaluate(const QParams& params, std::span<const EnvSpec> envs,
                                       int starts_per_env, std::uint64_t eval_seed);

// Called after each round with the round's raw buffer and its compressed
// form; may fill report.erb_path.
using RoundSink = std::function<void(int round, const ReplayBuffer& raw, const CompressedERB& packed,
                                     RoundReport& report)>;

// Trains one round per environment; each finished round's buffer is
// compressed once (identity wrap at ratio 1 when compression is absent) and
// joins the history for later rounds. Evaluates on all environments after
// every round.
std::vector<RoundReport> lifelong_run(std::span<const EnvSpec> envs, const TrainConfig& cfg,
                                      const std::optional<CompressionSpec>& compression,
                                      int starts_per_env, const RoundSink& sink = {});

} // namespace erb
