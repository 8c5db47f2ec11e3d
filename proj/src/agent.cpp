#include "erb/agent.hpp"

#include <algorithm>
#include <cmath>

namespace erb {

namespace {

constexpr std::uint64_t kEvalStream = 0x6576616CULL;      // evaluation episodes
constexpr std::uint64_t kCompressStream = 0x7061636BULL;  // per-round compression

double q_value(const QParams& params, const ObsVec& features, int action) {
    return features.dot(params.row(action));
}

double max_q(const QParams& params, const ObsVec& features) {
    double best = q_value(params, features, 0);
    for (int a = 1; a < params.num_actions; ++a) {
        best = std::max(best, q_value(params, features, a));
    }
    return best;
}

double td_target(const QParams& target, const Experience& e, const TrainConfig& cfg) {
    if (e.terminal) return e.reward;
    return e.reward + cfg.gamma * max_q(target, e.next_obs);
}

void check_batch(const QParams& params, std::span<const Experience> batch) {
    if (batch.empty()) throw InvalidArgument("td_update: empty batch");
    for (const auto& e : batch) {
        if (e.obs.dim() != params.feature_dim || e.next_obs.dim() != params.feature_dim) {
            throw DimensionError("td_update: experience dimension does not match parameters");
        }
        if (e.action < 0 || e.action >= params.num_actions) {
            throw InvalidArgument("td_update: action id out of range");
        }
    }
}

} // namespace

QParams QParams::zeros(int num_actions, std::size_t feature_dim) {
    QParams p;
    p.num_actions = num_actions;
    p.feature_dim = feature_dim;
    p.weights.assign(static_cast<std::size_t>(num_actions) * feature_dim, 0.0);
    return p;
}

void TrainConfig::validate() const {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("TrainConfig: gamma must be in [0,1)");
    if (!(lr > 0.0)) throw InvalidArgument("TrainConfig: lr must be positive");
    if (batch_size < 1) throw InvalidArgument("TrainConfig: batch_size must be positive");
    if (episodes_per_round < 1) throw InvalidArgument("TrainConfig: episodes_per_round must be positive");
    if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0) ||
        !(epsilon_end >= 0.0 && epsilon_end <= 1.0) || epsilon_end > epsilon_start) {
        throw InvalidArgument("TrainConfig: need 0 <= epsilon_end <= epsilon_start <= 1");
    }
    if (!(epsilon_decay_fraction > 0.0 && epsilon_decay_fraction <= 1.0)) {
        throw InvalidArgument("TrainConfig: epsilon_decay_fraction must be in (0,1]");
    }
    if (target_sync_every < 1) throw InvalidArgument("TrainConfig: target_sync_every must be positive");
    if (!(replay_mix >= 0.0 && replay_mix <= 1.0)) {
        throw InvalidArgument("TrainConfig: replay_mix must be in [0,1]");
    }
}

std::vector<double> q_values(const QParams& params, const ObsVec& features) {
    if (features.dim() != params.feature_dim) {
        throw DimensionError("q_values: feature dimension does not match parameters");
    }
    std::vector<double> out(params.num_actions);
    for (int a = 0; a < params.num_actions; ++a) out[a] = q_value(params, features, a);
    return out;
}

double td_loss(const QParams& params, const QParams& target, std::span<const Experience> batch,
               const TrainConfig& cfg) {
    check_batch(params, batch);
    double loss = 0.0;
    for (const auto& e : batch) {
        const double err = td_target(target, e, cfg) - q_value(params, e.obs, e.action);
        loss += 0.5 * err * err;
    }
    return loss / static_cast<double>(batch.size());
}

QParams td_update(QParams params, const QParams& target, std::span<const Experience> batch,
                  const TrainConfig& cfg) {
    check_batch(params, batch);
    const double scale = cfg.lr / static_cast<double>(batch.size());
    for (const auto& e : batch) {
        const double err = td_target(target, e, cfg) - q_value(params, e.obs, e.action);
        auto row = params.row(e.action);
        for (const auto& [i, v] : e.obs.entries()) {
            row[i] += scale * err * v;
        }
    }
    return params;
}

int greedy_action(const QParams& params, const ObsVec& features) {
    if (features.dim() != params.feature_dim) {
        throw DimensionError("greedy_action: feature dimension does not match parameters");
    }
    int best = 0;
    double best_q = q_value(params, features, 0);
    for (int a = 1; a < params.num_actions; ++a) {
        const double q = q_value(params, features, a);
        if (q > best_q) {
            best_q = q;
            best = a;
        }
    }
    return best;
}

int select_action(const QParams& params, const ObsVec& features, double epsilon, Rng& rng) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw InvalidArgument("select_action: epsilon must be in [0,1]");
    }
    if (rng.next_double() < epsilon) {
        return static_cast<int>(rng.next_index(static_cast<std::size_t>(params.num_actions)));
    }
    return greedy_action(params, features);
}

int history_batch_count(const TrainConfig& cfg, bool history_empty) {
    if (history_empty) return 0;
    return static_cast<int>(std::lround(cfg.batch_size * cfg.replay_mix));
}

double epsilon_for_episode(const TrainConfig& cfg, int episode) {
    const double span = cfg.epsilon_decay_fraction * cfg.episodes_per_round;
    const double progress = span > 0.0 ? std::min(1.0, episode / span) : 1.0;
    return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * progress;
}

std::pair<QParams, ReplayBuffer> train_round(QParams params, const EnvSpec& env,
                                             std::span<const CompressedERB> history,
                                             const TrainConfig& cfg) {
    cfg.validate();
    env.validate();
    if (params.num_actions != env.num_actions() || params.feature_dim != env.feature_dim()) {
        throw DimensionError("train_round: parameters do not match the environment");
    }

    // Unpack history into one pool, canonically ordered by content so the
    // draw below does not depend on entry ordering inside the history ERBs.
    std::vector<Experience> pool;
    if (history_batch_count(cfg, false) > 0) {
        for (const auto& h : history) {
            if (h.obs_dim != env.feature_dim() || h.num_actions != env.num_actions()) {
                throw DimensionError("train_round: history ERB dimensions do not match the environment");
            }
            h.validate();
            pool.reserve(pool.size() + h.original_size);
            for (const auto& we : h.entries) {
                for (std::uint64_t i = 0; i < we.weight; ++i) pool.push_back(we.exp);
            }
        }
        std::sort(pool.begin(), pool.end(), experience_less);
    }

    Rng rng(cfg.seed);
    QParams target = params;
    ReplayBuffer erb(env.feature_dim(), env.num_actions(), env.env_id);
    std::vector<Experience> batch;
    batch.reserve(cfg.batch_size);
    long updates = 0;

    for (int episode = 0; episode < cfg.episodes_per_round; ++episode) {
        const double epsilon = epsilon_for_episode(cfg, episode);
        EnvState state = reset(env, rng.next_u64());
        ObsVec obs = observe(env, state);
        while (!state.done) {
            const int action = select_action(params, obs, epsilon, rng);
            const StepResult sr = step(env, state, action);
            ObsVec next_obs = observe(env, sr.state);
            erb.append(Experience{obs, action, sr.reward, next_obs, sr.terminal});
            state = sr.state;
            obs = std::move(next_obs);

            if (erb.size() < static_cast<std::size_t>(cfg.batch_size)) continue;
            batch.clear();
            const int n_hist = history_batch_count(cfg, pool.empty());
            for (int i = 0; i < n_hist; ++i) {
                batch.push_back(pool[rng.next_index(pool.size())]);
            }
            for (int i = n_hist; i < cfg.batch_size; ++i) {
                batch.push_back(erb[rng.next_index(erb.size())]);
            }
            params = td_update(std::move(params), target, batch, cfg);
            ++updates;
            if (updates % cfg.target_sync_every == 0) target = params;
        }
    }
    return {std::move(params), std::move(erb)};
}

std::map<std::string, double> evaluate(const QParams& params, std::span<const EnvSpec> envs,
                                       int starts_per_env, std::uint64_t eval_seed) {
    if (starts_per_env < 1) throw InvalidArgument("evaluate: starts_per_env must be positive");
    std::map<std::string, double> result;
    for (std::size_t ei = 0; ei < envs.size(); ++ei) {
        const EnvSpec& env = envs[ei];
        double total = 0.0;
        for (int j = 0; j < starts_per_env; ++j) {
            EnvState state = reset(env, mix_seed(eval_seed, ei * 0x10001ULL + j));
            while (!state.done) {
                const int action = greedy_action(params, observe(env, state));
                state = step(env, state, action).state;
            }
            total += distance_to_landmark(env, state.position);
        }
        result[env.env_id] = total / starts_per_env;
    }
    return result;
}

std::vector<RoundReport> lifelong_run(std::span<const EnvSpec> envs, const TrainConfig& cfg,
                                      const std::optional<CompressionSpec>& compression,
                                      int starts_per_env, const RoundSink& sink) {
    if (envs.empty()) throw InvalidArgument("lifelong_run: need at least one environment");
    cfg.validate();
    for (const auto& env : envs) env.validate();

    const std::uint64_t eval_seed = mix_seed(cfg.seed, kEvalStream);
    QParams params = QParams::zeros(envs[0].num_actions(), envs[0].feature_dim());
    std::vector<CompressedERB> history;
    std::vector<RoundReport> reports;
    reports.reserve(envs.size());

    for (std::size_t t = 0; t < envs.size(); ++t) {
        TrainConfig round_cfg = cfg;
        round_cfg.seed = mix_seed(cfg.seed, t);
        auto [new_params, erb] = train_round(std::move(params), envs[t], history, round_cfg);
        params = std::move(new_params);

        CompressedERB packed;
        if (compression) {
            CompressionSpec spec = *compression;
            spec.seed = mix_seed(mix_seed(compression->seed, kCompressStream), t);
            packed = compress(erb, spec);
        } else {
            packed = wrap_identity(erb);
        }

        RoundReport report;
        report.round_index = static_cast<int>(t);
        report.trained_env = envs[t].env_id;
        report.per_env_mean_distance = evaluate(params, envs, starts_per_env, eval_seed);
        double total = 0.0;
        for (const auto& [id, d] : report.per_env_mean_distance) total += d;
        report.overall_mean_distance = total / static_cast<double>(report.per_env_mean_distance.size());

        if (sink) sink(static_cast<int>(t), erb, packed, report);
        history.push_back(std::move(packed));
        reports.push_back(std::move(report));
    }
    return reports;
}

} // namespace erb
