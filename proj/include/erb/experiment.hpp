#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "erb/agent.hpp"
#include "erb/gridworld.hpp"

namespace erb {

// TOML experiment description: environment geometry, agent hyperparameters,
// compression grid, and run bookkeeping.
struct ExperimentConfig {
    EnvSpec base_env;        // geometry fields only; landmarks come from base_seed
    int num_envs = 10;
    std::uint64_t base_seed = 1;

    TrainConfig agent;       // agent.seed is replaced per grid cell

    std::vector<std::string> methods{"none", "coreset"};  // "none" or a Method name
    std::vector<double> ratios{10.0};
    int max_iter = 100;

    std::vector<std::uint64_t> seeds{1};
    std::string output_dir = "out";
    int starts_per_env = 20;

    void validate() const;
};

ExperimentConfig load_experiment_config(const std::string& path);

struct GridCell {
    std::string method;  // "none" or a Method name
    double ratio = 1.0;  // 1 for "none"
    std::uint64_t seed = 0;

    std::string label() const;
};

// (method x ratio x seed) cells in deterministic order; "none" ignores ratios.
std::vector<GridCell> experiment_grid(const ExperimentConfig& config);

// Runs every grid cell, persisting per-round raw and compressed ERBs plus a
// per-cell CSV under output_dir/<cell>/, then merges all cell CSVs into
// results.csv. Cells whose CSV already exists are skipped.
void run_lifelong_experiment(const ExperimentConfig& config, std::ostream& log);

// One results.csv row per (round, evaluated env).
struct ResultRow {
    int round = 0;
    std::string env;
    std::string method;
    double ratio = 1.0;
    std::uint64_t seed = 0;
    double mean_terminal_distance = 0.0;
};

std::vector<ResultRow> read_results_csv(const std::string& path);

struct CompareRow {
    std::string method;
    double ratio = 1.0;
    int n_pairs = 0;
    double mean_baseline = 0.0;
    double mean_method = 0.0;
    double mean_diff = 0.0;
    double t = 0.0;
    double p = 1.0;
    std::string status;  // "ok", "zero-variance", or "baseline"
};

// Final-round per-(env, seed) distances per method/ratio, paired against the
// baseline method.
std::vector<CompareRow> compare_results(const std::vector<ResultRow>& rows,
                                        const std::string& baseline);

void write_compare_csv(const std::vector<CompareRow>& rows, std::ostream& out);

} // namespace erb
