#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ids/environments.hpp"
#include "ids/policies.hpp"

namespace ids {

inline constexpr std::array<double, 6> kQuantileLevels = {0.10, 0.25, 0.50, 0.75, 0.90, 0.95};

struct ExperimentConfig {
  EnvironmentSpec environment;
  std::vector<PolicySpec> policies;
  std::size_t horizon = 1000;
  std::size_t trials = 100;
  std::uint64_t master_seed = 0;
  std::size_t grid_size = 1000;
  std::size_t mc_samples = 10000;
  std::size_t mc_chunks = 8;
  std::size_t trace_resolution = 10;
  /// Periods at which every trial's cumulative regret is kept (in memory only).
  std::vector<std::size_t> checkpoints;
  /// Worker threads; 0 means BANDIT_THREADS or the OpenMP default.
  int threads = 0;

  void validate() const;
};

struct PolicyResult {
  std::string policy;
  double mean_regret = 0.0;
  double std_error = 0.0;
  std::array<double, 6> quantiles{};
  std::vector<std::size_t> trace_t;
  std::vector<double> trace_mean;

  // In-memory only; not part of the CSV/JSON schema.
  std::vector<double> final_regret;                  // per trial
  std::vector<std::vector<double>> checkpoint_regret;  // [checkpoint][trial]
  double mean_ratio = 0.0;            // information ratio averaged over periods and trials
  double mean_initial_entropy = 0.0;  // H(alpha_1) averaged over trials
};

struct RegretTable {
  std::vector<PolicyResult> policies;

  const PolicyResult& at(const std::string& policy) const;
};

/// Runs every trial, each policy against the same realization, in parallel
/// over trials. Trial i uses streams derived from (master_seed, i) only.
RegretTable run_experiment(const ExperimentConfig& config);

/// Same computation with a plain loop; the reference for run_experiment.
RegretTable run_experiment_serial(const ExperimentConfig& config);

/// Type-7 sample quantile (linear interpolation between order statistics).
double quantile_type7(std::vector<double> values, double level);

/// Mean, sample standard deviation / sqrt(n) and the kQuantileLevels quantiles.
void summarize(const std::vector<double>& values, double& mean, double& std_error,
               std::array<double, 6>& quantiles);

int resolve_thread_count(int requested);

enum class OutputFormat { csv, json };
OutputFormat parse_format(const std::string& name);

/// CSV writes the summary to `path` and the trace to trace_path(path); JSON
/// writes both into `path`. Throws std::runtime_error naming the path on
/// I/O failure.
void write_results(const RegretTable& table, const std::string& path, OutputFormat format);
std::string trace_path(const std::string& summary_path);

void write_summary_csv(const RegretTable& table, std::ostream& out);
void write_trace_csv(const RegretTable& table, std::ostream& out);
std::string results_json(const RegretTable& table);

/// Reads the CSV pair written by write_results.
RegretTable read_results_csv(const std::string& summary_path);
RegretTable read_results_csv(std::istream& summary, std::istream& trace);

/// Flat key = value configuration text; '#' starts a comment.
std::map<std::string, std::string> parse_config_text(std::istream& in);
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Applies recognised keys to `config`; unknown keys raise ConfigError.
void apply_config(ExperimentConfig& config, const std::map<std::string, std::string>& values);

std::vector<PolicySpec> parse_policy_list(const std::string& csv, double gpucb_c = 0.9);

}  // namespace ids
