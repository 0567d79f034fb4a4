#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ids/harness.hpp"

namespace ids {

/// One inequality check: satisfied iff lhs <= rhs + tol.
struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double tol = 0.0;
  bool satisfied = false;
  std::string context;
};

BoundReport make_report(std::string name, double lhs, double rhs, double tol, std::string context);

bool all_satisfied(const std::vector<BoundReport>& reports);
std::string reports_json(const std::string& suite, const std::vector<BoundReport>& reports);

/// Mean cumulative regret against sqrt(lambda H T) with tolerance 3 SE.
/// Throws InputError when the result carries no information ratios.
BoundReport check_regret_bound(const PolicyResult& result, double lambda, double initial_entropy,
                               std::size_t horizon, const std::string& context = "");

/// Mean cumulative regret against sqrt(mean ratio * H * T) with tolerance 3 SE.
BoundReport check_average_ratio_bound(const PolicyResult& result, double initial_entropy,
                                      std::size_t horizon, const std::string& context = "");

/// The regret certificate on the four experiment families (bernoulli and
/// gaussian with K arms, linear, revealing action), at reduced scale.
std::vector<BoundReport> regret_bound_suite(std::size_t trials, std::size_t horizon,
                                            std::uint64_t seed);

enum class ModelClass { finite, full_information, linear, semi_bandit };
std::string model_class_name(ModelClass c);

struct ClassModel {
  FiniteModel model;
  double lambda = 0.0;  // worst-case minimal ratio: K/2, 1/2, d/2 or d/(2m^2)
  std::string shape;
};

/// Random model of the class with randomized sizes (at most 8 hypotheses).
ClassModel random_model(ModelClass c, Rng& rng);

/// Exact minimal information ratio at every posterior state of one IDS
/// trajectory of `horizon` periods; one report holding the largest value.
/// Models whose reward span exceeds 1 are skipped (empty result).
std::vector<BoundReport> check_info_ratio_bounds(const FiniteModel& model, double lambda,
                                                 std::size_t horizon, Rng& rng,
                                                 const std::string& context);

/// check_info_ratio_bounds over `models` random models of every class.
std::vector<BoundReport> info_ratio_suite(std::size_t models, std::size_t horizon,
                                          std::uint64_t seed);

/// The two-action example where a known arm carries no information: the
/// minimizer must be a strict mixture with a finite ratio below that of every
/// point mass.
std::vector<BoundReport> check_randomization_necessity(double p);

struct PureExplorationResult {
  double mean_terminal = 0.0;   // E[min_a Delta_T(a)]
  double terminal_se = 0.0;
  double mean_cumulative = 0.0;  // E[sum_t Delta_t(A_t)]
  double gap_mean = 0.0;         // E[min_a Delta_T(a) - cumulative / T]
  double gap_se = 0.0;
  double initial_entropy = 0.0;
};

/// Plays argmax g_t(a) for T periods from the model's prior over `trials`
/// sampled trajectories, accounting regret with posterior Delta_t.
PureExplorationResult simulate_pure_exploration(const FiniteModel& model, std::size_t horizon,
                                                std::size_t trials, Rng& rng);

/// Terminal-regret bounds: against cumulative regret / T and against
/// sqrt(lambda H / T), both with tolerance 3 SE.
std::vector<BoundReport> check_pure_exploration(const FiniteModel& model, double lambda,
                                                std::size_t horizon, std::size_t trials, Rng& rng,
                                                const std::string& context);

std::vector<BoundReport> pure_exploration_suite(std::size_t models, std::size_t horizon,
                                                std::size_t trials, std::uint64_t seed);

/// Printed closed forms for the sparse linear example at t = 1.
double sparse_ts_ratio_formula(std::size_t d);
double sparse_ids_ratio_formula(std::size_t d);

/// Computed first-period ratios of Thompson sampling and IDS against the
/// closed forms, tolerance 1e-9.
std::vector<BoundReport> sparse_ratio_reports(const std::vector<std::size_t>& dims);

struct KgExampleResult {
  std::size_t horizon = 0;
  std::size_t known_arm_plays = 0;
  double regret = 0.0;               // sum of posterior Delta_t(A_t)
  double closed_form_constant = 0.0; // E[max(c, theta)] - c by incomplete beta
  double quadrature_constant = 0.0;  // the same by split Simpson quadrature
};

/// Known arm paying Bernoulli(c) against an arm with a Beta(1, f) prior under
/// the knowledge-gradient rule with horizon T.
KgExampleResult simulate_kg_example(double c, double f, std::size_t horizon);

std::vector<BoundReport> kg_example_reports(std::size_t horizon);

/// sum_{a != A*}(theta* - theta_a) / sum_{a != A*} KL(theta* || theta_a) in
/// nats. An infinite divergence gives 0. Throws InputError unless the
/// optimum is unique.
double lai_robbins_constant(const std::vector<double>& theta);

struct RevealingComparison {
  std::vector<std::size_t> ks;
  std::vector<PolicyResult> ids, ts;
};

RevealingComparison revealing_action_comparison(const std::vector<std::size_t>& ks,
                                                std::size_t trials, std::size_t horizon,
                                                std::uint64_t seed);

/// IDS spread across K below 1; Thompson strictly increasing with 3 SE
/// separation between consecutive K.
std::vector<BoundReport> revealing_reports(const RevealingComparison& c);

}  // namespace ids
