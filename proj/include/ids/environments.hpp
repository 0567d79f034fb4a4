#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "ids/exact_info.hpp"
#include "ids/linear.hpp"
#include "ids/random.hpp"

namespace ids {

enum class Family {
  bernoulli,         // independent arms, theta_i ~ Beta(a, b)
  gaussian,          // independent arms, theta_i ~ N(m, s^2), N(0, noise^2) reward noise
  linear_gaussian,   // theta ~ N(0, v I_d), K features uniform on [-1/sqrt(d), 1/sqrt(d)]^d
  revealing_action,  // finite model with a revealing action a_0
  sparse_linear,     // one-hot theta, L1-normalized binary actions
  semi_bandit,       // m-subsets of d Bernoulli components, rewards in [-1/2, 1/2]
  finite_model,      // arbitrary finite model loaded from a model file
};

std::string family_name(Family f);
/// Accepts the names printed by family_name plus "linear". Throws ConfigError.
Family parse_family(const std::string& name);
bool is_finite_family(Family f);

struct EnvironmentSpec {
  Family family = Family::bernoulli;
  std::size_t arms = 10;      // K; revealing_action: number of hypotheses
  std::size_t dim = 5;        // linear_gaussian, sparse_linear, semi_bandit
  std::size_t sparsity = 2;   // semi_bandit subset size m

  double beta_a = 1.0, beta_b = 1.0;            // bernoulli prior
  double prior_mean = 0.0, prior_sd = 1.0;      // gaussian prior
  double noise_sd = 1.0;                        // gaussian and linear reward noise
  double prior_variance = 10.0;                 // linear prior covariance scale
  std::vector<double> semi_values = {0.2, 0.8};   // candidate component means
  std::vector<double> semi_weights = {0.5, 0.5};  // and their prior weights

  /// bernoulli/gaussian: when non-empty, every trial uses these arm means
  /// instead of drawing them from the prior. Agents still start from the prior.
  std::vector<double> fixed_theta;

  /// Prior for the finite families. Built by prepare_environment.
  std::shared_ptr<const FiniteModel> model;

  std::size_t action_count() const;
  void validate() const;
};

/// Builds the finite prior model where the family needs one. finite_model
/// specs must already carry their model.
EnvironmentSpec prepare_environment(EnvironmentSpec spec);

struct Observation {
  double reward = 0.0;
  std::size_t outcome = 0;  // bernoulli: 0/1; finite families: outcome index
};

struct TrialRealization {
  Family family = Family::bernoulli;
  std::vector<double> theta;          // arm means, or the linear parameter
  ActionMatrix features;              // linear_gaussian only
  std::size_t hypothesis = 0;         // finite families
  std::shared_ptr<const FiniteModel> model;
  std::vector<double> mean_rewards;   // true mean reward of every action
  double optimal_mean_reward = 0.0;
  std::size_t optimal_action = 0;
  double noise_sd = 1.0;

  /// optimal_mean_reward - mean reward of the action.
  double per_period_regret(std::size_t action) const;
};

TrialRealization draw_trial(const EnvironmentSpec& spec, Rng& rng);

Observation sample_reward(const TrialRealization& trial, std::size_t action, Rng& rng);

}  // namespace ids
