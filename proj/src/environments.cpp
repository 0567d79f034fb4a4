#include "ids/environments.hpp"

#include <algorithm>
#include <cmath>

#include "ids/errors.hpp"
#include "ids/finite_models.hpp"

namespace ids {

std::string family_name(Family f) {
  switch (f) {
    case Family::bernoulli: return "bernoulli";
    case Family::gaussian: return "gaussian";
    case Family::linear_gaussian: return "linear_gaussian";
    case Family::revealing_action: return "revealing_action";
    case Family::sparse_linear: return "sparse_linear";
    case Family::semi_bandit: return "semi_bandit";
    case Family::finite_model: return "finite_model";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  for (Family f : {Family::bernoulli, Family::gaussian, Family::linear_gaussian,
                   Family::revealing_action, Family::sparse_linear, Family::semi_bandit,
                   Family::finite_model}) {
    if (family_name(f) == name) return f;
  }
  if (name == "linear") return Family::linear_gaussian;
  throw ConfigError("unknown environment family '" + name + "'");
}

bool is_finite_family(Family f) {
  return f == Family::revealing_action || f == Family::sparse_linear ||
         f == Family::semi_bandit || f == Family::finite_model;
}

std::size_t EnvironmentSpec::action_count() const {
  if (is_finite_family(family)) {
    if (!model) throw ConfigError("finite environment has no model; call prepare_environment");
    return model->actions();
  }
  return arms;
}

void EnvironmentSpec::validate() const {
  if (arms < 1) throw ConfigError("environment needs at least one arm");
  switch (family) {
    case Family::bernoulli:
      if (!(beta_a > 0 && beta_b > 0)) throw ConfigError("Beta prior parameters must be positive");
      for (double t : fixed_theta) {
        if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("Bernoulli means must lie in [0, 1]");
      }
      break;
    case Family::gaussian:
      if (!(prior_sd > 0 && noise_sd > 0)) throw ConfigError("Gaussian scales must be positive");
      break;
    case Family::linear_gaussian:
      if (dim < 1) throw ConfigError("linear environment needs d >= 1");
      if (!(prior_variance > 0 && noise_sd > 0)) {
        throw ConfigError("linear prior and noise scales must be positive");
      }
      break;
    case Family::sparse_linear:
      if (dim < 1 || dim > 16) throw ConfigError("sparse_linear needs 1 <= d <= 16");
      break;
    case Family::semi_bandit:
      if (dim < 1 || dim > 12) throw ConfigError("semi_bandit needs 1 <= d <= 12");
      if (sparsity < 1 || sparsity > dim) throw ConfigError("semi_bandit needs 1 <= m <= d");
      if (semi_values.empty() || semi_values.size() != semi_weights.size()) {
        throw ConfigError("semi_bandit value and weight lists must match");
      }
      break;
    case Family::revealing_action:
    case Family::finite_model:
      break;
  }
  if (!fixed_theta.empty()) {
    if (family != Family::bernoulli && family != Family::gaussian) {
      throw ConfigError("fixed theta is only supported for bernoulli and gaussian");
    }
    if (fixed_theta.size() != arms) throw ConfigError("fixed theta must have one entry per arm");
  }
  if (family == Family::finite_model && !model) {
    throw ConfigError("finite_model environment needs a model file");
  }
}

EnvironmentSpec prepare_environment(EnvironmentSpec spec) {
  spec.validate();
  switch (spec.family) {
    case Family::revealing_action:
      spec.model = std::make_shared<const FiniteModel>(revealing_action_model(spec.arms));
      break;
    case Family::sparse_linear:
      spec.model = std::make_shared<const FiniteModel>(sparse_linear_model(spec.dim));
      break;
    case Family::semi_bandit: {
      const std::vector<std::vector<double>> values(spec.dim, spec.semi_values);
      const std::vector<std::vector<double>> weights(spec.dim, spec.semi_weights);
      spec.model = std::make_shared<const FiniteModel>(
          semi_bandit_model(values, weights, spec.sparsity));
      break;
    }
    default:
      break;
  }
  if (spec.model && spec.family != Family::finite_model) spec.arms = spec.model->actions();
  if (spec.family == Family::finite_model) spec.arms = spec.model->actions();
  return spec;
}

double TrialRealization::per_period_regret(std::size_t action) const {
  if (action >= mean_rewards.size()) throw InputError("action index out of range");
  return std::max(0.0, optimal_mean_reward - mean_rewards[action]);
}

TrialRealization draw_trial(const EnvironmentSpec& spec, Rng& rng) {
  TrialRealization r;
  r.family = spec.family;
  r.noise_sd = spec.noise_sd;
  switch (spec.family) {
    case Family::bernoulli:
      if (!spec.fixed_theta.empty()) {
        r.theta = spec.fixed_theta;
      } else {
        r.theta.resize(spec.arms);
        for (double& t : r.theta) t = beta_draw(rng, spec.beta_a, spec.beta_b);
      }
      r.mean_rewards = r.theta;
      break;
    case Family::gaussian:
      if (!spec.fixed_theta.empty()) {
        r.theta = spec.fixed_theta;
      } else {
        r.theta.resize(spec.arms);
        for (double& t : r.theta) t = spec.prior_mean + spec.prior_sd * standard_normal(rng);
      }
      r.mean_rewards = r.theta;
      break;
    case Family::linear_gaussian: {
      const auto d = static_cast<Eigen::Index>(spec.dim);
      const auto k = static_cast<Eigen::Index>(spec.arms);
      const double bound = 1.0 / std::sqrt(static_cast<double>(spec.dim));
      r.features.rows.resize(k, d);
      for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
          r.features.rows(i, j) = -bound + 2.0 * bound * uniform01(rng);
        }
      }
      r.theta.resize(spec.dim);
      const double sd = std::sqrt(spec.prior_variance);
      for (double& t : r.theta) t = sd * standard_normal(rng);
      const Eigen::Map<const Eigen::VectorXd> theta(r.theta.data(), d);
      const Eigen::VectorXd means = r.features.rows * theta;
      r.mean_rewards.assign(means.data(), means.data() + k);
      break;
    }
    case Family::revealing_action:
    case Family::sparse_linear:
    case Family::semi_bandit:
    case Family::finite_model: {
      if (!spec.model) throw ConfigError("finite environment has no model");
      r.model = spec.model;
      r.hypothesis = sample_hypothesis(*spec.model, rng);
      r.mean_rewards.resize(spec.model->actions());
      for (std::size_t a = 0; a < r.mean_rewards.size(); ++a) {
        r.mean_rewards[a] = spec.model->mean_reward(r.hypothesis, a);
      }
      break;
    }
  }
  r.optimal_action = argmax_index(r.mean_rewards);
  r.optimal_mean_reward = r.mean_rewards[r.optimal_action];
  return r;
}

Observation sample_reward(const TrialRealization& trial, std::size_t action, Rng& rng) {
  if (action >= trial.mean_rewards.size()) throw InputError("action index out of range");
  Observation obs;
  switch (trial.family) {
    case Family::bernoulli:
      obs.outcome = uniform01(rng) < trial.theta[action] ? 1 : 0;
      obs.reward = static_cast<double>(obs.outcome);
      break;
    case Family::gaussian:
    case Family::linear_gaussian:
      obs.reward = trial.mean_rewards[action] + trial.noise_sd * standard_normal(rng);
      break;
    default:
      obs.outcome = sample_outcome(*trial.model, trial.hypothesis, action, rng);
      obs.reward = trial.model->reward(action, obs.outcome);
      break;
  }
  return obs;
}

}  // namespace ids
