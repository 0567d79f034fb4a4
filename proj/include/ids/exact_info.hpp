#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ids/ids_core.hpp"
#include "ids/independent_posteriors.hpp"
#include "ids/random.hpp"

namespace ids {

/// Finite hypothesis set with discrete outcomes.
///
/// Hypothesis h draws outcome o after action a with probability
/// prob(h, a, o); the reward of outcome o under action a is reward(a, o).
class FiniteModel {
 public:
  FiniteModel() = default;

  /// Validates the tables and derives the optimal action of every
  /// hypothesis (lowest index among ties).
  FiniteModel(std::vector<double> weights, std::size_t actions, std::size_t outcomes,
              std::vector<double> probs, std::vector<double> rewards);

  std::size_t hypotheses() const { return weights_.size(); }
  std::size_t actions() const { return actions_; }
  std::size_t outcomes() const { return outcomes_; }

  double weight(std::size_t h) const { return weights_[h]; }
  const std::vector<double>& weights() const { return weights_; }
  double prob(std::size_t h, std::size_t a, std::size_t o) const {
    return probs_[(h * actions_ + a) * outcomes_ + o];
  }
  double reward(std::size_t a, std::size_t o) const { return rewards_[a * outcomes_ + o]; }
  double mean_reward(std::size_t h, std::size_t a) const { return means_[h * actions_ + a]; }
  std::size_t optimal_action(std::size_t h) const { return optimal_[h]; }

  const std::vector<double>& prob_table() const { return probs_; }
  const std::vector<double>& reward_table() const { return rewards_; }

  /// max R - min R over all (action, outcome) pairs that can occur.
  double reward_span() const;

  /// Same tables with new hypothesis weights.
  FiniteModel with_weights(std::vector<double> weights) const;

 private:
  std::vector<double> weights_;
  std::size_t actions_ = 0;
  std::size_t outcomes_ = 0;
  std::vector<double> probs_;
  std::vector<double> rewards_;
  std::vector<double> means_;
  std::vector<std::size_t> optimal_;
};

ActionDistribution exact_alpha(const FiniteModel& model);

/// Posterior predictive distribution of the outcome of `action`.
std::vector<double> predictive(const FiniteModel& model, std::size_t action);

/// I(A*; Y(a)) in nats as the alpha-weighted KL divergence between the
/// outcome distribution given A* and the marginal predictive.
double exact_info_gain(const FiniteModel& model, std::size_t action);

/// I(A*; Y(a)) as the expected reduction in the entropy of alpha.
double exact_info_gain_entropy(const FiniteModel& model, std::size_t action);

/// alpha, delta, full mutual-information gain, M(i, a) = E[mean reward of a |
/// A* = i], and rho*.
IdsStats exact_ids_stats(const FiniteModel& model);

/// As exact_ids_stats but with the mean-based gain sum_i alpha_i (M(i,a) -
/// E[mean reward of a])^2.
IdsStats exact_ids_stats_mean_based(const FiniteModel& model);

/// Shannon entropy in nats with 0 log 0 = 0.
double entropy(std::span<const double> probs);
double entropy(const ActionDistribution& dist);

/// Bayes rule after observing `outcome` from `action`. Throws InputError if
/// the outcome has zero predictive probability.
FiniteModel bayesian_model_update(const FiniteModel& model, std::size_t action,
                                  std::size_t outcome);

/// Index of a hypothesis drawn from the current weights.
std::size_t sample_hypothesis(const FiniteModel& model, Rng& rng);

/// Draws an outcome of `action` under hypothesis h.
std::size_t sample_outcome(const FiniteModel& model, std::size_t h, std::size_t action,
                           Rng& rng);

/// Posterior mean reward of every action.
std::vector<double> posterior_mean_rewards(const FiniteModel& model);

/// One-step knowledge-gradient factor E[V_{t+1} | A_t = a] - V_t, where V is
/// the best posterior mean reward, computed by enumerating outcomes.
std::vector<double> exact_kg_factors(const FiniteModel& model);

}  // namespace ids
