#pragma once

#include <cstddef>
#include <vector>

#include "ids/exact_info.hpp"
#include "ids/independent_posteriors.hpp"
#include "ids/linear.hpp"
#include "ids/random.hpp"

namespace ids {

/// Per-arm play counts, empirical means and sums of squared rewards.
struct FrequentistArmStats {
  std::vector<std::size_t> counts;
  std::vector<double> means;
  std::vector<double> sum_squares;

  static FrequentistArmStats empty(std::size_t arms);
  std::size_t arms() const { return counts.size(); }
  void record(std::size_t arm, double reward);
  /// Biased (1/N) empirical variance; 0 for an untried arm.
  double variance(std::size_t arm) const;
};

// Thompson sampling: one posterior draw, then the best action under it.
std::size_t thompson_action(const BetaPosterior& post, Rng& rng);
std::size_t thompson_action(const GaussianPosterior& post, Rng& rng);
std::size_t thompson_action(const LinearGaussianPosterior& post, const ActionMatrix& actions,
                            Rng& rng);
std::size_t thompson_action(const FiniteModel& model, Rng& rng);

// Frequentist index policies. t is the 1-based period. Untried arms are
// played first, lowest index first.

/// theta_hat + sqrt(2 log t / N).
std::size_t ucb1_action(const FrequentistArmStats& stats, std::size_t t);

/// theta_hat + sqrt(min{1/4, V} log t / N), V = variance + sqrt(2 log t / N).
std::size_t ucb_tuned_action(const FrequentistArmStats& stats, std::size_t t);

/// theta_hat + sqrt(max{log(T / (K N)), 0} / N).
std::size_t moss_action(const FrequentistArmStats& stats, std::size_t horizon);

/// Quantile level 1 - 1/t clamped to [1e-9, 1 - 1e-9].
double bayes_ucb_level(std::size_t t);

/// Posterior quantile of each arm's mean at the Bayes UCB level.
std::vector<double> bayes_ucb_indices(const BetaPosterior& post, std::size_t t);
std::vector<double> bayes_ucb_indices(const GaussianPosterior& post, std::size_t t);
std::vector<double> bayes_ucb_indices(const LinearGaussianPosterior& post,
                                      const ActionMatrix& actions, std::size_t t);

std::size_t bayes_ucb_action(const BetaPosterior& post, std::size_t t);
std::size_t bayes_ucb_action(const GaussianPosterior& post, std::size_t t);
std::size_t bayes_ucb_action(const LinearGaussianPosterior& post, const ActionMatrix& actions,
                             std::size_t t);

struct GpucbVariant {
  bool tuned = false;
  double c = 0.9;
};

/// standard: 2 log(K t^2 pi^2 / 6); tuned: c log t.
double gpucb_beta(std::size_t arms, std::size_t t, const GpucbVariant& variant);

std::size_t gpucb_action(const GaussianPosterior& post, std::size_t t,
                         const GpucbVariant& variant);
std::size_t gpucb_action(const LinearGaussianPosterior& post, const ActionMatrix& actions,
                         std::size_t t, const GpucbVariant& variant);

/// f(z) = z Phi(z) + phi(z).
double kg_f(double z);

/// E[max_i (a_i + b_i Z)] - max_i a_i for Z ~ N(0, 1), computed from the
/// upper envelope of the lines.
double expected_max_improvement(const std::vector<double>& a, const std::vector<double>& b);

/// KG factors for Bernoulli arms. Arm i has current mean means[i] and moves
/// to up[i] after a success and down[i] after a failure; a known arm has
/// up = down = mean.
std::vector<double> bernoulli_kg_factors(const std::vector<double>& means,
                                         const std::vector<double>& up,
                                         const std::vector<double>& down);
std::vector<double> kg_factors(const BetaPosterior& post);

/// sigma_tilde * f(-|mu_i - max_{j != i} mu_j| / sigma_tilde) with
/// sigma_tilde = sigma^2 / sqrt(sigma^2 + noise^2).
std::vector<double> kg_factors(const GaussianPosterior& post);

/// Correlated KG over the K posterior mean rewards: observing action a moves
/// the mean reward of action i by (x_i' Sigma x_a) / sqrt(x_a' Sigma x_a + s^2) Z.
std::vector<double> kg_factors(const LinearGaussianPosterior& post, const ActionMatrix& actions);

/// argmax of mean + (T - t) * factor.
std::size_t kg_choice(const std::vector<double>& means, const std::vector<double>& factors,
                      std::size_t t, std::size_t horizon);

std::vector<double> posterior_means(const BetaPosterior& post);
std::vector<double> posterior_means(const LinearGaussianPosterior& post,
                                    const ActionMatrix& actions);

}  // namespace ids
