#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ids/ids_core.hpp"
#include "ids/random.hpp"

namespace ids {

struct LinearGaussianPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  double noise_variance = 1.0;

  static LinearGaussianPosterior isotropic_prior(std::size_t dim, double variance,
                                                 double noise_variance);
  std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
  void validate() const;
};

/// K x d matrix whose rows are action feature vectors.
struct ActionMatrix {
  Eigen::MatrixXd rows;

  std::size_t size() const { return static_cast<std::size_t>(rows.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(rows.cols()); }
  void validate() const;
};

struct LinearIdsStats {
  ActionDistribution alpha;
  std::vector<double> delta;
  std::vector<double> gain;  // a_i' L a_i
  Eigen::MatrixXd L;         // covariance of E[theta | A*] under A* ~ alpha
  Eigen::MatrixXd cond_param_means;  // K x d, row i = E[theta | A* = i]
  Eigen::VectorXd mean;              // Monte Carlo estimate of E[theta]
  double rho_star = 0.0;

  RatioInputs ratio_inputs() const { return RatioInputs{delta, gain}; }
};

/// Draws one parameter vector from a posterior into `out`.
using ThetaSampler = std::function<void(Rng&, Eigen::VectorXd&)>;

/// Monte Carlo layout. Samples are split into `chunks` contiguous blocks, each
/// with its own stream derived from `seed`, and reduced in block order, so the
/// result depends on (seed, chunks) and not on the thread count.
struct MonteCarloConfig {
  std::size_t num_samples = 10000;
  std::size_t chunks = 8;
  std::uint64_t seed = 0;
};

LinearIdsStats linear_ids_stats(const ActionMatrix& actions, const ThetaSampler& sampler,
                                const MonteCarloConfig& config);

/// Same computation with the chunk loop run sequentially. Kept as the
/// reference the OpenMP kernel is checked against.
LinearIdsStats linear_ids_stats_serial(const ActionMatrix& actions,
                                       const ThetaSampler& sampler,
                                       const MonteCarloConfig& config);

ThetaSampler gaussian_theta_sampler(const LinearGaussianPosterior& post);

/// Samples hypothesis j with probability weight_j. Weights must sum to 1.
ThetaSampler finite_theta_sampler(std::vector<std::pair<double, Eigen::VectorXd>> hypotheses);

/// Rank-one conjugate update for reward = a'theta + N(0, noise_variance).
LinearGaussianPosterior linear_gaussian_update(const LinearGaussianPosterior& post,
                                               const Eigen::VectorXd& action, double reward);

}  // namespace ids
