#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "ids/ids_core.hpp"

namespace ids {

/// Independent Beta posteriors, one per arm.
struct BetaPosterior {
  std::vector<double> alpha_params;
  std::vector<double> beta_params;

  static BetaPosterior uniform_prior(std::size_t arms);

  std::size_t size() const { return alpha_params.size(); }
  double mean(std::size_t i) const {
    return alpha_params[i] / (alpha_params[i] + beta_params[i]);
  }
  void validate() const;
};

/// Independent Gaussian posteriors over arm means with known observation noise.
struct GaussianPosterior {
  std::vector<double> means;
  std::vector<double> stddevs;
  double noise_stddev = 1.0;

  static GaussianPosterior standard_prior(std::size_t arms);

  std::size_t size() const { return means.size(); }
  void validate() const;
};

/// Everything the IDS solver and the diagnostics need about one period.
struct IdsStats {
  ActionDistribution alpha;  // P(arm i is optimal)
  std::vector<double> delta;
  std::vector<double> gain;
  Eigen::MatrixXd cond_means;  // (i, j) = E[X_j | arm i optimal]
  double rho_star = 0.0;       // E[max_j X_j]

  RatioInputs ratio_inputs() const { return RatioInputs{delta, gain}; }
};

enum class GainKind {
  mutual_information,  // expected KL between conditional and marginal predictive
  mean_based,          // expected squared shift of the predictive mean
};

inline constexpr std::size_t kDefaultGridSize = 1000;

/// Bernoulli-arm statistics by composite Simpson quadrature on a uniform grid over
/// [0, 1]. grid_size must be >= 100.
IdsStats beta_ids_stats(const BetaPosterior& post,
                        std::size_t grid_size = kDefaultGridSize,
                        GainKind kind = GainKind::mutual_information);

BetaPosterior beta_update(const BetaPosterior& post, std::size_t arm, int reward);

/// Mean-based statistics for independent Gaussian arms. The grid spans
/// [min mu - 6 max sigma, max mu + 6 max sigma].
IdsStats gaussian_ids_stats(const GaussianPosterior& post,
                            std::size_t grid_size = kDefaultGridSize);

GaussianPosterior gaussian_update(const GaussianPosterior& post, std::size_t arm,
                                  double reward);

/// E[X | X <= x] for X ~ N(mu, sigma^2). Uses an asymptotic expansion of the
/// inverse Mills ratio once Phi((x-mu)/sigma) would underflow.
double truncated_normal_mean(double mu, double sigma, double x);

double normal_pdf(double z);
double normal_cdf(double z);

/// Bernoulli KL divergence in nats; both arguments clamped to [1e-9, 1-1e-9].
double bernoulli_kl(double p, double q);

/// Incrementally maintained Beta quadrature tables.
///
/// Only the played arm changes each period. Unit steps of either Beta
/// parameter are applied with the exact recurrences
///   I_x(a+1, b) = I_x(a, b) - x(1-x) f(x; a, b) / a
///   I_x(a, b+1) = I_x(a, b) + x(1-x) f(x; a, b) / b
/// and the CDF is recomputed from scratch every kRefreshInterval steps.
class BetaGridCache {
 public:
  static constexpr int kRefreshInterval = 32;

  BetaGridCache(const BetaPosterior& post, std::size_t grid_size);

  void set_arm(std::size_t arm, double alpha_param, double beta_param);
  IdsStats stats(GainKind kind) const;

  const BetaPosterior& posterior() const { return post_; }
  std::size_t grid_size() const { return x_.size(); }

 private:
  void recompute_arm(std::size_t arm);
  void recompute_pdf(std::size_t arm);
  void recompute_conditional_mean(std::size_t arm);

  BetaPosterior post_;
  std::vector<double> x_;
  std::vector<double> weights_;
  std::vector<double> log_x_;
  std::vector<double> log_1mx_;
  Eigen::MatrixXd pdf_;       // K x G
  Eigen::MatrixXd cdf_;       // K x G
  Eigen::MatrixXd cond_mean_; // K x G, E[X_j | X_j <= x]
  std::vector<int> steps_since_refresh_;
};

namespace detail {

/// Shared quadrature back end. Rows of pdf/cdf/cond_mean are arms, columns
/// are grid nodes; weights come from quadrature_weights(x).
IdsStats stats_from_grid(const std::vector<double>& x,
                         const std::vector<double>& weights,
                         const Eigen::MatrixXd& pdf, const Eigen::MatrixXd& cdf,
                         const Eigen::MatrixXd& cond_mean,
                         const std::vector<double>& arm_means, GainKind kind);

/// Composite Simpson weights for a uniform grid (3/8 rule on the last panel
/// when the point count is even).
std::vector<double> quadrature_weights(const std::vector<double>& x);

}  // namespace detail

}  // namespace ids
