#include "ids/linear.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "ids/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ids {
namespace {

// Dimensions up to this size draw their normal vector on the stack.
constexpr int kStackDim = 32;

struct ChunkTotals {
  std::vector<std::size_t> counts;
  Eigen::MatrixXd sums;  // K x d
};

ChunkTotals run_chunk(const ActionMatrix& actions, const ThetaSampler& sampler,
                      const MonteCarloConfig& config, std::size_t chunk) {
  const std::size_t k = actions.size();
  const std::size_t d = actions.dim();
  const std::size_t begin = config.num_samples * chunk / config.chunks;
  const std::size_t end = config.num_samples * (chunk + 1) / config.chunks;
  ChunkTotals totals{std::vector<std::size_t>(k, 0),
                     Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                           static_cast<Eigen::Index>(d))};
  Rng rng{derive_seed(config.seed, 0x4C494E4541520000ULL, chunk)};
  Eigen::VectorXd theta(static_cast<Eigen::Index>(d));
  Eigen::VectorXd values(static_cast<Eigen::Index>(k));
  for (std::size_t m = begin; m < end; ++m) {
    sampler(rng, theta);
    values.noalias() = actions.rows * theta;
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < values.size(); ++i) {
      if (values(i) > values(best)) best = i;
    }
    ++totals.counts[static_cast<std::size_t>(best)];
    totals.sums.row(best) += theta.transpose();
  }
  return totals;
}

LinearIdsStats finalize(const ActionMatrix& actions, const std::vector<ChunkTotals>& parts,
                        std::size_t num_samples) {
  const auto k = static_cast<Eigen::Index>(actions.size());
  const auto d = static_cast<Eigen::Index>(actions.dim());
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
  for (const ChunkTotals& p : parts) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += p.counts[i];
    sums += p.sums;
  }
  const double total = static_cast<double>(num_samples);

  LinearIdsStats out;
  out.mean = sums.colwise().sum().transpose() / total;
  out.cond_param_means.resize(k, d);
  std::vector<double> alpha(static_cast<std::size_t>(k));
  out.L = Eigen::MatrixXd::Zero(d, d);
  out.rho_star = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const std::size_t n = counts[static_cast<std::size_t>(i)];
    const double a = static_cast<double>(n) / total;
    alpha[static_cast<std::size_t>(i)] = a;
    if (n == 0) {
      out.cond_param_means.row(i) = out.mean.transpose();
      continue;
    }
    out.cond_param_means.row(i) = sums.row(i) / static_cast<double>(n);
    const Eigen::VectorXd shift = out.cond_param_means.row(i).transpose() - out.mean;
    out.L.noalias() += a * shift * shift.transpose();
    out.rho_star += a * actions.rows.row(i).dot(out.cond_param_means.row(i));
  }
  double residual = 1.0;
  for (std::size_t i = 0; i + 1 < alpha.size(); ++i) residual -= alpha[i];
  alpha.back() = std::max(0.0, residual);
  out.alpha = ActionDistribution(std::move(alpha));

  out.delta.resize(static_cast<std::size_t>(k));
  out.gain.resize(static_cast<std::size_t>(k));
  const Eigen::VectorXd mean_rewards = actions.rows * out.mean;
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::VectorXd a = actions.rows.row(i).transpose();
    out.delta[static_cast<std::size_t>(i)] = std::max(0.0, out.rho_star - mean_rewards(i));
    out.gain[static_cast<std::size_t>(i)] = std::max(0.0, a.dot(out.L * a));
  }
  return out;
}

void check_inputs(const ActionMatrix& actions, const MonteCarloConfig& config) {
  actions.validate();
  if (config.num_samples == 0) throw InputError("num_samples must be positive");
  if (config.chunks == 0 || config.chunks > config.num_samples) {
    throw InputError("chunks must be in [1, num_samples]");
  }
}

}  // namespace

LinearGaussianPosterior LinearGaussianPosterior::isotropic_prior(std::size_t dim,
                                                                 double variance,
                                                                 double noise_variance) {
  const auto d = static_cast<Eigen::Index>(dim);
  return LinearGaussianPosterior{Eigen::VectorXd::Zero(d),
                                 variance * Eigen::MatrixXd::Identity(d, d), noise_variance};
}

void LinearGaussianPosterior::validate() const {
  if (mean.size() == 0 || covariance.rows() != mean.size() ||
      covariance.cols() != mean.size()) {
    throw InputError("linear posterior dimensions do not match");
  }
  if (!(noise_variance > 0.0)) throw InputError("noise variance must be positive");
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw InputError("posterior covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw InputError("posterior covariance is not positive semidefinite");
  }
}

void ActionMatrix::validate() const {
  if (rows.rows() < 1 || rows.cols() < 1) {
    throw InputError("action matrix needs K >= 1 rows and d >= 1 columns");
  }
}

LinearIdsStats linear_ids_stats(const ActionMatrix& actions, const ThetaSampler& sampler,
                                const MonteCarloConfig& config) {
  check_inputs(actions, config);
  std::vector<ChunkTotals> parts(config.chunks);
  const auto chunks = static_cast<std::ptrdiff_t>(config.chunks);
  // Nested inside a parallel trial loop this runs on the calling thread only.
#pragma omp parallel for schedule(static) if (!omp_in_parallel())
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    parts[static_cast<std::size_t>(c)] =
        run_chunk(actions, sampler, config, static_cast<std::size_t>(c));
  }
  return finalize(actions, parts, config.num_samples);
}

LinearIdsStats linear_ids_stats_serial(const ActionMatrix& actions,
                                       const ThetaSampler& sampler,
                                       const MonteCarloConfig& config) {
  check_inputs(actions, config);
  std::vector<ChunkTotals> parts;
  parts.reserve(config.chunks);
  for (std::size_t c = 0; c < config.chunks; ++c) {
    parts.push_back(run_chunk(actions, sampler, config, c));
  }
  return finalize(actions, parts, config.num_samples);
}

ThetaSampler gaussian_theta_sampler(const LinearGaussianPosterior& post) {
  post.validate();
  // Symmetric square root; tolerates singular (e.g. point-mass) covariances.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(post.covariance);
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  auto factor = std::make_shared<const Eigen::MatrixXd>(eig.eigenvectors() * root.asDiagonal());
  auto mean = std::make_shared<const Eigen::VectorXd>(post.mean);
  return [factor, mean](Rng& rng, Eigen::VectorXd& out) {
    const Eigen::Index d = mean->size();
    if (d <= kStackDim) {
      Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kStackDim, 1> z(d);
      for (Eigen::Index i = 0; i < d; ++i) z(i) = standard_normal(rng);
      out.noalias() = *mean + *factor * z;
      return;
    }
    Eigen::VectorXd z(d);
    for (Eigen::Index i = 0; i < d; ++i) z(i) = standard_normal(rng);
    out.noalias() = *mean + *factor * z;
  };
}

ThetaSampler finite_theta_sampler(std::vector<std::pair<double, Eigen::VectorXd>> hypotheses) {
  if (hypotheses.empty()) throw InputError("finite sampler needs at least one hypothesis");
  double sum = 0.0;
  for (const auto& [w, theta] : hypotheses) {
    if (!(w >= 0.0)) throw InputError("hypothesis weights must be non-negative");
    if (theta.size() != hypotheses.front().second.size()) {
      throw InputError("hypothesis vectors differ in dimension");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InputError("hypothesis weights must sum to 1");
  auto shared = std::make_shared<const std::vector<std::pair<double, Eigen::VectorXd>>>(
      std::move(hypotheses));
  return [shared](Rng& rng, Eigen::VectorXd& out) {
    const double u = uniform01(rng);
    double acc = 0.0;
    std::size_t pick = shared->size() - 1;
    for (std::size_t j = 0; j < shared->size(); ++j) {
      acc += (*shared)[j].first;
      if (u < acc) {
        pick = j;
        break;
      }
    }
    out = (*shared)[pick].second;
  };
}

LinearGaussianPosterior linear_gaussian_update(const LinearGaussianPosterior& post,
                                               const Eigen::VectorXd& action, double reward) {
  post.validate();
  if (action.size() != post.mean.size()) throw InputError("action dimension mismatch");
  LinearGaussianPosterior out = post;
  const Eigen::VectorXd sa = post.covariance * action;
  const double s = action.dot(sa) + post.noise_variance;
  out.mean += sa * ((reward - action.dot(post.mean)) / s);
  out.covariance.noalias() -= sa * sa.transpose() / s;
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

}  // namespace ids
