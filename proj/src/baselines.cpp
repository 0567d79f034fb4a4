#include "ids/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "ids/errors.hpp"

namespace ids {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lowest-index untried arm, or arms() if every arm has been played.
std::size_t first_untried(const FrequentistArmStats& stats) {
  for (std::size_t i = 0; i < stats.arms(); ++i) {
    if (stats.counts[i] == 0) return i;
  }
  return stats.arms();
}

template <class Bonus>
std::size_t index_policy(const FrequentistArmStats& stats, Bonus bonus) {
  if (stats.arms() == 0) throw InputError("no arms");
  const std::size_t untried = first_untried(stats);
  if (untried < stats.arms()) return untried;
  std::vector<double> index(stats.arms());
  for (std::size_t i = 0; i < stats.arms(); ++i) {
    index[i] = stats.means[i] + bonus(i, static_cast<double>(stats.counts[i]));
  }
  return argmax_index(index);
}

double normal_quantile(double p) {
  static const boost::math::normal standard;
  return boost::math::quantile(standard, p);
}

std::vector<double> reward_stddevs(const LinearGaussianPosterior& post,
                                   const ActionMatrix& actions) {
  const Eigen::MatrixXd sx = actions.rows * post.covariance;
  std::vector<double> out(actions.size());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out[i] = std::sqrt(std::max(0.0, sx.row(r).dot(actions.rows.row(r))));
  }
  return out;
}

}  // namespace

FrequentistArmStats FrequentistArmStats::empty(std::size_t arms) {
  return FrequentistArmStats{std::vector<std::size_t>(arms, 0), std::vector<double>(arms, 0.0),
                             std::vector<double>(arms, 0.0)};
}

void FrequentistArmStats::record(std::size_t arm, double reward) {
  if (arm >= arms()) throw InputError("arm index out of range");
  counts[arm] += 1;
  means[arm] += (reward - means[arm]) / static_cast<double>(counts[arm]);
  sum_squares[arm] += reward * reward;
}

double FrequentistArmStats::variance(std::size_t arm) const {
  if (counts[arm] == 0) return 0.0;
  const double n = static_cast<double>(counts[arm]);
  return std::max(0.0, sum_squares[arm] / n - means[arm] * means[arm]);
}

std::size_t thompson_action(const BetaPosterior& post, Rng& rng) {
  post.validate();
  std::vector<double> draw(post.size());
  for (std::size_t i = 0; i < draw.size(); ++i) {
    draw[i] = beta_draw(rng, post.alpha_params[i], post.beta_params[i]);
  }
  return argmax_index(draw);
}

std::size_t thompson_action(const GaussianPosterior& post, Rng& rng) {
  post.validate();
  std::vector<double> draw(post.size());
  for (std::size_t i = 0; i < draw.size(); ++i) {
    draw[i] = post.means[i] + post.stddevs[i] * standard_normal(rng);
  }
  return argmax_index(draw);
}

std::size_t thompson_action(const LinearGaussianPosterior& post, const ActionMatrix& actions,
                            Rng& rng) {
  Eigen::VectorXd theta(static_cast<Eigen::Index>(post.dim()));
  gaussian_theta_sampler(post)(rng, theta);
  const Eigen::VectorXd rewards = actions.rows * theta;
  return argmax_index(std::span<const double>(rewards.data(), actions.size()));
}

std::size_t thompson_action(const FiniteModel& model, Rng& rng) {
  return model.optimal_action(sample_hypothesis(model, rng));
}

std::size_t ucb1_action(const FrequentistArmStats& stats, std::size_t t) {
  if (t < 1) throw InputError("period must be >= 1");
  const double log_t = std::log(static_cast<double>(t));
  return index_policy(stats, [&](std::size_t, double n) { return std::sqrt(2.0 * log_t / n); });
}

std::size_t ucb_tuned_action(const FrequentistArmStats& stats, std::size_t t) {
  if (t < 1) throw InputError("period must be >= 1");
  const double log_t = std::log(static_cast<double>(t));
  return index_policy(stats, [&](std::size_t i, double n) {
    const double v = stats.variance(i) + std::sqrt(2.0 * log_t / n);
    return std::sqrt(std::min(0.25, v) * log_t / n);
  });
}

std::size_t moss_action(const FrequentistArmStats& stats, std::size_t horizon) {
  if (horizon < 1) throw InputError("horizon must be >= 1");
  const double k = static_cast<double>(stats.arms());
  const double big_t = static_cast<double>(horizon);
  return index_policy(stats, [&](std::size_t, double n) {
    return std::sqrt(std::max(std::log(big_t / (k * n)), 0.0) / n);
  });
}

double bayes_ucb_level(std::size_t t) {
  if (t < 1) throw InputError("period must be >= 1");
  return std::clamp(1.0 - 1.0 / static_cast<double>(t), 1e-9, 1.0 - 1e-9);
}

std::vector<double> bayes_ucb_indices(const BetaPosterior& post, std::size_t t) {
  post.validate();
  const double level = bayes_ucb_level(t);
  std::vector<double> q(post.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    try {
      q[i] = boost::math::ibeta_inv(post.alpha_params[i], post.beta_params[i], level);
    } catch (const std::exception& e) {
      throw NumericalError(std::string("Beta quantile failed: ") + e.what());
    }
  }
  return q;
}

std::vector<double> bayes_ucb_indices(const GaussianPosterior& post, std::size_t t) {
  post.validate();
  const double z = normal_quantile(bayes_ucb_level(t));
  std::vector<double> q(post.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = post.means[i] + post.stddevs[i] * z;
  return q;
}

std::vector<double> bayes_ucb_indices(const LinearGaussianPosterior& post,
                                      const ActionMatrix& actions, std::size_t t) {
  const double z = normal_quantile(bayes_ucb_level(t));
  const std::vector<double> mu = posterior_means(post, actions);
  const std::vector<double> sd = reward_stddevs(post, actions);
  std::vector<double> q(mu.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = mu[i] + sd[i] * z;
  return q;
}

std::size_t bayes_ucb_action(const BetaPosterior& post, std::size_t t) {
  return argmax_index(bayes_ucb_indices(post, t));
}

std::size_t bayes_ucb_action(const GaussianPosterior& post, std::size_t t) {
  return argmax_index(bayes_ucb_indices(post, t));
}

std::size_t bayes_ucb_action(const LinearGaussianPosterior& post, const ActionMatrix& actions,
                             std::size_t t) {
  return argmax_index(bayes_ucb_indices(post, actions, t));
}

double gpucb_beta(std::size_t arms, std::size_t t, const GpucbVariant& variant) {
  if (t < 1) throw InputError("period must be >= 1");
  const double tt = static_cast<double>(t);
  if (variant.tuned) return variant.c * std::log(tt);
  return 2.0 * std::log(static_cast<double>(arms) * tt * tt * std::numbers::pi * std::numbers::pi /
                        6.0);
}

std::size_t gpucb_action(const GaussianPosterior& post, std::size_t t,
                         const GpucbVariant& variant) {
  post.validate();
  const double root = std::sqrt(std::max(0.0, gpucb_beta(post.size(), t, variant)));
  std::vector<double> index(post.size());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = post.means[i] + root * post.stddevs[i];
  return argmax_index(index);
}

std::size_t gpucb_action(const LinearGaussianPosterior& post, const ActionMatrix& actions,
                         std::size_t t, const GpucbVariant& variant) {
  const double root = std::sqrt(std::max(0.0, gpucb_beta(actions.size(), t, variant)));
  const std::vector<double> mu = posterior_means(post, actions);
  const std::vector<double> sd = reward_stddevs(post, actions);
  std::vector<double> index(mu.size());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = mu[i] + root * sd[i];
  return argmax_index(index);
}

double kg_f(double z) { return z * normal_cdf(z) + normal_pdf(z); }

double expected_max_improvement(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw InputError("line coefficient sizes differ");
  std::vector<std::size_t> order(a.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return b[i] != b[j] ? b[i] < b[j] : a[i] < a[j];
  });
  // Among equal slopes only the highest intercept can be on the envelope.
  std::vector<std::size_t> lines;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k + 1 < order.size() && b[order[k + 1]] == b[order[k]]) continue;
    lines.push_back(order[k]);
  }
  std::vector<std::size_t> hull;
  std::vector<double> breaks;  // breaks[k]: where hull[k] takes over from hull[k-1]
  for (std::size_t j : lines) {
    while (!hull.empty()) {
      const std::size_t i = hull.back();
      const double c = (a[i] - a[j]) / (b[j] - b[i]);
      if (c <= breaks.back()) {
        hull.pop_back();
        breaks.pop_back();
      } else {
        break;
      }
    }
    if (hull.empty()) {
      breaks.push_back(-kInf);
    } else {
      const std::size_t i = hull.back();
      breaks.push_back((a[i] - a[j]) / (b[j] - b[i]));
    }
    hull.push_back(j);
  }
  double v = 0.0;
  for (std::size_t k = 1; k < hull.size(); ++k) {
    v += (b[hull[k]] - b[hull[k - 1]]) * kg_f(-std::abs(breaks[k]));
  }
  return v;
}

std::vector<double> bernoulli_kg_factors(const std::vector<double>& means,
                                         const std::vector<double>& up,
                                         const std::vector<double>& down) {
  const std::size_t k = means.size();
  if (up.size() != k || down.size() != k || k == 0) throw InputError("KG input sizes differ");
  std::vector<double> out(k, 0.0);
  const double best = *std::max_element(means.begin(), means.end());
  for (std::size_t i = 0; i < k; ++i) {
    double other = -kInf;
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) other = std::max(other, means[j]);
    }
    const double next = means[i] * std::max(up[i], other) +
                        (1.0 - means[i]) * std::max(down[i], other);
    out[i] = std::max(0.0, next - best);
  }
  return out;
}

std::vector<double> kg_factors(const BetaPosterior& post) {
  post.validate();
  const std::size_t k = post.size();
  std::vector<double> m(k), up(k), down(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double a = post.alpha_params[i];
    const double n = a + post.beta_params[i];
    m[i] = a / n;
    up[i] = (a + 1.0) / (n + 1.0);
    down[i] = a / (n + 1.0);
  }
  return bernoulli_kg_factors(m, up, down);
}

std::vector<double> kg_factors(const GaussianPosterior& post) {
  post.validate();
  const std::size_t k = post.size();
  std::vector<double> out(k, 0.0);
  const double noise2 = post.noise_stddev * post.noise_stddev;
  for (std::size_t i = 0; i < k; ++i) {
    const double var = post.stddevs[i] * post.stddevs[i];
    const double s = var / std::sqrt(var + noise2);
    if (k == 1 || s == 0.0) continue;
    double other = -kInf;
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) other = std::max(other, post.means[j]);
    }
    out[i] = s * kg_f(-std::abs(post.means[i] - other) / s);
  }
  return out;
}

std::vector<double> kg_factors(const LinearGaussianPosterior& post, const ActionMatrix& actions) {
  post.validate();
  actions.validate();
  const std::vector<double> mu = posterior_means(post, actions);
  const Eigen::MatrixXd cross = actions.rows * post.covariance * actions.rows.transpose();
  std::vector<double> out(actions.size(), 0.0);
  std::vector<double> slope(actions.size());
  for (std::size_t a = 0; a < actions.size(); ++a) {
    const auto ai = static_cast<Eigen::Index>(a);
    const double scale = std::sqrt(std::max(0.0, cross(ai, ai)) + post.noise_variance);
    for (std::size_t i = 0; i < actions.size(); ++i) {
      slope[i] = cross(static_cast<Eigen::Index>(i), ai) / scale;
    }
    out[a] = expected_max_improvement(mu, slope);
  }
  return out;
}

std::size_t kg_choice(const std::vector<double>& means, const std::vector<double>& factors,
                      std::size_t t, std::size_t horizon) {
  if (means.size() != factors.size()) throw InputError("KG input sizes differ");
  if (t < 1 || t > horizon) throw InputError("KG needs 1 <= t <= T");
  const double remaining = static_cast<double>(horizon - t);
  std::vector<double> index(means.size());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = means[i] + remaining * factors[i];
  return argmax_index(index);
}

std::vector<double> posterior_means(const BetaPosterior& post) {
  std::vector<double> m(post.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    m[i] = post.alpha_params[i] / (post.alpha_params[i] + post.beta_params[i]);
  }
  return m;
}

std::vector<double> posterior_means(const LinearGaussianPosterior& post,
                                    const ActionMatrix& actions) {
  const Eigen::VectorXd mu = actions.rows * post.mean;
  return std::vector<double>(mu.data(), mu.data() + mu.size());
}

}  // namespace ids
