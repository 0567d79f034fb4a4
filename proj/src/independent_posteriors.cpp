#include "ids/independent_posteriors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ids/errors.hpp"

namespace ids {
namespace {

constexpr double kCdfFloor = 1e-12;
constexpr double kNegligibleAlpha = 1e-12;
// Phi(z) underflows a double just below z = -37.5.
constexpr double kMillsAsymptoticZ = -38.0;

double log_beta_fn(double a, double b) {
  return boost::math::lgamma(a) + boost::math::lgamma(b) - boost::math::lgamma(a + b);
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  std::vector<double> x(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t g = 0; g < n; ++g) x[g] = lo + h * static_cast<double>(g);
  x.back() = hi;
  return x;
}

}  // namespace

BetaPosterior BetaPosterior::uniform_prior(std::size_t arms) {
  return BetaPosterior{std::vector<double>(arms, 1.0), std::vector<double>(arms, 1.0)};
}

void BetaPosterior::validate() const {
  if (alpha_params.empty() || alpha_params.size() != beta_params.size()) {
    throw InputError("Beta posterior needs matching, non-empty parameter vectors");
  }
  for (std::size_t i = 0; i < alpha_params.size(); ++i) {
    if (!(alpha_params[i] > 0.0) || !(beta_params[i] > 0.0)) {
      throw InputError("Beta parameters must be positive (arm " + std::to_string(i) + ")");
    }
  }
}

GaussianPosterior GaussianPosterior::standard_prior(std::size_t arms) {
  return GaussianPosterior{std::vector<double>(arms, 0.0), std::vector<double>(arms, 1.0),
                           1.0};
}

void GaussianPosterior::validate() const {
  if (means.empty() || means.size() != stddevs.size()) {
    throw InputError("Gaussian posterior needs matching, non-empty vectors");
  }
  for (std::size_t i = 0; i < stddevs.size(); ++i) {
    if (!(stddevs[i] > 0.0)) {
      throw InputError("Gaussian posterior stddev must be positive (arm " +
                       std::to_string(i) + ")");
    }
  }
  if (!(noise_stddev > 0.0)) throw InputError("noise stddev must be positive");
}

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double truncated_normal_mean(double mu, double sigma, double x) {
  if (!(sigma > 0.0)) throw InputError("truncated_normal_mean needs sigma > 0");
  const double z = (x - mu) / sigma;
  if (z < kMillsAsymptoticZ) {
    // phi(z)/Phi(z) = -z - 1/z + 2/z^3 - 10/z^5 + ...
    const double z2 = z * z;
    const double mills = -z - 1.0 / z + 2.0 / (z2 * z) - 10.0 / (z2 * z2 * z);
    return mu - sigma * mills;
  }
  return mu - sigma * normal_pdf(z) / normal_cdf(z);
}

double bernoulli_kl(double p, double q) {
  constexpr double lo = 1e-9;
  constexpr double hi = 1.0 - 1e-9;
  p = std::clamp(p, lo, hi);
  q = std::clamp(q, lo, hi);
  return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

BetaPosterior beta_update(const BetaPosterior& post, std::size_t arm, int reward) {
  if (arm >= post.size()) throw InputError("arm index out of range");
  if (reward != 0 && reward != 1) throw InputError("Bernoulli reward must be 0 or 1");
  BetaPosterior out = post;
  out.alpha_params[arm] += reward;
  out.beta_params[arm] += 1 - reward;
  return out;
}

GaussianPosterior gaussian_update(const GaussianPosterior& post, std::size_t arm,
                                  double reward) {
  if (arm >= post.size()) throw InputError("arm index out of range");
  GaussianPosterior out = post;
  const double prior_prec = 1.0 / (post.stddevs[arm] * post.stddevs[arm]);
  const double noise_prec = 1.0 / (post.noise_stddev * post.noise_stddev);
  const double prec = prior_prec + noise_prec;
  out.means[arm] = (post.means[arm] * prior_prec + reward * noise_prec) / prec;
  out.stddevs[arm] = 1.0 / std::sqrt(prec);
  return out;
}

namespace detail {

std::vector<double> quadrature_weights(const std::vector<double>& x) {
  const std::size_t n = x.size();
  const double h = x[1] - x[0];
  std::vector<double> w(n, 0.0);
  // Composite Simpson; an even point count ends with one 3/8-rule panel.
  const std::size_t simpson_end = n % 2 == 1 ? n : n - 3;
  for (std::size_t g = 0; g + 2 < simpson_end; g += 2) {
    w[g] += h / 3.0;
    w[g + 1] += 4.0 * h / 3.0;
    w[g + 2] += h / 3.0;
  }
  if (simpson_end != n) {
    w[n - 4] += 3.0 * h / 8.0;
    w[n - 3] += 9.0 * h / 8.0;
    w[n - 2] += 9.0 * h / 8.0;
    w[n - 1] += 3.0 * h / 8.0;
  }
  return w;
}

IdsStats stats_from_grid(const std::vector<double>& x,
                         const std::vector<double>& weights,
                         const Eigen::MatrixXd& pdf, const Eigen::MatrixXd& cdf,
                         const Eigen::MatrixXd& cond_mean,
                         const std::vector<double>& arm_means, GainKind kind) {
  const auto k = static_cast<Eigen::Index>(arm_means.size());
  const auto n = static_cast<Eigen::Index>(x.size());
  IdsStats out;
  if (k == 1) {
    out.alpha = ActionDistribution::point_mass(1, 0);
    out.delta = {0.0};
    out.gain = {0.0};
    out.cond_means = Eigen::MatrixXd::Constant(1, 1, arm_means[0]);
    out.rho_star = arm_means[0];
    return out;
  }

  // weighted[i, g] = w_g f_i(x_g) prod_{m != i} F_m(x_g), built from prefix and
  // suffix products so no division by F_i is needed.
  Eigen::MatrixXd weighted(k, n);
  Eigen::RowVectorXd prefix = Eigen::RowVectorXd::Ones(n);
  for (Eigen::Index i = 0; i < k; ++i) {
    weighted.row(i) = prefix.cwiseProduct(pdf.row(i));
    prefix = prefix.cwiseProduct(cdf.row(i));
  }
  Eigen::RowVectorXd suffix = Eigen::RowVectorXd::Ones(n);
  for (Eigen::Index i = k - 1; i >= 0; --i) {
    weighted.row(i) = weighted.row(i).cwiseProduct(suffix);
    suffix = suffix.cwiseProduct(cdf.row(i));
  }
  const Eigen::Map<const Eigen::RowVectorXd> w(weights.data(), n);
  const Eigen::Map<const Eigen::VectorXd> xs(x.data(), n);
  for (Eigen::Index i = 0; i < k; ++i) {
    weighted.row(i) = weighted.row(i).cwiseProduct(w);
  }
  // An unbounded density at an endpoint contributes nothing on a closed grid.
  weighted = weighted.unaryExpr([](double v) { return std::isfinite(v) ? v : 0.0; });

  const Eigen::VectorXd raw_alpha = weighted.rowwise().sum();
  Eigen::MatrixXd m = weighted * cond_mean.transpose();
  const Eigen::VectorXd diag = weighted * xs;
  const double total = raw_alpha.sum();
  if (!(total > 0.0)) throw NumericalError("optimal-action probabilities integrate to 0");

  std::vector<double> alpha(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    alpha[static_cast<std::size_t>(i)] = std::max(0.0, raw_alpha(i)) / total;
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    if (alpha[static_cast<std::size_t>(i)] < kNegligibleAlpha) {
      for (Eigen::Index j = 0; j < k; ++j) m(i, j) = arm_means[static_cast<std::size_t>(j)];
      continue;
    }
    m(i, i) = diag(i);
    m.row(i) /= raw_alpha(i);
  }
  // Renormalize so the sum is exactly one before handing it to the solver.
  double s = 0.0;
  for (double a : alpha) s += a;
  for (double& a : alpha) a /= s;
  double residual = 1.0;
  for (std::size_t i = 0; i + 1 < alpha.size(); ++i) residual -= alpha[i];
  alpha.back() = std::max(0.0, residual);

  out.rho_star = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) out.rho_star += alpha[static_cast<std::size_t>(i)] * m(i, i);

  out.delta.resize(static_cast<std::size_t>(k));
  out.gain.assign(static_cast<std::size_t>(k), 0.0);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    out.delta[iu] = std::max(0.0, out.rho_star - arm_means[iu]);
    double g = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      const double aj = alpha[static_cast<std::size_t>(j)];
      if (aj == 0.0) continue;
      if (kind == GainKind::mutual_information) {
        g += aj * bernoulli_kl(m(j, i), arm_means[iu]);
      } else {
        const double shift = m(j, i) - arm_means[iu];
        g += aj * shift * shift;
      }
    }
    out.gain[iu] = std::max(0.0, g);
  }
  out.alpha = ActionDistribution(std::move(alpha));
  out.cond_means = std::move(m);
  return out;
}

}  // namespace detail

BetaGridCache::BetaGridCache(const BetaPosterior& post, std::size_t grid_size)
    : post_(post) {
  post_.validate();
  if (grid_size < 100) throw InputError("grid_size must be >= 100");
  x_ = uniform_grid(0.0, 1.0, grid_size);
  weights_ = detail::quadrature_weights(x_);
  log_x_.resize(grid_size);
  log_1mx_.resize(grid_size);
  for (std::size_t g = 0; g < grid_size; ++g) {
    log_x_[g] = std::log(x_[g]);
    log_1mx_[g] = std::log1p(-x_[g]);
  }
  const auto k = static_cast<Eigen::Index>(post_.size());
  const auto n = static_cast<Eigen::Index>(grid_size);
  pdf_.resize(k, n);
  cdf_.resize(k, n);
  cond_mean_.resize(k, n);
  steps_since_refresh_.assign(post_.size(), 0);
  for (std::size_t i = 0; i < post_.size(); ++i) recompute_arm(i);
}

void BetaGridCache::recompute_pdf(std::size_t arm) {
  const double a = post_.alpha_params[arm];
  const double b = post_.beta_params[arm];
  const double log_norm = log_beta_fn(a, b);
  const auto row = static_cast<Eigen::Index>(arm);
  const std::size_t n = x_.size();
  for (std::size_t g = 1; g + 1 < n; ++g) {
    pdf_(row, static_cast<Eigen::Index>(g)) =
        std::exp((a - 1.0) * log_x_[g] + (b - 1.0) * log_1mx_[g] - log_norm);
  }
  // Endpoints: finite limits where they exist, +inf otherwise.
  const auto edge = [log_norm](double p) {
    if (p > 1.0) return 0.0;
    if (p == 1.0) return std::exp(-log_norm);
    return std::numeric_limits<double>::infinity();
  };
  pdf_(row, 0) = edge(a);
  pdf_(row, static_cast<Eigen::Index>(n - 1)) = edge(b);
}

void BetaGridCache::recompute_conditional_mean(std::size_t arm) {
  const double a = post_.alpha_params[arm];
  const double mean = post_.mean(arm);
  const auto row = static_cast<Eigen::Index>(arm);
  const std::size_t n = x_.size();
  for (std::size_t g = 0; g < n; ++g) {
    const auto col = static_cast<Eigen::Index>(g);
    const double f = cdf_(row, col);
    double c = x_[g];
    if (f >= kCdfFloor) {
      // E[X | X <= x] = mean * I_x(a+1, b) / I_x(a, b).
      double shifted = f;
      if (g > 0 && g + 1 < n) shifted -= x_[g] * (1.0 - x_[g]) * pdf_(row, col) / a;
      c = std::clamp(mean * shifted / f, 0.0, x_[g]);
    }
    cond_mean_(row, col) = c;
  }
}

void BetaGridCache::recompute_arm(std::size_t arm) {
  recompute_pdf(arm);
  const double a = post_.alpha_params[arm];
  const double b = post_.beta_params[arm];
  const auto row = static_cast<Eigen::Index>(arm);
  for (std::size_t g = 0; g < x_.size(); ++g) {
    cdf_(row, static_cast<Eigen::Index>(g)) = boost::math::ibeta(a, b, x_[g]);
  }
  recompute_conditional_mean(arm);
  steps_since_refresh_[arm] = 0;
}

void BetaGridCache::set_arm(std::size_t arm, double alpha_param, double beta_param) {
  if (arm >= post_.size()) throw InputError("arm index out of range");
  if (!(alpha_param > 0.0) || !(beta_param > 0.0)) {
    throw InputError("Beta parameters must be positive");
  }
  const double a = post_.alpha_params[arm];
  const double b = post_.beta_params[arm];
  const bool step_a = alpha_param == a + 1.0 && beta_param == b;
  const bool step_b = beta_param == b + 1.0 && alpha_param == a;
  post_.alpha_params[arm] = alpha_param;
  post_.beta_params[arm] = beta_param;
  if ((!step_a && !step_b) || ++steps_since_refresh_[arm] >= kRefreshInterval) {
    recompute_arm(arm);
    return;
  }
  const auto row = static_cast<Eigen::Index>(arm);
  const std::size_t n = x_.size();
  for (std::size_t g = 1; g + 1 < n; ++g) {
    const auto col = static_cast<Eigen::Index>(g);
    const double term = x_[g] * (1.0 - x_[g]) * pdf_(row, col);
    const double updated = step_a ? cdf_(row, col) - term / a : cdf_(row, col) + term / b;
    cdf_(row, col) = std::clamp(updated, 0.0, 1.0);
  }
  recompute_pdf(arm);
  recompute_conditional_mean(arm);
}

IdsStats BetaGridCache::stats(GainKind kind) const {
  std::vector<double> means(post_.size());
  for (std::size_t i = 0; i < post_.size(); ++i) means[i] = post_.mean(i);
  return detail::stats_from_grid(x_, weights_, pdf_, cdf_, cond_mean_, means, kind);
}

IdsStats beta_ids_stats(const BetaPosterior& post, std::size_t grid_size, GainKind kind) {
  return BetaGridCache(post, grid_size).stats(kind);
}

IdsStats gaussian_ids_stats(const GaussianPosterior& post, std::size_t grid_size) {
  post.validate();
  if (grid_size < 100) throw InputError("grid_size must be >= 100");
  const auto [lo_it, hi_it] = std::minmax_element(post.means.begin(), post.means.end());
  const double max_sd = *std::max_element(post.stddevs.begin(), post.stddevs.end());
  const std::vector<double> x =
      uniform_grid(*lo_it - 6.0 * max_sd, *hi_it + 6.0 * max_sd, grid_size);
  const std::vector<double> w = detail::quadrature_weights(x);
  const auto k = static_cast<Eigen::Index>(post.size());
  const auto n = static_cast<Eigen::Index>(grid_size);
  Eigen::MatrixXd pdf(k, n), cdf(k, n), cond(k, n);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double mu = post.means[static_cast<std::size_t>(i)];
    const double sd = post.stddevs[static_cast<std::size_t>(i)];
    for (Eigen::Index g = 0; g < n; ++g) {
      const double xv = x[static_cast<std::size_t>(g)];
      const double z = (xv - mu) / sd;
      const double phi = normal_pdf(z);
      const double big_phi = normal_cdf(z);
      pdf(i, g) = phi / sd;
      cdf(i, g) = big_phi;
      cond(i, g) = z < kMillsAsymptoticZ ? truncated_normal_mean(mu, sd, xv)
                                         : mu - sd * phi / big_phi;
    }
  }
  return detail::stats_from_grid(x, w, pdf, cdf, cond, post.means, GainKind::mean_based);
}

}  // namespace ids
