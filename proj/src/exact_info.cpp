#include "ids/exact_info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ids/errors.hpp"

namespace ids {
namespace {

constexpr double kTieTol = 1e-12;

// Outcome distribution of `action` conditioned on A* = i, unnormalized
// (row i sums to alpha_i).
std::vector<double> joint_optimal_outcome(const FiniteModel& m, std::size_t action) {
  const std::size_t k = m.actions();
  const std::size_t o = m.outcomes();
  std::vector<double> joint(k * o, 0.0);
  for (std::size_t h = 0; h < m.hypotheses(); ++h) {
    const double w = m.weight(h);
    if (w == 0.0) continue;
    const std::size_t i = m.optimal_action(h);
    for (std::size_t y = 0; y < o; ++y) joint[i * o + y] += w * m.prob(h, action, y);
  }
  return joint;
}

IdsStats stats_skeleton(const FiniteModel& m) {
  const std::size_t k = m.actions();
  IdsStats s;
  s.alpha = exact_alpha(m);
  const std::vector<double> means = posterior_mean_rewards(m);
  s.cond_means = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                       static_cast<Eigen::Index>(k));
  for (std::size_t h = 0; h < m.hypotheses(); ++h) {
    const double w = m.weight(h);
    if (w == 0.0) continue;
    const auto i = static_cast<Eigen::Index>(m.optimal_action(h));
    for (std::size_t a = 0; a < k; ++a) {
      s.cond_means(i, static_cast<Eigen::Index>(a)) += w * m.mean_reward(h, a);
    }
  }
  s.rho_star = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    if (s.alpha[i] > 0.0) {
      s.cond_means.row(row) /= s.alpha[i];
      s.rho_star += s.alpha[i] * s.cond_means(row, row);
    } else {
      for (std::size_t a = 0; a < k; ++a) {
        s.cond_means(row, static_cast<Eigen::Index>(a)) = means[a];
      }
    }
  }
  s.delta.resize(k);
  for (std::size_t a = 0; a < k; ++a) s.delta[a] = std::max(0.0, s.rho_star - means[a]);
  return s;
}

void check_action(const FiniteModel& m, std::size_t action) {
  if (action >= m.actions()) throw InputError("action index out of range");
}

}  // namespace

FiniteModel::FiniteModel(std::vector<double> weights, std::size_t actions,
                         std::size_t outcomes, std::vector<double> probs,
                         std::vector<double> rewards)
    : weights_(std::move(weights)),
      actions_(actions),
      outcomes_(outcomes),
      probs_(std::move(probs)),
      rewards_(std::move(rewards)) {
  const std::size_t hyps = weights_.size();
  if (hyps == 0 || actions_ == 0 || outcomes_ == 0) {
    throw InputError("finite model needs at least one hypothesis, action and outcome");
  }
  if (outcomes_ > 1024) throw InputError("finite model supports at most 1024 outcomes");
  if (probs_.size() != hyps * actions_ * outcomes_) {
    throw InputError("outcome table must have hypotheses x actions x outcomes entries");
  }
  if (rewards_.size() == outcomes_) {
    std::vector<double> shared = rewards_;
    rewards_.clear();
    for (std::size_t a = 0; a < actions_; ++a) {
      rewards_.insert(rewards_.end(), shared.begin(), shared.end());
    }
  }
  if (rewards_.size() != actions_ * outcomes_) {
    throw InputError("reward table must have outcomes or actions x outcomes entries");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw InputError("hypothesis weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("hypothesis weights must sum to 1");
  for (double& w : weights_) w /= total;

  means_.assign(hyps * actions_, 0.0);
  optimal_.assign(hyps, 0);
  for (std::size_t h = 0; h < hyps; ++h) {
    for (std::size_t a = 0; a < actions_; ++a) {
      double row = 0.0;
      double mean = 0.0;
      for (std::size_t o = 0; o < outcomes_; ++o) {
        const double p = prob(h, a, o);
        if (!(p >= 0.0)) throw InputError("outcome probabilities must be non-negative");
        row += p;
        mean += p * reward(a, o);
      }
      if (std::abs(row - 1.0) > 1e-12) {
        throw InputError("outcome distribution (hypothesis " + std::to_string(h) +
                         ", action " + std::to_string(a) + ") does not sum to 1");
      }
      means_[h * actions_ + a] = mean;
    }
    const auto first = means_.begin() + static_cast<std::ptrdiff_t>(h * actions_);
    const double best = *std::max_element(first, first + static_cast<std::ptrdiff_t>(actions_));
    for (std::size_t a = 0; a < actions_; ++a) {
      if (means_[h * actions_ + a] >= best - kTieTol) {
        optimal_[h] = a;
        break;
      }
    }
  }
}

double FiniteModel::reward_span() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t a = 0; a < actions_; ++a) {
    for (std::size_t o = 0; o < outcomes_; ++o) {
      bool possible = false;
      for (std::size_t h = 0; h < hypotheses() && !possible; ++h) {
        possible = prob(h, a, o) > 0.0;
      }
      if (!possible) continue;
      lo = std::min(lo, reward(a, o));
      hi = std::max(hi, reward(a, o));
    }
  }
  return hi - lo;
}

FiniteModel FiniteModel::with_weights(std::vector<double> weights) const {
  if (weights.size() != weights_.size()) throw InputError("weight vector has wrong length");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InputError("hypothesis weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("hypothesis weights must sum to 1");
  FiniteModel out = *this;
  out.weights_ = std::move(weights);
  for (double& w : out.weights_) w /= total;
  return out;
}

ActionDistribution exact_alpha(const FiniteModel& model) {
  std::vector<double> alpha(model.actions(), 0.0);
  for (std::size_t h = 0; h < model.hypotheses(); ++h) {
    alpha[model.optimal_action(h)] += model.weight(h);
  }
  double residual = 1.0;
  std::size_t last = 0;
  for (std::size_t a = 0; a < alpha.size(); ++a) {
    if (alpha[a] > 0.0) last = a;
  }
  for (std::size_t a = 0; a < alpha.size(); ++a) {
    if (a != last) residual -= alpha[a];
  }
  alpha[last] = std::max(0.0, residual);
  return ActionDistribution(std::move(alpha));
}

std::vector<double> predictive(const FiniteModel& model, std::size_t action) {
  check_action(model, action);
  std::vector<double> p(model.outcomes(), 0.0);
  for (std::size_t h = 0; h < model.hypotheses(); ++h) {
    const double w = model.weight(h);
    for (std::size_t o = 0; o < model.outcomes(); ++o) p[o] += w * model.prob(h, action, o);
  }
  return p;
}

double exact_info_gain(const FiniteModel& model, std::size_t action) {
  const std::vector<double> marginal = predictive(model, action);
  const std::vector<double> joint = joint_optimal_outcome(model, action);
  const std::size_t o_count = model.outcomes();
  double gain = 0.0;
  for (std::size_t i = 0; i < model.actions(); ++i) {
    for (std::size_t o = 0; o < o_count; ++o) {
      const double pj = joint[i * o_count + o];
      if (pj <= 0.0) continue;
      if (marginal[o] <= 0.0) {
        throw NumericalError("conditional outcome has positive mass under a null marginal");
      }
      double alpha_i = 0.0;
      for (std::size_t y = 0; y < o_count; ++y) alpha_i += joint[i * o_count + y];
      // alpha_i * p(o | i) * log(p(o | i) / p(o)) with p(o | i) = pj / alpha_i.
      gain += pj * std::log(pj / (alpha_i * marginal[o]));
    }
  }
  return std::max(0.0, gain);
}

double exact_info_gain_entropy(const FiniteModel& model, std::size_t action) {
  const std::vector<double> marginal = predictive(model, action);
  const std::vector<double> joint = joint_optimal_outcome(model, action);
  const std::size_t k = model.actions();
  const std::size_t o_count = model.outcomes();
  double expected_posterior_entropy = 0.0;
  std::vector<double> posterior(k);
  for (std::size_t o = 0; o < o_count; ++o) {
    if (marginal[o] <= 0.0) continue;
    for (std::size_t i = 0; i < k; ++i) posterior[i] = joint[i * o_count + o] / marginal[o];
    expected_posterior_entropy += marginal[o] * entropy(posterior);
  }
  return entropy(exact_alpha(model)) - expected_posterior_entropy;
}

IdsStats exact_ids_stats(const FiniteModel& model) {
  IdsStats s = stats_skeleton(model);
  s.gain.resize(model.actions());
  for (std::size_t a = 0; a < model.actions(); ++a) s.gain[a] = exact_info_gain(model, a);
  return s;
}

IdsStats exact_ids_stats_mean_based(const FiniteModel& model) {
  IdsStats s = stats_skeleton(model);
  const std::vector<double> means = posterior_mean_rewards(model);
  s.gain.assign(model.actions(), 0.0);
  for (std::size_t i = 0; i < model.actions(); ++i) {
    if (s.alpha[i] <= 0.0) continue;
    for (std::size_t a = 0; a < model.actions(); ++a) {
      const double shift =
          s.cond_means(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) - means[a];
      s.gain[a] += s.alpha[i] * shift * shift;
    }
  }
  return s;
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(0.0, h);
}

double entropy(const ActionDistribution& dist) { return entropy(dist.probs()); }

FiniteModel bayesian_model_update(const FiniteModel& model, std::size_t action,
                                  std::size_t outcome) {
  check_action(model, action);
  if (outcome >= model.outcomes()) throw InputError("outcome index out of range");
  std::vector<double> w(model.hypotheses());
  double total = 0.0;
  for (std::size_t h = 0; h < w.size(); ++h) {
    w[h] = model.weight(h) * model.prob(h, action, outcome);
    total += w[h];
  }
  if (!(total > 0.0)) throw InputError("observed outcome has zero predictive probability");
  for (double& v : w) v /= total;
  return model.with_weights(std::move(w));
}

std::size_t sample_hypothesis(const FiniteModel& model, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t h = 0; h < model.hypotheses(); ++h) {
    if (model.weight(h) <= 0.0) continue;
    last = h;
    acc += model.weight(h);
    if (u < acc) return h;
  }
  return last;
}

std::size_t sample_outcome(const FiniteModel& model, std::size_t h, std::size_t action,
                           Rng& rng) {
  check_action(model, action);
  const double u = uniform01(rng);
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t o = 0; o < model.outcomes(); ++o) {
    const double p = model.prob(h, action, o);
    if (p <= 0.0) continue;
    last = o;
    acc += p;
    if (u < acc) return o;
  }
  return last;
}

std::vector<double> posterior_mean_rewards(const FiniteModel& model) {
  std::vector<double> means(model.actions(), 0.0);
  for (std::size_t h = 0; h < model.hypotheses(); ++h) {
    const double w = model.weight(h);
    if (w == 0.0) continue;
    for (std::size_t a = 0; a < model.actions(); ++a) means[a] += w * model.mean_reward(h, a);
  }
  return means;
}

std::vector<double> exact_kg_factors(const FiniteModel& model) {
  const std::size_t k = model.actions();
  const std::vector<double> means = posterior_mean_rewards(model);
  const double current = *std::max_element(means.begin(), means.end());
  std::vector<double> factors(k, 0.0);
  std::vector<double> next(k);
  for (std::size_t a = 0; a < k; ++a) {
    double expected_best = 0.0;
    for (std::size_t o = 0; o < model.outcomes(); ++o) {
      std::fill(next.begin(), next.end(), 0.0);
      double mass = 0.0;
      for (std::size_t h = 0; h < model.hypotheses(); ++h) {
        const double w = model.weight(h) * model.prob(h, a, o);
        if (w == 0.0) continue;
        mass += w;
        for (std::size_t b = 0; b < k; ++b) next[b] += w * model.mean_reward(h, b);
      }
      // mass * max_b (next_b / mass) = max_b next_b.
      if (mass > 0.0) expected_best += *std::max_element(next.begin(), next.end());
    }
    factors[a] = std::max(0.0, expected_best - current);
  }
  return factors;
}

}  // namespace ids
