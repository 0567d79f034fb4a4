#include "ids/ids_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ids/errors.hpp"

namespace ids {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kObjectiveTol = 1e-12;

double ratio_of(double regret, double gain) {
  if (gain > 0.0) return regret * regret / gain;
  return regret > 0.0 ? kInf : 0.0;
}

// Mixture of pair (j, i) that plays i with probability q.
struct PairCandidate {
  std::size_t j = 0;
  std::size_t i = 0;
  double q = 0.0;
  double value = kInf;
};

ActionDistribution pair_distribution(std::size_t size, const PairCandidate& c) {
  std::vector<double> probs(size, 0.0);
  probs[c.i] += c.q;
  probs[c.j] += 1.0 - c.q;
  return ActionDistribution(std::move(probs));
}

template <typename Objective, typename Stationary>
PairCandidate best_pair(const RatioInputs& in, Objective objective,
                        Stationary stationary_points) {
  const std::size_t k = in.delta.size();
  PairCandidate best;
  if (k == 1) {
    best.value = objective(in.delta[0], 0.0, in.gain[0], 0.0, 0.0);
    return best;
  }
  for (std::size_t j = 0; j + 1 < k; ++j) {
    for (std::size_t i = j + 1; i < k; ++i) {
      const double a = in.delta[j];
      const double b = in.delta[i] - in.delta[j];
      const double c = in.gain[j];
      const double e = in.gain[i] - in.gain[j];
      std::array<double, 4> qs{0.0, 1.0, -1.0, -1.0};
      stationary_points(a, b, c, e, qs[2], qs[3]);
      double pair_q = 0.0;
      double pair_value = kInf;
      for (double q : qs) {
        if (!(q >= 0.0 && q <= 1.0)) continue;
        const double v = objective(a, b, c, e, q);
        if (v < pair_value - kObjectiveTol) {
          pair_value = v;
          pair_q = q;
        }
      }
      if (pair_value < best.value - kObjectiveTol) {
        best = PairCandidate{j, i, pair_q, pair_value};
      }
    }
  }
  return best;
}

}  // namespace

ActionDistribution::ActionDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) throw InputError("action distribution must be non-empty");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw InputError("action probabilities must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InputError("action probabilities must sum to 1 (got " +
                     std::to_string(sum) + ")");
  }
}

ActionDistribution ActionDistribution::point_mass(std::size_t size,
                                                  std::size_t index) {
  if (index >= size) throw InputError("point mass index out of range");
  std::vector<double> p(size, 0.0);
  p[index] = 1.0;
  return ActionDistribution(std::move(p));
}

ActionDistribution ActionDistribution::uniform(std::size_t size) {
  if (size == 0) throw InputError("uniform distribution needs >= 1 action");
  return ActionDistribution(
      std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

std::size_t ActionDistribution::support_size() const {
  return static_cast<std::size_t>(
      std::count_if(probs_.begin(), probs_.end(), [](double p) { return p > 0.0; }));
}

std::size_t ActionDistribution::sample(Rng& rng) const {
  const double u = uniform01(rng);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (probs_[i] <= 0.0) continue;
    last_positive = i;
    acc += probs_[i];
    if (u < acc) return i;
  }
  return last_positive;
}

void RatioInputs::validate() const {
  if (delta.empty()) throw InputError("ratio inputs need at least one action");
  if (delta.size() != gain.size()) {
    throw InputError("delta and gain must have the same length");
  }
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (!(delta[i] >= 0.0) || !(gain[i] >= 0.0)) {
      throw InputError("delta and gain entries must be non-negative (index " +
                       std::to_string(i) + ")");
    }
  }
}

double information_ratio(const ActionDistribution& pi, const RatioInputs& in) {
  if (pi.size() != in.delta.size() || pi.size() != in.gain.size()) {
    throw InputError("distribution and inputs differ in length");
  }
  double regret = 0.0;
  double gain = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    regret += pi[i] * in.delta[i];
    gain += pi[i] * in.gain[i];
  }
  return ratio_of(regret, gain);
}

std::optional<IdsSolution> solve_ids(const RatioInputs& in) {
  in.validate();
  if (std::all_of(in.gain.begin(), in.gain.end(), [](double g) { return g == 0.0; })) {
    return std::nullopt;
  }
  const auto objective = [](double a, double b, double c, double e, double q) {
    return ratio_of(a + b * q, c + e * q);
  };
  // d/dq (a+bq)^2/(c+eq) = 0  <=>  (a+bq)(2bc - ea + beq) = 0.
  const auto stationary = [](double a, double b, double c, double e, double& r1,
                             double& r2) {
    if (b != 0.0) {
      r1 = -a / b;
      if (e != 0.0) r2 = (e * a - 2.0 * b * c) / (b * e);
    }
  };
  const PairCandidate best = best_pair(in, objective, stationary);
  IdsSolution out;
  out.distribution = pair_distribution(in.delta.size(), best);
  out.ratio_value = information_ratio(out.distribution, in);
  return out;
}

IdsSolution ids_distribution(const RatioInputs& in) {
  if (auto sol = solve_ids(in)) return *sol;
  return IdsSolution{
      ActionDistribution::point_mass(in.delta.size(), argmin_index(in.delta)), 0.0};
}

double tunable_objective(const ActionDistribution& pi, const RatioInputs& in,
                         double lambda) {
  double regret = 0.0;
  double gain = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    regret += pi[i] * in.delta[i];
    gain += pi[i] * in.gain[i];
  }
  return regret * regret - lambda * gain;
}

ActionDistribution solve_tunable_ids(const RatioInputs& in, double lambda) {
  in.validate();
  if (!(lambda >= 0.0)) throw InputError("lambda must be non-negative");
  const auto objective = [lambda](double a, double b, double c, double e, double q) {
    const double r = a + b * q;
    return r * r - lambda * (c + e * q);
  };
  const auto stationary = [lambda](double a, double b, double, double e,
                                   double& r1, double&) {
    if (b != 0.0) r1 = (lambda * e - 2.0 * a * b) / (2.0 * b * b);
  };
  return pair_distribution(in.delta.size(), best_pair(in, objective, stationary));
}

std::size_t pure_exploration_action(std::span<const double> gain) {
  if (gain.empty()) throw InputError("gain vector must be non-empty");
  return argmax_index(gain);
}

std::size_t pure_exploration_action(const RatioInputs& in) {
  in.validate();
  if (in.gain.empty()) throw InputError("gain vector must be non-empty");
  std::size_t best = 0;
  for (std::size_t i = 1; i < in.gain.size(); ++i) {
    if (in.gain[i] > in.gain[best] ||
        (in.gain[i] == in.gain[best] && in.delta[i] < in.delta[best])) {
      best = i;
    }
  }
  return best;
}

std::size_t argmax_index(std::span<const double> values) {
  if (values.empty()) throw InputError("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::size_t argmin_index(std::span<const double> values) {
  if (values.empty()) throw InputError("argmin of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

}  // namespace ids
