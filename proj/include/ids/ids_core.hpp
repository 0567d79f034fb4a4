#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ids/random.hpp"

namespace ids {

/// Probability vector over a finite action set.
///
/// Construction validates non-negativity and a unit sum (within 1e-12 after
/// optional renormalization by the producer).
class ActionDistribution {
 public:
  ActionDistribution() = default;
  explicit ActionDistribution(std::vector<double> probs);

  static ActionDistribution point_mass(std::size_t size, std::size_t index);
  static ActionDistribution uniform(std::size_t size);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }
  std::size_t support_size() const;

  // Inverse-CDF draw; ties in the cumulative sum resolve to the lowest index.
  std::size_t sample(Rng& rng) const;

 private:
  std::vector<double> probs_;
};

/// Per-action expected regret and information gain. Both must be
/// elementwise non-negative.
struct RatioInputs {
  std::vector<double> delta;
  std::vector<double> gain;

  void validate() const;
};

struct IdsSolution {
  ActionDistribution distribution;
  double ratio_value = 0.0;
};

/// (pi'delta)^2 / (pi'gain). Returns +inf when the gain is zero but regret is
/// positive, and 0 when both are zero.
double information_ratio(const ActionDistribution& pi, const RatioInputs& in);

/// Minimizes the information ratio over the simplex by searching all action
/// pairs; the optimum has at most two non-zero components.
///
/// Returns std::nullopt when every gain is zero: the optimal action is then
/// known and the caller should play argmin delta. Throws InputError on
/// negative or mismatched inputs.
std::optional<IdsSolution> solve_ids(const RatioInputs& in);

/// solve_ids with the "optimum known" case folded in as a point mass on the
/// lowest-index minimizer of delta (ratio 0).
IdsSolution ids_distribution(const RatioInputs& in);

/// Minimizes (pi'delta)^2 - lambda * pi'gain over the simplex. The regret
/// guarantee needs lambda >= the minimal information ratio; that is not
/// enforced here.
ActionDistribution solve_tunable_ids(const RatioInputs& in, double lambda);

/// Value of the tunable objective at pi.
double tunable_objective(const ActionDistribution& pi, const RatioInputs& in,
                         double lambda);

/// argmax of the gain vector, lowest index on ties.
std::size_t pure_exploration_action(std::span<const double> gain);
/// argmax of the gain; ties go to the smaller delta, then the lowest index.
std::size_t pure_exploration_action(const RatioInputs& in);

/// Shared argmax/argmin helpers: lowest index wins ties.
std::size_t argmax_index(std::span<const double> values);
std::size_t argmin_index(std::span<const double> values);

}  // namespace ids
