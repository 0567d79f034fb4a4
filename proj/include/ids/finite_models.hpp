#pragma once

#include <cstddef>
#include <vector>

#include "ids/exact_info.hpp"
#include "ids/random.hpp"

namespace ids {

/// Actions a_0..a_K, hypotheses 1..K uniform. Under hypothesis i, a_i pays 1,
/// other a_j pay 0 and a_0 pays 1/(2i), all deterministically. Outcome 0 is
/// reward 0, outcome 1 is reward 1, outcome 1+i is reward 1/(2i).
FiniteModel revealing_action_model(std::size_t k);

/// One-hot theta uniform over d coordinates; one action per non-empty subset
/// S of coordinates, indexed by bitmask - 1, paying 1/|S| when the active
/// coordinate is in S. Outcome 1 is a hit. Requires d <= 16.
FiniteModel sparse_linear_model(std::size_t d);

/// The same problem under the uniform prior with a reduced action set: the d
/// singletons (actions 0..d-1) plus the prefix {0..s-1} for each support size
/// s = 2..d (action d+s-2). Under the uniform prior every action of the full
/// model shares (delta, gain) with one of these, so first-period information
/// ratios agree with the full model. Usable for d far beyond 16.
FiniteModel sparse_linear_reduced_model(std::size_t d);

/// Product prior for semi-bandit feedback: component i has Bernoulli mean
/// values[i][v] with prior weight weights[i][v]. Observations are shifted to
/// {-1/2, 1/2}. Actions are the m-subsets of {0..d-1} in lexicographic order;
/// outcome bit b is the observation of the b-th chosen component, and the
/// reward is the mean of the chosen observations.
FiniteModel semi_bandit_model(const std::vector<std::vector<double>>& values,
                              const std::vector<std::vector<double>>& weights,
                              std::size_t m);

/// m-subsets of {0..d-1} as bitmasks, lexicographic by element list.
std::vector<unsigned> semi_bandit_actions(std::size_t d, std::size_t m);

/// Two actions: a_1 pays Bernoulli(1/2) (known); a_2 pays Bernoulli(3/4) with
/// prior probability p and Bernoulli(1/4) otherwise.
FiniteModel randomization_example_model(double p);

/// theta_1 uniform on {.6, .4}, theta_2 uniform on {.7, .5}, independent,
/// Bernoulli rewards.
FiniteModel kg_independence_example_model();

/// Random model with k actions, h hypotheses and o outcomes: Dirichlet(1)
/// outcome rows and prior, rewards uniform on [0, 1] shared by all actions.
FiniteModel random_finite_model(Rng& rng, std::size_t k, std::size_t h, std::size_t o);

/// Full-information model: every action reveals the same observation, whose
/// distribution depends only on the hypothesis; rewards are uniform on
/// [0, 1] per (action, outcome).
FiniteModel random_full_info_model(Rng& rng, std::size_t k, std::size_t h, std::size_t o);

/// Linear model: theta_h uniform on [0, 1]^d, action features on the
/// probability simplex, Bernoulli(a'theta) reward observed.
FiniteModel random_linear_model(Rng& rng, std::size_t d, std::size_t k, std::size_t h);

/// Random product semi-bandit prior with two candidate means per component.
FiniteModel random_semi_bandit_model(Rng& rng, std::size_t d, std::size_t m);

std::vector<double> dirichlet_draw(Rng& rng, std::size_t n);

}  // namespace ids
