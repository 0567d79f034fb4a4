#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "ids/environments.hpp"
#include "ids/random.hpp"

namespace ids {

enum class Policy {
  ids, ids_me, ts, ucb1, ucb_tuned, moss, bayes_ucb, gpucb, gpucb_tuned, kg, greedy, pure_explore,
};

struct PolicySpec {
  Policy kind = Policy::ids;
  double gpucb_c = 0.9;  // gpucb_tuned only

  std::string name() const;
};

std::string policy_name(Policy p);
/// Throws ConfigError for an unknown identifier.
Policy parse_policy(const std::string& name);
bool policy_supports(Policy p, Family f);
/// Throws ConfigError when the pairing is not available.
void check_compatible(Policy p, Family f);

struct AgentOptions {
  std::size_t horizon = 1000;
  std::size_t grid_size = 1000;
  std::size_t mc_samples = 10000;
  std::size_t mc_chunks = 8;
};

/// Per-trial policy state. act() is called once per period t = 1..T, followed
/// by observe() with the chosen action's outcome.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::size_t act(std::size_t t, Rng& rng) = 0;
  virtual void observe(std::size_t action, const Observation& obs) = 0;

  /// Information ratio of the distribution used in the last act(); NaN for
  /// policies that do not compute one.
  virtual double last_ratio() const;
  /// Entropy of the optimal-action distribution at t = 1; NaN when not computed.
  virtual double initial_entropy() const;
};

/// Fresh agent starting from the environment's prior. Linear agents read the
/// action features from the realization.
std::unique_ptr<Agent> make_agent(const PolicySpec& policy, const EnvironmentSpec& env,
                                  const TrialRealization& trial, const AgentOptions& options);

}  // namespace ids
