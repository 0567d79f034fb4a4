#include "ids/policies.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ids/baselines.hpp"
#include "ids/errors.hpp"
#include "ids/exact_info.hpp"
#include "ids/independent_posteriors.hpp"
#include "ids/linear.hpp"

namespace ids {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr Policy kAllPolicies[] = {Policy::ids,       Policy::ids_me, Policy::ts,
                                   Policy::ucb1,      Policy::ucb_tuned, Policy::moss,
                                   Policy::bayes_ucb, Policy::gpucb,  Policy::gpucb_tuned,
                                   Policy::kg,        Policy::greedy, Policy::pure_explore};

// Shared bookkeeping for the IDS variants.
struct RatioRecord {
  double ratio = kNaN;
  double entropy0 = kNaN;

  std::size_t play(const RatioInputs& in, const ActionDistribution& alpha, std::size_t t,
                   bool pure_explore, Rng& rng) {
    if (t == 1) entropy0 = entropy(alpha);
    if (pure_explore) {
      ratio = kNaN;
      return pure_exploration_action(in);
    }
    const IdsSolution sol = ids_distribution(in);
    ratio = sol.ratio_value;
    return sol.distribution.sample(rng);
  }
};

class BernoulliAgent : public Agent {
 public:
  BernoulliAgent(const PolicySpec& p, const EnvironmentSpec& env, const AgentOptions& o)
      : policy_(p),
        options_(o),
        post_{std::vector<double>(env.arms, env.beta_a), std::vector<double>(env.arms, env.beta_b)},
        freq_(FrequentistArmStats::empty(env.arms)) {
    if (uses_grid()) cache_ = std::make_unique<BetaGridCache>(post_, o.grid_size);
  }

  std::size_t act(std::size_t t, Rng& rng) override {
    switch (policy_.kind) {
      case Policy::ids:
      case Policy::ids_me:
      case Policy::pure_explore: {
        const IdsStats s = cache_->stats(policy_.kind == Policy::ids_me
                                             ? GainKind::mean_based
                                             : GainKind::mutual_information);
        return record_.play(s.ratio_inputs(), s.alpha, t, policy_.kind == Policy::pure_explore,
                            rng);
      }
      case Policy::ts: return thompson_action(post_, rng);
      case Policy::ucb1: return ucb1_action(freq_, t);
      case Policy::ucb_tuned: return ucb_tuned_action(freq_, t);
      case Policy::moss: return moss_action(freq_, options_.horizon);
      case Policy::bayes_ucb: return bayes_ucb_action(post_, t);
      case Policy::kg: return kg_choice(posterior_means(post_), kg_factors(post_), t, options_.horizon);
      case Policy::greedy: return argmax_index(posterior_means(post_));
      default: break;
    }
    throw ConfigError("policy not available for bernoulli");
  }

  void observe(std::size_t a, const Observation& obs) override {
    const double r = obs.reward;
    post_.alpha_params[a] += r;
    post_.beta_params[a] += 1.0 - r;
    freq_.record(a, r);
    if (cache_) cache_->set_arm(a, post_.alpha_params[a], post_.beta_params[a]);
  }

  double last_ratio() const override { return record_.ratio; }
  double initial_entropy() const override { return record_.entropy0; }

 private:
  bool uses_grid() const {
    return policy_.kind == Policy::ids || policy_.kind == Policy::ids_me ||
           policy_.kind == Policy::pure_explore;
  }

  PolicySpec policy_;
  AgentOptions options_;
  BetaPosterior post_;
  FrequentistArmStats freq_;
  std::unique_ptr<BetaGridCache> cache_;
  RatioRecord record_;
};

class GaussianAgent : public Agent {
 public:
  GaussianAgent(const PolicySpec& p, const EnvironmentSpec& env, const AgentOptions& o)
      : policy_(p),
        options_(o),
        post_{std::vector<double>(env.arms, env.prior_mean),
              std::vector<double>(env.arms, env.prior_sd), env.noise_sd},
        freq_(FrequentistArmStats::empty(env.arms)) {}

  std::size_t act(std::size_t t, Rng& rng) override {
    switch (policy_.kind) {
      case Policy::ids_me:
      case Policy::pure_explore: {
        const IdsStats s = gaussian_ids_stats(post_, options_.grid_size);
        return record_.play(s.ratio_inputs(), s.alpha, t, policy_.kind == Policy::pure_explore,
                            rng);
      }
      case Policy::ts: return thompson_action(post_, rng);
      case Policy::ucb1: return ucb1_action(freq_, t);
      case Policy::ucb_tuned: return ucb_tuned_action(freq_, t);
      case Policy::moss: return moss_action(freq_, options_.horizon);
      case Policy::bayes_ucb: return bayes_ucb_action(post_, t);
      case Policy::gpucb: return gpucb_action(post_, t, {false, policy_.gpucb_c});
      case Policy::gpucb_tuned: return gpucb_action(post_, t, {true, policy_.gpucb_c});
      case Policy::kg: return kg_choice(post_.means, kg_factors(post_), t, options_.horizon);
      case Policy::greedy: return argmax_index(post_.means);
      default: break;
    }
    throw ConfigError("policy not available for gaussian");
  }

  void observe(std::size_t a, const Observation& obs) override {
    post_ = gaussian_update(post_, a, obs.reward);
    freq_.record(a, obs.reward);
  }

  double last_ratio() const override { return record_.ratio; }
  double initial_entropy() const override { return record_.entropy0; }

 private:
  PolicySpec policy_;
  AgentOptions options_;
  GaussianPosterior post_;
  FrequentistArmStats freq_;
  RatioRecord record_;
};

class LinearAgent : public Agent {
 public:
  LinearAgent(const PolicySpec& p, const EnvironmentSpec& env, const TrialRealization& trial,
              const AgentOptions& o)
      : policy_(p),
        options_(o),
        post_(LinearGaussianPosterior::isotropic_prior(env.dim, env.prior_variance,
                                                       env.noise_sd * env.noise_sd)),
        features_(trial.features) {}

  std::size_t act(std::size_t t, Rng& rng) override {
    switch (policy_.kind) {
      case Policy::ids:
      case Policy::ids_me:
      case Policy::pure_explore: {
        const MonteCarloConfig mc{options_.mc_samples, options_.mc_chunks, rng()};
        const LinearIdsStats s = linear_ids_stats(features_, gaussian_theta_sampler(post_), mc);
        return record_.play(s.ratio_inputs(), s.alpha, t, policy_.kind == Policy::pure_explore,
                            rng);
      }
      case Policy::ts: return thompson_action(post_, features_, rng);
      case Policy::bayes_ucb: return bayes_ucb_action(post_, features_, t);
      case Policy::gpucb: return gpucb_action(post_, features_, t, {false, policy_.gpucb_c});
      case Policy::gpucb_tuned: return gpucb_action(post_, features_, t, {true, policy_.gpucb_c});
      case Policy::kg:
        return kg_choice(posterior_means(post_, features_), kg_factors(post_, features_), t,
                         options_.horizon);
      case Policy::greedy: return argmax_index(posterior_means(post_, features_));
      default: break;
    }
    throw ConfigError("policy not available for linear_gaussian");
  }

  void observe(std::size_t a, const Observation& obs) override {
    post_ = linear_gaussian_update(
        post_, features_.rows.row(static_cast<Eigen::Index>(a)).transpose(), obs.reward);
  }

  double last_ratio() const override { return record_.ratio; }
  double initial_entropy() const override { return record_.entropy0; }

 private:
  PolicySpec policy_;
  AgentOptions options_;
  LinearGaussianPosterior post_;
  ActionMatrix features_;
  RatioRecord record_;
};

class FiniteAgent : public Agent {
 public:
  FiniteAgent(const PolicySpec& p, const EnvironmentSpec& env, const AgentOptions& o)
      : policy_(p), options_(o), post_(*env.model) {}

  std::size_t act(std::size_t t, Rng& rng) override {
    switch (policy_.kind) {
      case Policy::ids:
      case Policy::pure_explore: {
        const IdsStats s = exact_ids_stats(post_);
        return record_.play(s.ratio_inputs(), s.alpha, t, policy_.kind == Policy::pure_explore,
                            rng);
      }
      case Policy::ids_me: {
        const IdsStats s = exact_ids_stats_mean_based(post_);
        return record_.play(s.ratio_inputs(), s.alpha, t, false, rng);
      }
      case Policy::ts: return thompson_action(post_, rng);
      case Policy::kg:
        return kg_choice(posterior_mean_rewards(post_), exact_kg_factors(post_), t,
                         options_.horizon);
      case Policy::greedy: return argmax_index(posterior_mean_rewards(post_));
      default: break;
    }
    throw ConfigError("policy not available for finite models");
  }

  void observe(std::size_t a, const Observation& obs) override {
    post_ = bayesian_model_update(post_, a, obs.outcome);
  }

  double last_ratio() const override { return record_.ratio; }
  double initial_entropy() const override { return record_.entropy0; }

 private:
  PolicySpec policy_;
  AgentOptions options_;
  FiniteModel post_;
  RatioRecord record_;
};

}  // namespace

std::string policy_name(Policy p) {
  switch (p) {
    case Policy::ids: return "ids";
    case Policy::ids_me: return "ids_me";
    case Policy::ts: return "ts";
    case Policy::ucb1: return "ucb1";
    case Policy::ucb_tuned: return "ucb_tuned";
    case Policy::moss: return "moss";
    case Policy::bayes_ucb: return "bayes_ucb";
    case Policy::gpucb: return "gpucb";
    case Policy::gpucb_tuned: return "gpucb_tuned";
    case Policy::kg: return "kg";
    case Policy::greedy: return "greedy";
    case Policy::pure_explore: return "pure_explore";
  }
  return "unknown";
}

std::string PolicySpec::name() const { return policy_name(kind); }

Policy parse_policy(const std::string& name) {
  for (Policy p : kAllPolicies) {
    if (policy_name(p) == name) return p;
  }
  throw ConfigError("unknown policy '" + name + "'");
}

bool policy_supports(Policy p, Family f) {
  switch (f) {
    case Family::bernoulli:
      return p != Policy::gpucb && p != Policy::gpucb_tuned;
    case Family::gaussian:
      return p != Policy::ids;
    case Family::linear_gaussian:
      return p != Policy::ucb1 && p != Policy::ucb_tuned && p != Policy::moss;
    default:
      return p == Policy::ids || p == Policy::ids_me || p == Policy::ts || p == Policy::kg ||
             p == Policy::greedy || p == Policy::pure_explore;
  }
}

void check_compatible(Policy p, Family f) {
  if (policy_supports(p, f)) return;
  std::ostringstream msg;
  msg << "policy '" << policy_name(p) << "' is not available for environment '"
      << family_name(f) << "'";
  if (f == Family::gaussian && p == Policy::ids) {
    msg << " (use ids_me: Gaussian IDS is mean-based)";
  }
  throw ConfigError(msg.str());
}

double Agent::last_ratio() const { return kNaN; }
double Agent::initial_entropy() const { return kNaN; }

std::unique_ptr<Agent> make_agent(const PolicySpec& policy, const EnvironmentSpec& env,
                                  const TrialRealization& trial, const AgentOptions& options) {
  check_compatible(policy.kind, env.family);
  switch (env.family) {
    case Family::bernoulli: return std::make_unique<BernoulliAgent>(policy, env, options);
    case Family::gaussian: return std::make_unique<GaussianAgent>(policy, env, options);
    case Family::linear_gaussian:
      return std::make_unique<LinearAgent>(policy, env, trial, options);
    default:
      if (!env.model) throw ConfigError("finite environment has no model");
      return std::make_unique<FiniteAgent>(policy, env, options);
  }
}

}  // namespace ids
