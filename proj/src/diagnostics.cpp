#include "ids/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "ids/errors.hpp"
#include "ids/exact_info.hpp"
#include "ids/finite_models.hpp"
#include "ids/independent_posteriors.hpp"
#include "ids/baselines.hpp"
#include "json.hpp"

namespace ids {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kRatioStream = 0x5241544FULL;
constexpr std::uint64_t kPureStream = 0x50555245ULL;

std::size_t uniform_size(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

std::string describe(const std::string& what, std::uint64_t seed, std::size_t index) {
  std::ostringstream s;
  s << what << " seed=" << seed << " index=" << index;
  return s.str();
}

// Runs one suite entry per index in parallel and concatenates in index order.
template <class F>
std::vector<BoundReport> gather(std::size_t n, F&& entry) {
  std::vector<std::vector<BoundReport>> parts(n);
  std::vector<std::string> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      parts[static_cast<std::size_t>(i)] = entry(static_cast<std::size_t>(i));
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  std::vector<BoundReport> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i].empty()) throw std::runtime_error(errors[i]);
    out.insert(out.end(), parts[i].begin(), parts[i].end());
  }
  return out;
}

// Unclamped: a divergence to a deterministic arm of different mean is infinite.
double exact_bernoulli_kl(double p, double q) {
  const auto term = [](double x, double y) {
    if (x == 0.0) return 0.0;
    if (y == 0.0) return kInf;
    return x * std::log(x / y);
  };
  return term(p, q) + term(1.0 - p, 1.0 - q);
}

void mean_se(const std::vector<double>& v, double& mean, double& se) {
  std::array<double, 6> q;
  summarize(v, mean, se, q);
}

}  // namespace

BoundReport make_report(std::string name, double lhs, double rhs, double tol, std::string context) {
  BoundReport r{std::move(name), lhs, rhs, tol, false, std::move(context)};
  r.satisfied = lhs <= rhs + tol;
  return r;
}

bool all_satisfied(const std::vector<BoundReport>& reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const BoundReport& r) { return r.satisfied; });
}

std::string reports_json(const std::string& suite, const std::vector<BoundReport>& reports) {
  nlohmann::ordered_json doc;
  doc["suite"] = suite;
  doc["satisfied"] = all_satisfied(reports);
  doc["reports"] = nlohmann::ordered_json::array();
  const auto num = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  };
  for (const BoundReport& r : reports) {
    doc["reports"].push_back({{"name", r.name},
                              {"lhs", num(r.lhs)},
                              {"rhs", num(r.rhs)},
                              {"tol", num(r.tol)},
                              {"satisfied", r.satisfied},
                              {"context", r.context}});
  }
  return doc.dump(2) + "\n";
}

BoundReport check_regret_bound(const PolicyResult& result, double lambda, double initial_entropy,
                               std::size_t horizon, const std::string& context) {
  if (!std::isfinite(result.mean_ratio)) {
    throw InputError("regret bound check needs recorded information ratios for " + result.policy);
  }
  const double rhs = std::sqrt(lambda * initial_entropy * static_cast<double>(horizon));
  return make_report("regret <= sqrt(lambda H T)", result.mean_regret, rhs, 3.0 * result.std_error,
                     context);
}

BoundReport check_average_ratio_bound(const PolicyResult& result, double initial_entropy,
                                      std::size_t horizon, const std::string& context) {
  if (!std::isfinite(result.mean_ratio)) {
    throw InputError("average ratio check needs recorded information ratios for " + result.policy);
  }
  const double rhs = std::sqrt(result.mean_ratio * initial_entropy * static_cast<double>(horizon));
  return make_report("regret <= sqrt(mean ratio H T)", result.mean_regret, rhs,
                     3.0 * result.std_error, context);
}

std::vector<BoundReport> regret_bound_suite(std::size_t trials, std::size_t horizon,
                                            std::uint64_t seed) {
  struct Case {
    Family family;
    Policy policy;
    std::size_t arms, dim;
    bool exact_gain;
  };
  const Case cases[] = {
      {Family::bernoulli, Policy::ids, 10, 0, true},
      {Family::gaussian, Policy::ids_me, 10, 0, false},
      {Family::linear_gaussian, Policy::ids, 30, 5, false},
      {Family::revealing_action, Policy::ids, 10, 0, true},
  };
  std::vector<BoundReport> out;
  for (const Case& c : cases) {
    ExperimentConfig config;
    config.environment.family = c.family;
    config.environment.arms = c.arms;
    if (c.dim) config.environment.dim = c.dim;
    config.policies = {PolicySpec{c.policy}};
    config.horizon = horizon;
    config.trials = trials;
    config.master_seed = seed;
    config.mc_samples = 2000;
    const RegretTable table = run_experiment(config);
    const PolicyResult& r = table.policies.front();
    double lambda = 0.0;
    switch (c.family) {
      case Family::linear_gaussian: lambda = static_cast<double>(c.dim) / 2.0; break;
      case Family::revealing_action: lambda = static_cast<double>(c.arms + 1) / 2.0; break;
      default: lambda = static_cast<double>(c.arms) / 2.0; break;
    }
    std::ostringstream ctx;
    ctx << family_name(c.family) << " " << r.policy << " T=" << horizon << " trials=" << trials
        << " seed=" << seed << " H=" << r.mean_initial_entropy << " lambda=" << lambda;
    out.push_back(check_regret_bound(r, lambda, r.mean_initial_entropy, horizon, ctx.str()));
    if (c.exact_gain) {
      out.push_back(check_average_ratio_bound(r, r.mean_initial_entropy, horizon,
                                              ctx.str() + " mean_ratio=" + std::to_string(r.mean_ratio)));
    }
  }
  return out;
}

std::string model_class_name(ModelClass c) {
  switch (c) {
    case ModelClass::finite: return "finite";
    case ModelClass::full_information: return "full_information";
    case ModelClass::linear: return "linear";
    case ModelClass::semi_bandit: return "semi_bandit";
  }
  return "unknown";
}

ClassModel random_model(ModelClass c, Rng& rng) {
  ClassModel out;
  std::ostringstream shape;
  switch (c) {
    case ModelClass::finite: {
      const std::size_t k = uniform_size(rng, 2, 5), h = uniform_size(rng, 2, 8),
                        o = uniform_size(rng, 2, 8);
      out.model = random_finite_model(rng, k, h, o);
      out.lambda = static_cast<double>(k) / 2.0;
      shape << "K=" << k << " H=" << h << " O=" << o;
      break;
    }
    case ModelClass::full_information: {
      const std::size_t k = uniform_size(rng, 2, 5), h = uniform_size(rng, 2, 8),
                        o = uniform_size(rng, 2, 8);
      out.model = random_full_info_model(rng, k, h, o);
      out.lambda = 0.5;
      shape << "K=" << k << " H=" << h << " O=" << o;
      break;
    }
    case ModelClass::linear: {
      const std::size_t d = uniform_size(rng, 2, 4), k = uniform_size(rng, 2, 6),
                        h = uniform_size(rng, 2, 8);
      out.model = random_linear_model(rng, d, k, h);
      out.lambda = static_cast<double>(d) / 2.0;
      shape << "d=" << d << " K=" << k << " H=" << h;
      break;
    }
    case ModelClass::semi_bandit: {
      const std::size_t d = 4, m = 2;
      std::vector<std::vector<double>> values(d), weights(d);
      for (std::size_t i = 0; i < d; ++i) {
        values[i] = {uniform01(rng), uniform01(rng)};
        const double w = 0.05 + 0.9 * uniform01(rng);
        weights[i] = {w, 1.0 - w};
      }
      out.model = semi_bandit_model(values, weights, m);
      out.lambda = static_cast<double>(d) / (2.0 * static_cast<double>(m * m));
      shape << "d=" << d << " m=" << m;
      break;
    }
  }
  out.shape = shape.str();
  return out;
}

std::vector<BoundReport> check_info_ratio_bounds(const FiniteModel& model, double lambda,
                                                 std::size_t horizon, Rng& rng,
                                                 const std::string& context) {
  if (model.reward_span() > 1.0 + 1e-12) return {};
  const std::size_t truth = sample_hypothesis(model, rng);
  FiniteModel post = model;
  double worst = 0.0;
  std::size_t worst_t = 1;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const IdsSolution sol = ids_distribution(exact_ids_stats(post).ratio_inputs());
    if (sol.ratio_value > worst) {
      worst = sol.ratio_value;
      worst_t = t;
    }
    const std::size_t a = sol.distribution.sample(rng);
    post = bayesian_model_update(post, a, sample_outcome(model, truth, a, rng));
  }
  return {make_report("minimal ratio <= lambda", worst, lambda, 1e-9,
                      context + " worst_t=" + std::to_string(worst_t))};
}

std::vector<BoundReport> info_ratio_suite(std::size_t models, std::size_t horizon,
                                          std::uint64_t seed) {
  std::vector<BoundReport> out;
  for (ModelClass c : {ModelClass::finite, ModelClass::full_information, ModelClass::linear,
                       ModelClass::semi_bandit}) {
    const std::uint64_t stream = kRatioStream + static_cast<std::uint64_t>(c);
    std::vector<BoundReport> part = gather(models, [&](std::size_t i) {
      Rng rng = make_rng(seed, stream, i);
      const ClassModel m = random_model(c, rng);
      return check_info_ratio_bounds(m.model, m.lambda, horizon, rng,
                                     describe(model_class_name(c) + " " + m.shape, seed, i));
    });
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<BoundReport> check_randomization_necessity(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("p must lie in (0, 1)");
  const FiniteModel model = randomization_example_model(p);
  const IdsStats s = exact_ids_stats(model);
  const RatioInputs in = s.ratio_inputs();
  const IdsSolution sol = ids_distribution(in);
  const double first = information_ratio(ActionDistribution::point_mass(2, 0), in);
  const double second = information_ratio(ActionDistribution::point_mass(2, 1), in);
  const std::string ctx = "p=" + std::to_string(p);
  std::vector<BoundReport> out;
  out.push_back(make_report("known arm gain is zero", std::abs(s.gain[0]), 0.0, 0.0, ctx));
  out.push_back(make_report("ratio of known arm is infinite", first == kInf ? 0.0 : 1.0, 0.0, 0.0,
                            ctx + " ratio=" + std::to_string(first)));
  const double mixed = std::min(sol.distribution[0], sol.distribution[1]);
  out.push_back(make_report("minimizer is a strict mixture", -mixed, 0.0, 0.0,
                            ctx + " pi=(" + std::to_string(sol.distribution[0]) + ", " +
                                std::to_string(sol.distribution[1]) + ")"));
  out.push_back(make_report("mixture beats the informative point mass", sol.ratio_value, second,
                            1e-12, ctx));
  out.push_back(make_report("minimal ratio is finite", std::isfinite(sol.ratio_value) ? 0.0 : 1.0,
                            0.0, 0.0, ctx));
  return out;
}

PureExplorationResult simulate_pure_exploration(const FiniteModel& model, std::size_t horizon,
                                                std::size_t trials, Rng& rng) {
  if (horizon < 1 || trials < 1) throw InputError("pure exploration needs T >= 1 and trials >= 1");
  std::vector<double> terminal(trials), gap(trials), cumulative(trials);
  const double h0 = entropy(exact_alpha(model));
  for (std::size_t n = 0; n < trials; ++n) {
    const std::size_t truth = sample_hypothesis(model, rng);
    FiniteModel post = model;
    double cum = 0.0;
    for (std::size_t t = 1; t <= horizon; ++t) {
      const IdsStats s = exact_ids_stats(post);
      const std::size_t a = pure_exploration_action(s.ratio_inputs());
      cum += s.delta[a];
      if (t == horizon) {
        terminal[n] = *std::min_element(s.delta.begin(), s.delta.end());
        break;
      }
      post = bayesian_model_update(post, a, sample_outcome(model, truth, a, rng));
    }
    cumulative[n] = cum;
    gap[n] = terminal[n] - cum / static_cast<double>(horizon);
  }
  PureExplorationResult r;
  r.initial_entropy = h0;
  mean_se(terminal, r.mean_terminal, r.terminal_se);
  double unused;
  mean_se(cumulative, r.mean_cumulative, unused);
  mean_se(gap, r.gap_mean, r.gap_se);
  return r;
}

std::vector<BoundReport> check_pure_exploration(const FiniteModel& model, double lambda,
                                                std::size_t horizon, std::size_t trials, Rng& rng,
                                                const std::string& context) {
  const PureExplorationResult r = simulate_pure_exploration(model, horizon, trials, rng);
  const double t = static_cast<double>(horizon);
  return {
      make_report("terminal regret <= cumulative regret / T", r.mean_terminal,
                  r.mean_cumulative / t, 3.0 * r.gap_se, context),
      make_report("terminal regret <= sqrt(lambda H / T)", r.mean_terminal,
                  std::sqrt(lambda * r.initial_entropy / t), 3.0 * r.terminal_se,
                  context + " H=" + std::to_string(r.initial_entropy)),
  };
}

std::vector<BoundReport> pure_exploration_suite(std::size_t models, std::size_t horizon,
                                                std::size_t trials, std::uint64_t seed) {
  return gather(models, [&](std::size_t i) {
    Rng rng = make_rng(seed, kPureStream, i);
    const std::size_t h = uniform_size(rng, 2, 8), o = uniform_size(rng, 2, 8);
    const FiniteModel model = random_finite_model(rng, 3, h, o);
    std::ostringstream shape;
    shape << "K=3 H=" << h << " O=" << o << " T=" << horizon << " trials=" << trials;
    return check_pure_exploration(model, 1.5, horizon, trials, rng,
                                  describe(shape.str(), seed, i));
  });
}

double sparse_ts_ratio_formula(std::size_t d) {
  const double n = static_cast<double>(d);
  const double num = (n - 1.0) * (n - 1.0) / (n * n);
  return num / (std::log(n) / n + ((n - 1.0) / n) * std::log(n / (n - 1.0)));
}

double sparse_ids_ratio_formula(std::size_t d) {
  const double n = static_cast<double>(d);
  return ((n - 1.0) * (n - 1.0) / (n * n)) / std::log(n / 2.0);
}

std::vector<BoundReport> sparse_ratio_reports(const std::vector<std::size_t>& dims) {
  std::vector<BoundReport> out;
  for (std::size_t d : dims) {
    if (d < 3) throw InputError("sparse ratio formulas need d >= 3");
    const FiniteModel model = sparse_linear_reduced_model(d);
    const IdsStats s = exact_ids_stats(model);
    const RatioInputs in = s.ratio_inputs();
    const double ts = information_ratio(s.alpha, in);
    const double best = ids_distribution(in).ratio_value;
    const std::string ctx = "d=" + std::to_string(d);
    const double ts_formula = sparse_ts_ratio_formula(d);
    const double ids_formula = sparse_ids_ratio_formula(d);
    out.push_back(make_report("Thompson ratio matches closed form", std::abs(ts - ts_formula), 0.0,
                              1e-9, ctx + " computed=" + std::to_string(ts) +
                                        " formula=" + std::to_string(ts_formula)));
    out.push_back(make_report("minimal ratio matches closed form", std::abs(best - ids_formula),
                              0.0, 1e-9, ctx + " computed=" + std::to_string(best) +
                                             " formula=" + std::to_string(ids_formula)));
  }
  return out;
}

KgExampleResult simulate_kg_example(double c, double f, std::size_t horizon) {
  if (!(c > 0.0 && c < 1.0) || !(f > 0.0) || horizon < 1) {
    throw InputError("KG example needs 0 < c < 1, f > 0 and T >= 1");
  }
  // E[max(c, theta)] - c for theta ~ Beta(a, b).
  const auto value_gap = [c](double a, double b) {
    return c * boost::math::ibeta(a, b, c) + a / (a + b) * (1.0 - boost::math::ibeta(a + 1.0, b, c)) - c;
  };
  Rng rng(0);
  double a = 1.0, b = f;
  KgExampleResult r;
  r.horizon = horizon;
  r.closed_form_constant = value_gap(a, b);
  for (std::size_t t = 1; t <= horizon; ++t) {
    const double m = a / (a + b);
    const std::vector<double> means = {c, m};
    const std::vector<double> factors =
        bernoulli_kg_factors(means, {c, (a + 1.0) / (a + b + 1.0)}, {c, a / (a + b + 1.0)});
    const std::size_t choice = kg_choice(means, factors, t, horizon);
    const double gap = value_gap(a, b);
    if (choice == 0) {
      ++r.known_arm_plays;
      r.regret += gap;
    } else {
      r.regret += gap + c - m;
      const double theta = beta_draw(rng, a, b);
      (uniform01(rng) < theta ? a : b) += 1.0;
    }
  }
  // Simpson on [0, c] and [c, 1]: the integrand is polynomial on each piece
  // when the prior is Beta(1, f) with integer f.
  const auto density = [f](double x) { return f * std::pow(1.0 - x, f - 1.0); };
  const auto simpson = [](auto&& g, double lo, double hi, int n) {
    const double h = (hi - lo) / n;
    double s = g(lo) + g(hi);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * g(lo + k * h);
    return s * h / 3.0;
  };
  r.quadrature_constant =
      simpson([&](double x) { return c * density(x); }, 0.0, c, 2000) +
      simpson([&](double x) { return x * density(x); }, c, 1.0, 2000) - c;
  return r;
}

std::vector<BoundReport> kg_example_reports(std::size_t horizon) {
  const KgExampleResult r = simulate_kg_example(0.51, 2.0, horizon);
  const double t = static_cast<double>(horizon);
  const std::string ctx = "c=0.51 prior=Beta(1,2) T=" + std::to_string(horizon);
  return {
      make_report("known arm chosen every period", t - static_cast<double>(r.known_arm_plays), 0.0,
                  0.0, ctx + " plays=" + std::to_string(r.known_arm_plays)),
      make_report("regret equals T times the quadrature constant",
                  std::abs(r.regret - t * r.quadrature_constant), 0.0, 1e-6,
                  ctx + " regret=" + std::to_string(r.regret) +
                      " constant=" + std::to_string(r.quadrature_constant)),
      make_report("constant equals (1 - c)^3 / 3",
                  std::abs(r.quadrature_constant - std::pow(0.49, 3) / 3.0), 0.0, 1e-12, ctx),
  };
}

double lai_robbins_constant(const std::vector<double>& theta) {
  if (theta.size() < 2) throw InputError("Lai-Robbins constant needs at least two arms");
  for (double v : theta) {
    if (!(v >= 0.0 && v <= 1.0)) throw InputError("Bernoulli means must lie in [0, 1]");
  }
  const std::size_t best = argmax_index(theta);
  if (std::count(theta.begin(), theta.end(), theta[best]) > 1) {
    throw InputError("Lai-Robbins constant needs a unique optimal arm");
  }
  double gaps = 0.0, divergence = 0.0;
  for (std::size_t a = 0; a < theta.size(); ++a) {
    if (a == best) continue;
    gaps += theta[best] - theta[a];
    divergence += exact_bernoulli_kl(theta[best], theta[a]);
  }
  return std::isinf(divergence) ? 0.0 : gaps / divergence;
}

RevealingComparison revealing_action_comparison(const std::vector<std::size_t>& ks,
                                                std::size_t trials, std::size_t horizon,
                                                std::uint64_t seed) {
  RevealingComparison out;
  out.ks = ks;
  for (std::size_t k : ks) {
    ExperimentConfig config;
    config.environment.family = Family::revealing_action;
    config.environment.arms = k;
    config.policies = {PolicySpec{Policy::ids}, PolicySpec{Policy::ts}};
    config.horizon = horizon;
    config.trials = trials;
    config.master_seed = seed;
    config.trace_resolution = horizon;
    const RegretTable t = run_experiment(config);
    out.ids.push_back(t.at("ids"));
    out.ts.push_back(t.at("ts"));
  }
  return out;
}

std::vector<BoundReport> revealing_reports(const RevealingComparison& c) {
  std::vector<BoundReport> out;
  if (c.ks.empty()) return out;
  double lo = kInf, hi = -kInf;
  std::ostringstream means;
  for (std::size_t i = 0; i < c.ks.size(); ++i) {
    lo = std::min(lo, c.ids[i].mean_regret);
    hi = std::max(hi, c.ids[i].mean_regret);
    means << " K=" << c.ks[i] << ":" << c.ids[i].mean_regret;
  }
  // Strict inequality: the spread must stay below 1.
  out.push_back(make_report("IDS regret spread across K < 1", hi - lo, std::nextafter(1.0, 0.0),
                            0.0, "ids" + means.str()));
  for (std::size_t i = 1; i < c.ks.size(); ++i) {
    const double sep = 3.0 * std::hypot(c.ts[i - 1].std_error, c.ts[i].std_error);
    std::ostringstream ctx;
    ctx << "ts K=" << c.ks[i - 1] << ":" << c.ts[i - 1].mean_regret << " K=" << c.ks[i] << ":"
        << c.ts[i].mean_regret;
    // Increase must exceed 3 combined SE: lhs = 3 SE - increase <= 0 strictly.
    out.push_back(make_report("Thompson regret increases in K",
                              sep - (c.ts[i].mean_regret - c.ts[i - 1].mean_regret),
                              -std::numeric_limits<double>::min(), 0.0, ctx.str()));
  }
  return out;
}

}  // namespace ids
