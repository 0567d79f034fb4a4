#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ids/diagnostics.hpp"
#include "ids/errors.hpp"
#include "ids/exact_info.hpp"
#include "ids/harness.hpp"
#include "ids/model_file.hpp"

namespace {

using namespace ids;

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

struct CommonFlags {
  std::string out;
  std::string format = "csv";
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t grid_size = 0;
  std::size_t mc_samples = 0;
  int threads = 0;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--out", f.out, "Output path (stdout when omitted)");
  app->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--trials", f.trials, "Independent trials")->check(CLI::PositiveNumber);
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--grid-size", f.grid_size, "Quadrature grid points");
  app->add_option("--mc-samples", f.mc_samples, "Monte Carlo samples for linear IDS");
  app->add_option("--threads", f.threads, "Worker threads (default BANDIT_THREADS or all)");
}

void apply_common(ExperimentConfig& c, const CommonFlags& f) {
  if (f.trials) c.trials = f.trials;
  c.master_seed = f.seed;
  if (f.grid_size) c.grid_size = f.grid_size;
  if (f.mc_samples) c.mc_samples = f.mc_samples;
  if (f.threads) c.threads = f.threads;
}

void emit_table(const RegretTable& table, const CommonFlags& f) {
  const OutputFormat format = parse_format(f.format);
  if (!f.out.empty()) {
    write_results(table, f.out, format);
    return;
  }
  if (format == OutputFormat::json) {
    std::cout << results_json(table);
  } else {
    write_summary_csv(table, std::cout);
  }
}

void emit_text(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + out + "' for writing");
  f << text;
  if (!f.flush()) throw std::runtime_error("write failed for '" + out + "'");
}

// ---- run -----------------------------------------------------------------

struct RunFlags {
  CommonFlags common;
  std::string config_file, env, policies, theta, model_file;
  std::size_t arms = 0, dim = 0, horizon = 0, trace_resolution = 0;
  double gpucb_c = 0.0;
};

int run_command(const RunFlags& f) {
  ExperimentConfig c;
  std::map<std::string, std::string> values;
  if (!f.config_file.empty()) values = read_config_file(f.config_file);
  // Flags override the config file.
  const auto set = [&](const char* key, const std::string& v) {
    if (!v.empty()) values[key] = v;
  };
  const auto set_num = [&](const char* key, auto v) {
    if (v) values[key] = std::to_string(v);
  };
  set("env", f.env);
  set("policies", f.policies);
  set("theta", f.theta);
  set("model_file", f.model_file);
  set_num("arms", f.arms);
  set_num("dim", f.dim);
  set_num("horizon", f.horizon);
  set_num("trace_resolution", f.trace_resolution);
  if (f.gpucb_c > 0.0) {
    std::ostringstream s;
    s.precision(17);
    s << f.gpucb_c;
    values["gpucb_tuned.c"] = s.str();
  }
  CommonFlags common = f.common;
  if (auto it = values.find("out"); it != values.end() && common.out.empty()) common.out = it->second;
  if (auto it = values.find("format"); it != values.end() && f.common.format == "csv") {
    common.format = it->second;
  }
  if (auto it = values.find("trials"); it != values.end() && !common.trials) {
    common.trials = std::stoull(it->second);
  }
  if (auto it = values.find("seed"); it != values.end() && !common.seed) {
    common.seed = std::stoull(it->second);
  }
  apply_config(c, values);
  apply_common(c, common);
  if (c.policies.empty()) throw ConfigError("no policies given (use --policies)");
  emit_table(run_experiment(c), common);
  return 0;
}

// ---- table ---------------------------------------------------------------

struct HorizonRow {
  std::string policy;
  std::size_t horizon;
  double mean, se;
};

std::string horizon_csv(const std::vector<HorizonRow>& rows) {
  std::ostringstream s;
  s << "policy,horizon,mean_regret,std_error\n";
  char buf[128];
  for (const HorizonRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%.17g,%.17g\n", r.policy.c_str(), r.horizon, r.mean, r.se);
    s << buf;
  }
  return s.str();
}

std::string horizon_json(const std::vector<HorizonRow>& rows) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const HorizonRow& r : rows) {
    doc.push_back({{"policy", r.policy}, {"horizon", r.horizon}, {"mean_regret", r.mean},
                   {"std_error", r.se}});
  }
  return doc.dump(2) + "\n";
}

// IDS does not use the horizon, so one run with checkpoints covers every
// horizon; KG does, so it gets one run per horizon.
std::vector<HorizonRow> horizon_table(ExperimentConfig base, Policy ids_policy,
                                      const std::vector<std::size_t>& horizons) {
  std::vector<HorizonRow> rows;
  ExperimentConfig c = base;
  c.policies = {PolicySpec{ids_policy}};
  c.horizon = horizons.back();
  c.checkpoints = horizons;
  const RegretTable ids_table = run_experiment(c);
  const PolicyResult& r = ids_table.policies.front();
  for (std::size_t k = 0; k < horizons.size(); ++k) {
    double mean, se;
    std::array<double, 6> q;
    summarize(r.checkpoint_regret[k], mean, se, q);
    rows.push_back({r.policy, horizons[k], mean, se});
  }
  for (std::size_t h : horizons) {
    ExperimentConfig k = base;
    k.policies = {PolicySpec{Policy::kg}};
    k.horizon = h;
    k.trace_resolution = h;
    const RegretTable t = run_experiment(k);
    rows.push_back({"kg", h, t.policies.front().mean_regret, t.policies.front().std_error});
  }
  return rows;
}

int table_command(const std::string& name, const CommonFlags& f) {
  ExperimentConfig c;
  c.trials = 1000;
  apply_common(c, f);
  const auto policies = [](std::initializer_list<Policy> ps) {
    std::vector<PolicySpec> out;
    for (Policy p : ps) out.push_back(PolicySpec{p});
    return out;
  };
  if (name == "table1") {
    c.environment.family = Family::bernoulli;
    c.environment.arms = 10;
    c.horizon = 1000;
    c.policies = policies({Policy::kg, Policy::ids, Policy::ts, Policy::bayes_ucb, Policy::ucb1,
                           Policy::ucb_tuned, Policy::moss});
    emit_table(run_experiment(c), f);
  } else if (name == "table2") {
    c.environment.family = Family::gaussian;
    c.environment.arms = 10;
    c.horizon = 1000;
    c.policies = policies({Policy::kg, Policy::bayes_ucb, Policy::ts, Policy::ids_me, Policy::gpucb,
                           Policy::gpucb_tuned});
    emit_table(run_experiment(c), f);
  } else if (name == "table3" || name == "table4") {
    const bool linear = name == "table4";
    c.environment.family = linear ? Family::linear_gaussian : Family::gaussian;
    c.environment.arms = linear ? 30 : 10;
    c.environment.dim = 5;
    const std::vector<std::size_t> horizons =
        linear ? std::vector<std::size_t>{10, 25, 50, 75, 100, 250}
               : std::vector<std::size_t>{10, 25, 50, 75, 100, 250, 500, 750, 1000};
    c.trace_resolution = 1;
    const auto rows = horizon_table(c, linear ? Policy::ids : Policy::ids_me, horizons);
    emit_text(f.format == "json" ? horizon_json(rows) : horizon_csv(rows), f.out);
  } else if (name == "fig4-lai-robbins") {
    c.environment.family = Family::bernoulli;
    c.environment.arms = 3;
    c.environment.fixed_theta = {0.3, 0.2, 0.1};
    c.horizon = 10000;
    if (!f.trials) c.trials = 200;
    c.trace_resolution = 100;
    c.policies = policies({Policy::ids, Policy::ts, Policy::bayes_ucb});
    RegretTable t = run_experiment(c);
    const double constant = lai_robbins_constant(c.environment.fixed_theta);
    PolicyResult bound;
    bound.policy = "lower_bound";
    bound.mean_regret = constant * std::log(static_cast<double>(c.horizon));
    bound.quantiles.fill(bound.mean_regret);
    bound.trace_t = t.policies.front().trace_t;
    for (std::size_t s : bound.trace_t) bound.trace_mean.push_back(constant * std::log(double(s)));
    t.policies.push_back(bound);
    emit_table(t, f);
  } else {
    throw ConfigError("unknown table '" + name +
                      "' (table1, table2, table3, table4, fig4-lai-robbins)");
  }
  return 0;
}

// ---- verify --------------------------------------------------------------

struct VerifyFlags {
  std::string suite = "all";
  std::size_t models = 100;
  std::size_t horizon = 50;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::vector<std::size_t> dims = {4, 8, 16, 32};
};

int verify_command(const VerifyFlags& f) {
  const std::vector<std::string> all = {"bounds", "regret", "randomization", "pure-exploration",
                                        "sparse", "kg"};
  std::vector<std::string> suites = f.suite == "all" ? all : std::vector<std::string>{f.suite};
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  bool ok = true;
  for (const std::string& s : suites) {
    std::vector<BoundReport> reports;
    if (s == "bounds") {
      reports = info_ratio_suite(f.models, f.horizon, f.seed);
    } else if (s == "regret") {
      reports = regret_bound_suite(f.trials ? f.trials : 200, 200, f.seed);
    } else if (s == "randomization") {
      for (double p : {0.1, 0.01, 0.001}) {
        const auto r = check_randomization_necessity(p);
        reports.insert(reports.end(), r.begin(), r.end());
      }
    } else if (s == "pure-exploration") {
      reports = pure_exploration_suite(f.models, f.horizon, f.trials ? f.trials : 500, f.seed);
    } else if (s == "sparse") {
      reports = sparse_ratio_reports(f.dims);
    } else if (s == "kg") {
      reports = kg_example_reports(10000);
    } else {
      throw ConfigError("unknown suite '" + s + "'");
    }
    std::size_t passed = 0;
    for (const BoundReport& r : reports) {
      passed += r.satisfied;
      if (!r.satisfied) {
        std::cerr << "FAIL " << s << ": " << r.name << " lhs=" << r.lhs << " rhs=" << r.rhs
                  << " tol=" << r.tol << " [" << r.context << "]\n";
      }
    }
    std::cerr << s << ": " << passed << "/" << reports.size() << " satisfied\n";
    ok = ok && passed == reports.size();
    doc.push_back(nlohmann::ordered_json::parse(reports_json(s, reports)));
  }
  emit_text(doc.dump(2) + "\n", f.out);
  return ok ? 0 : kRuntimeFailure;
}

// ---- info-ratio ----------------------------------------------------------

int info_ratio_command(const std::string& path, const std::string& format, const std::string& out) {
  const FiniteModel model = read_model_file(path);
  const IdsStats s = exact_ids_stats(model);
  const RatioInputs in = s.ratio_inputs();
  const IdsSolution sol = ids_distribution(in);
  const double ts = information_ratio(s.alpha, in);
  if (format == "json") {
    nlohmann::ordered_json doc;
    doc["actions"] = nlohmann::ordered_json::array();
    for (std::size_t a = 0; a < model.actions(); ++a) {
      doc["actions"].push_back({{"action", a},
                                {"alpha", s.alpha[a]},
                                {"delta", s.delta[a]},
                                {"gain", s.gain[a]},
                                {"ids_probability", sol.distribution[a]}});
    }
    doc["minimal_ratio"] = sol.ratio_value;
    doc["thompson_ratio"] = std::isfinite(ts) ? nlohmann::ordered_json(ts) : "inf";
    doc["entropy"] = entropy(s.alpha);
    emit_text(doc.dump(2) + "\n", out);
    return 0;
  }
  std::ostringstream o;
  char buf[256];
  o << "action,alpha,delta,gain,ids_probability\n";
  for (std::size_t a = 0; a < model.actions(); ++a) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", a, s.alpha[a], s.delta[a],
                  s.gain[a], sol.distribution[a]);
    o << buf;
  }
  std::snprintf(buf, sizeof buf, "# minimal_ratio=%.17g thompson_ratio=%.17g entropy=%.17g\n",
                sol.ratio_value, ts, entropy(s.alpha));
  o << buf;
  emit_text(o.str(), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-directed sampling bandit simulator"};
  app.require_subcommand(1);

  RunFlags run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run an experiment from flags or a config file");
  add_common(run_cmd, run.common);
  run_cmd->add_option("--config", run.config_file, "key = value config file");
  run_cmd->add_option("--env", run.env, "bernoulli, gaussian, linear_gaussian, revealing_action, "
                                        "sparse_linear, semi_bandit, finite_model");
  run_cmd->add_option("--arms", run.arms, "Number of arms (K)");
  run_cmd->add_option("--dim", run.dim, "Dimension d");
  run_cmd->add_option("--horizon", run.horizon, "Time horizon T");
  run_cmd->add_option("--policies", run.policies, "Comma-separated policy identifiers");
  run_cmd->add_option("--theta", run.theta, "Fixed arm means, comma-separated");
  run_cmd->add_option("--model-file", run.model_file, "Finite model file (finite_model env)");
  run_cmd->add_option("--trace-resolution", run.trace_resolution, "Periods between trace points");
  run_cmd->add_option("--gpucb-c", run.gpucb_c, "Coefficient c of gpucb_tuned");

  CommonFlags table;
  std::string table_name;
  CLI::App* table_cmd = app.add_subcommand("table", "Reproduce a table from the experiments");
  table_cmd->add_option("name", table_name, "table1|table2|table3|table4|fig4-lai-robbins")
      ->required();
  add_common(table_cmd, table);

  VerifyFlags verify;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Run bound and property suites");
  verify_cmd->add_option("suite", verify.suite,
                         "bounds|regret|randomization|pure-exploration|sparse|kg|all");
  verify_cmd->add_option("--models", verify.models, "Random models per class");
  verify_cmd->add_option("--horizon", verify.horizon, "Trajectory length");
  verify_cmd->add_option("--trials", verify.trials, "Trials per model (regret, pure-exploration)");
  verify_cmd->add_option("--seed", verify.seed, "Seed");
  verify_cmd->add_option("--dims", verify.dims, "Dimensions for the sparse suite");
  verify_cmd->add_option("--out", verify.out, "JSON report path (stdout when omitted)");

  std::string model_file, info_format = "csv", info_out;
  CLI::App* info_cmd = app.add_subcommand("info-ratio", "Exact information ratios of a model file");
  info_cmd->add_option("--model-file", model_file, "Model file")->required();
  info_cmd->add_option("--format", info_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  info_cmd->add_option("--out", info_out, "Output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*run_cmd) return run_command(run);
    if (*table_cmd) return table_command(table_name, table);
    if (*verify_cmd) return verify_command(verify);
    if (*info_cmd) return info_ratio_command(model_file, info_format, info_out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kUsageError;
}
