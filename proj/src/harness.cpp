#include "ids/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "ids/errors.hpp"
#include "ids/model_file.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ids {

namespace {

constexpr std::uint64_t kEnvironmentStream = 0x454E56ULL;
constexpr std::uint64_t kPolicyStream = 0x504F4CULL;

// FNV-1a, so a policy's streams do not depend on its position in the list.
std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

struct TrialOutcome {
  std::vector<double> final_regret;               // per policy
  std::vector<std::vector<double>> trace;         // per policy, per trace point
  std::vector<std::vector<double>> checkpoints;   // per policy, per checkpoint
  std::vector<double> ratio_sum;                  // per policy
  std::vector<std::size_t> ratio_count;
  std::vector<double> entropy0;
};

std::vector<std::size_t> trace_points(const ExperimentConfig& c) {
  std::vector<std::size_t> t;
  for (std::size_t s = c.trace_resolution; s <= c.horizon; s += c.trace_resolution) t.push_back(s);
  return t;
}

TrialOutcome run_trial(const ExperimentConfig& c, std::size_t trial) {
  Rng env_rng = make_rng(c.master_seed, kEnvironmentStream, trial);
  const TrialRealization realization = draw_trial(c.environment, env_rng);
  const AgentOptions options{c.horizon, c.grid_size, c.mc_samples, c.mc_chunks};
  const std::vector<std::size_t> points = trace_points(c);
  const std::size_t np = c.policies.size();

  TrialOutcome out;
  out.final_regret.assign(np, 0.0);
  out.trace.assign(np, std::vector<double>(points.size(), 0.0));
  out.checkpoints.assign(np, std::vector<double>(c.checkpoints.size(), 0.0));
  out.ratio_sum.assign(np, 0.0);
  out.ratio_count.assign(np, 0);
  out.entropy0.assign(np, std::numeric_limits<double>::quiet_NaN());

  for (std::size_t p = 0; p < np; ++p) {
    const PolicySpec& policy = c.policies[p];
    Rng rng = make_rng(c.master_seed, kPolicyStream ^ name_hash(policy.name()), trial);
    std::unique_ptr<Agent> agent = make_agent(policy, c.environment, realization, options);
    double regret = 0.0;
    std::size_t next_point = 0;
    for (std::size_t t = 1; t <= c.horizon; ++t) {
      const std::size_t a = agent->act(t, rng);
      regret += realization.per_period_regret(a);
      const double ratio = agent->last_ratio();
      if (std::isfinite(ratio)) {
        out.ratio_sum[p] += ratio;
        ++out.ratio_count[p];
      }
      if (t == 1) out.entropy0[p] = agent->initial_entropy();
      if (t < c.horizon) agent->observe(a, sample_reward(realization, a, rng));
      if (next_point < points.size() && points[next_point] == t) out.trace[p][next_point++] = regret;
      for (std::size_t k = 0; k < c.checkpoints.size(); ++k) {
        if (c.checkpoints[k] == t) out.checkpoints[p][k] = regret;
      }
    }
    out.final_regret[p] = regret;
  }
  return out;
}

RegretTable reduce(const ExperimentConfig& c, const std::vector<TrialOutcome>& trials) {
  const std::vector<std::size_t> points = trace_points(c);
  RegretTable table;
  for (std::size_t p = 0; p < c.policies.size(); ++p) {
    PolicyResult r;
    r.policy = c.policies[p].name();
    r.final_regret.reserve(trials.size());
    r.trace_t = points;
    r.trace_mean.assign(points.size(), 0.0);
    r.checkpoint_regret.assign(c.checkpoints.size(), {});
    double ratio_sum = 0.0, entropy_sum = 0.0;
    std::size_t ratio_count = 0, entropy_count = 0;
    for (const TrialOutcome& o : trials) {
      r.final_regret.push_back(o.final_regret[p]);
      for (std::size_t k = 0; k < points.size(); ++k) r.trace_mean[k] += o.trace[p][k];
      for (std::size_t k = 0; k < c.checkpoints.size(); ++k) {
        r.checkpoint_regret[k].push_back(o.checkpoints[p][k]);
      }
      ratio_sum += o.ratio_sum[p];
      ratio_count += o.ratio_count[p];
      if (std::isfinite(o.entropy0[p])) {
        entropy_sum += o.entropy0[p];
        ++entropy_count;
      }
    }
    for (double& v : r.trace_mean) v /= static_cast<double>(trials.size());
    r.mean_ratio = ratio_count ? ratio_sum / static_cast<double>(ratio_count)
                               : std::numeric_limits<double>::quiet_NaN();
    r.mean_initial_entropy = entropy_count ? entropy_sum / static_cast<double>(entropy_count)
                                           : std::numeric_limits<double>::quiet_NaN();
    summarize(r.final_regret, r.mean_regret, r.std_error, r.quantiles);
    table.policies.push_back(std::move(r));
  }
  return table;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number '" + s + "' for " + what);
  }
}

std::uint64_t parse_unsigned(const std::string& s, const std::string& what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("invalid non-negative integer '" + s + "' for " + what);
  }
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw ConfigError("integer out of range for " + what);
  }
}

std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const std::string& item : split(s, ',')) out.push_back(parse_double(trim(item), what));
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (trace_resolution < 1) throw ConfigError("trace_resolution must be >= 1");
  if (grid_size < 100) throw ConfigError("grid_size must be >= 100");
  if (mc_samples < 1 || mc_chunks < 1 || mc_chunks > mc_samples) {
    throw ConfigError("mc_samples must be >= mc_chunks >= 1");
  }
  environment.validate();
  for (const PolicySpec& p : policies) check_compatible(p.kind, environment.family);
  for (std::size_t t : checkpoints) {
    if (t < 1 || t > horizon) throw ConfigError("checkpoints must lie in [1, horizon]");
  }
}

const PolicyResult& RegretTable::at(const std::string& policy) const {
  for (const PolicyResult& r : policies) {
    if (r.policy == policy) return r;
  }
  throw InputError("no results for policy '" + policy + "'");
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BANDIT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

RegretTable run_experiment(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.environment = prepare_environment(c.environment);
  c.validate();
  std::vector<TrialOutcome> outcomes(c.trials);
  const auto n = static_cast<std::ptrdiff_t>(c.trials);
  const int threads = resolve_thread_count(c.threads);
  // Exceptions cannot cross the parallel region; keep the first by trial index.
  std::vector<std::string> errors(c.trials);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      outcomes[static_cast<std::size_t>(i)] = run_trial(c, static_cast<std::size_t>(i));
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (const std::string& e : errors) {
    if (!e.empty()) throw std::runtime_error(e);
  }
  return reduce(c, outcomes);
}

RegretTable run_experiment_serial(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.environment = prepare_environment(c.environment);
  c.validate();
  std::vector<TrialOutcome> outcomes;
  outcomes.reserve(c.trials);
  for (std::size_t i = 0; i < c.trials; ++i) outcomes.push_back(run_trial(c, i));
  return reduce(c, outcomes);
}

double quantile_type7(std::vector<double> values, double level) {
  if (values.empty()) throw InputError("quantile of an empty sample");
  if (!(level >= 0.0 && level <= 1.0)) throw InputError("quantile level must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * level;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

void summarize(const std::vector<double>& values, double& mean, double& std_error,
               std::array<double, 6>& quantiles) {
  if (values.empty()) throw InputError("cannot summarize an empty sample");
  const double n = static_cast<double>(values.size());
  double s = 0.0;
  for (double v : values) s += v;
  mean = s / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  std_error = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
  for (std::size_t i = 0; i < kQuantileLevels.size(); ++i) {
    quantiles[i] = quantile_type7(values, kQuantileLevels[i]);
  }
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw ConfigError("unknown output format '" + name + "' (csv or json)");
}

std::string trace_path(const std::string& summary_path) {
  const std::string ext = ".csv";
  if (summary_path.size() > ext.size() &&
      summary_path.compare(summary_path.size() - ext.size(), ext.size(), ext) == 0) {
    return summary_path.substr(0, summary_path.size() - ext.size()) + "_trace.csv";
  }
  return summary_path + "_trace.csv";
}

void write_summary_csv(const RegretTable& table, std::ostream& out) {
  out << "policy,mean_regret,std_error,q10,q25,q50,q75,q90,q95\n";
  for (const PolicyResult& r : table.policies) {
    out << r.policy << ',' << format_double(r.mean_regret) << ',' << format_double(r.std_error);
    for (double q : r.quantiles) out << ',' << format_double(q);
    out << '\n';
  }
}

void write_trace_csv(const RegretTable& table, std::ostream& out) {
  out << "policy,t,mean_cum_regret\n";
  for (const PolicyResult& r : table.policies) {
    for (std::size_t k = 0; k < r.trace_t.size(); ++k) {
      out << r.policy << ',' << r.trace_t[k] << ',' << format_double(r.trace_mean[k]) << '\n';
    }
  }
}

std::string results_json(const RegretTable& table) {
  nlohmann::ordered_json doc;
  doc["policies"] = nlohmann::ordered_json::array();
  for (const PolicyResult& r : table.policies) {
    nlohmann::ordered_json p;
    p["policy"] = r.policy;
    p["mean_regret"] = r.mean_regret;
    p["std_error"] = r.std_error;
    nlohmann::ordered_json q;
    const char* names[] = {"q10", "q25", "q50", "q75", "q90", "q95"};
    for (std::size_t i = 0; i < 6; ++i) q[names[i]] = r.quantiles[i];
    p["quantiles"] = q;
    nlohmann::ordered_json trace = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < r.trace_t.size(); ++k) {
      trace.push_back({{"t", r.trace_t[k]}, {"mean_cum_regret", r.trace_mean[k]}});
    }
    p["trace"] = trace;
    doc["policies"].push_back(p);
  }
  return doc.dump(2) + "\n";
}

void write_results(const RegretTable& table, const std::string& path, OutputFormat format) {
  const auto open = [](const std::string& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + p + "' for writing");
    return f;
  };
  const auto finish = [](std::ofstream& f, const std::string& p) {
    f.flush();
    if (!f) throw std::runtime_error("write failed for '" + p + "'");
  };
  if (format == OutputFormat::json) {
    std::ofstream f = open(path);
    f << results_json(table);
    finish(f, path);
    return;
  }
  std::ofstream summary = open(path);
  write_summary_csv(table, summary);
  finish(summary, path);
  const std::string tp = trace_path(path);
  std::ofstream trace = open(tp);
  write_trace_csv(table, trace);
  finish(trace, tp);
}

RegretTable read_results_csv(std::istream& summary, std::istream& trace) {
  RegretTable table;
  std::string line;
  if (!std::getline(summary, line) || line != "policy,mean_regret,std_error,q10,q25,q50,q75,q90,q95") {
    throw InputError("summary CSV header mismatch");
  }
  while (std::getline(summary, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 9) throw InputError("summary CSV row needs 9 fields: " + line);
    PolicyResult r;
    r.policy = f[0];
    r.mean_regret = parse_double(f[1], "mean_regret");
    r.std_error = parse_double(f[2], "std_error");
    for (std::size_t i = 0; i < 6; ++i) r.quantiles[i] = parse_double(f[3 + i], "quantile");
    table.policies.push_back(std::move(r));
  }
  if (!std::getline(trace, line) || line != "policy,t,mean_cum_regret") {
    throw InputError("trace CSV header mismatch");
  }
  while (std::getline(trace, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 3) throw InputError("trace CSV row needs 3 fields: " + line);
    auto it = std::find_if(table.policies.begin(), table.policies.end(),
                           [&](const PolicyResult& r) { return r.policy == f[0]; });
    if (it == table.policies.end()) throw InputError("trace row for unknown policy " + f[0]);
    it->trace_t.push_back(parse_unsigned(f[1], "t"));
    it->trace_mean.push_back(parse_double(f[2], "mean_cum_regret"));
  }
  return table;
}

RegretTable read_results_csv(const std::string& summary_path) {
  std::ifstream summary(summary_path);
  if (!summary) throw std::runtime_error("cannot open '" + summary_path + "'");
  const std::string tp = trace_path(summary_path);
  std::ifstream trace(tp);
  if (!trace) throw std::runtime_error("cannot open '" + tp + "'");
  return read_results_csv(summary, trace);
}

std::map<std::string, std::string> parse_config_text(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config_text(f);
}

std::vector<PolicySpec> parse_policy_list(const std::string& csv, double gpucb_c) {
  std::vector<PolicySpec> out;
  for (const std::string& raw : split(csv, ',')) {
    const std::string name = trim(raw);
    if (name.empty()) continue;
    out.push_back(PolicySpec{parse_policy(name), gpucb_c});
  }
  return out;
}

void apply_config(ExperimentConfig& c, const std::map<std::string, std::string>& values) {
  // Policy parameters must be known before the policy list is built.
  double gpucb_c = c.policies.empty() ? 0.9 : c.policies.front().gpucb_c;
  if (auto it = values.find("gpucb_tuned.c"); it != values.end()) {
    gpucb_c = parse_double(it->second, "gpucb_tuned.c");
    for (PolicySpec& p : c.policies) p.gpucb_c = gpucb_c;
  }
  EnvironmentSpec& env = c.environment;
  for (const auto& [key, value] : values) {
    if (key == "gpucb_tuned.c") continue;
    if (key == "env") env.family = parse_family(value);
    else if (key == "arms") env.arms = parse_unsigned(value, key);
    else if (key == "dim") env.dim = parse_unsigned(value, key);
    else if (key == "sparsity") env.sparsity = parse_unsigned(value, key);
    else if (key == "theta") env.fixed_theta = parse_double_list(value, key);
    else if (key == "model_file") env.model = std::make_shared<const FiniteModel>(read_model_file(value));
    else if (key == "beta_a") env.beta_a = parse_double(value, key);
    else if (key == "beta_b") env.beta_b = parse_double(value, key);
    else if (key == "prior_mean") env.prior_mean = parse_double(value, key);
    else if (key == "prior_sd") env.prior_sd = parse_double(value, key);
    else if (key == "noise_sd") env.noise_sd = parse_double(value, key);
    else if (key == "prior_variance") env.prior_variance = parse_double(value, key);
    else if (key == "policies") c.policies = parse_policy_list(value, gpucb_c);
    else if (key == "horizon") c.horizon = parse_unsigned(value, key);
    else if (key == "trials") c.trials = parse_unsigned(value, key);
    else if (key == "seed") c.master_seed = parse_unsigned(value, key);
    else if (key == "grid_size") c.grid_size = parse_unsigned(value, key);
    else if (key == "mc_samples") c.mc_samples = parse_unsigned(value, key);
    else if (key == "mc_chunks") c.mc_chunks = parse_unsigned(value, key);
    else if (key == "trace_resolution") c.trace_resolution = parse_unsigned(value, key);
    else if (key == "threads") c.threads = static_cast<int>(parse_unsigned(value, key));
    else if (key == "out" || key == "format") continue;  // handled by the CLI
    else throw ConfigError("unknown config key '" + key + "'");
  }
}

}  // namespace ids
