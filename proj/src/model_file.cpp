#include "ids/model_file.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "ids/errors.hpp"

namespace ids {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw InputError("model file line " + std::to_string(line) + ": " + what);
}

std::vector<double> parse_numbers(const std::string& text, std::size_t line) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      fail(line, "expected a number, got '" + token + "'");
    }
    if (used != token.size()) fail(line, "expected a number, got '" + token + "'");
    out.push_back(v);
  }
  return out;
}

std::size_t parse_count(const std::string& text, std::size_t line) {
  const std::vector<double> v = parse_numbers(text, line);
  if (v.size() != 1 || v[0] < 1 || v[0] != static_cast<double>(static_cast<std::size_t>(v[0]))) {
    fail(line, "expected a positive integer");
  }
  return static_cast<std::size_t>(v[0]);
}

std::size_t parse_index(const std::string& token, std::size_t line) {
  if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos ||
      token.size() > 9) {
    fail(line, "expected a non-negative index, got '" + token + "'");
  }
  return static_cast<std::size_t>(std::stoul(token));
}

std::string format_row(const double* values, std::size_t n) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    if (i) out += ' ';
    out += buf;
  }
  return out;
}

struct ProbLine {
  std::size_t line;
  std::string hyp;
  std::string action;
  std::vector<double> row;
};

}  // namespace

FiniteModel parse_model(std::istream& in) {
  std::optional<std::size_t> hyps, actions, outcomes;
  std::optional<std::vector<double>> weights, shared_rewards;
  std::map<std::size_t, std::vector<double>> action_rewards;
  std::vector<ProbLine> prob_lines;

  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    std::istringstream key_stream(trim(text.substr(0, eq)));
    const std::string value = trim(text.substr(eq + 1));
    std::vector<std::string> key;
    for (std::string part; key_stream >> part;) key.push_back(part);
    if (key.empty()) fail(line, "missing key");

    if (key[0] == "hypotheses" && key.size() == 1) {
      hyps = parse_count(value, line);
    } else if (key[0] == "actions" && key.size() == 1) {
      actions = parse_count(value, line);
    } else if (key[0] == "outcomes" && key.size() == 1) {
      outcomes = parse_count(value, line);
    } else if (key[0] == "weights" && key.size() == 1) {
      weights = parse_numbers(value, line);
    } else if (key[0] == "rewards" && key.size() == 1) {
      shared_rewards = parse_numbers(value, line);
    } else if (key[0] == "reward" && key.size() == 2) {
      action_rewards[parse_index(key[1], line)] = parse_numbers(value, line);
    } else if (key[0] == "prob" && key.size() == 3) {
      prob_lines.push_back({line, key[1], key[2], parse_numbers(value, line)});
    } else if (key[0] == "name" && key.size() == 1) {
      // Free-form label, ignored.
    } else {
      fail(line, "unknown key '" + trim(text.substr(0, eq)) + "'");
    }
  }

  if (!hyps || !actions || !outcomes) {
    throw InputError("model file must set hypotheses, actions and outcomes");
  }
  const std::size_t h_count = *hyps, k = *actions, o = *outcomes;
  if (!weights) weights = std::vector<double>(h_count, 1.0 / static_cast<double>(h_count));
  if (weights->size() != h_count) throw InputError("weights must list one value per hypothesis");

  std::vector<double> rewards(k * o, 0.0);
  std::vector<bool> have_reward(k, false);
  if (shared_rewards) {
    if (shared_rewards->size() != o) throw InputError("rewards must list one value per outcome");
    for (std::size_t a = 0; a < k; ++a) {
      std::copy(shared_rewards->begin(), shared_rewards->end(), rewards.begin() + a * o);
      have_reward[a] = true;
    }
  }
  for (const auto& [a, row] : action_rewards) {
    if (a >= k) throw InputError("reward line for action " + std::to_string(a) + " out of range");
    if (row.size() != o) throw InputError("reward line must list one value per outcome");
    std::copy(row.begin(), row.end(), rewards.begin() + a * o);
    have_reward[a] = true;
  }
  for (std::size_t a = 0; a < k; ++a) {
    if (!have_reward[a]) throw InputError("no reward row for action " + std::to_string(a));
  }

  std::vector<double> probs(h_count * k * o, 0.0);
  std::vector<bool> have_prob(h_count * k, false);
  const auto index_range = [&](const std::string& tok, std::size_t limit, std::size_t ln) {
    if (tok == "*") return std::pair<std::size_t, std::size_t>{0, limit};
    const std::size_t i = parse_index(tok, ln);
    if (i >= limit) fail(ln, "index " + tok + " out of range");
    return std::pair<std::size_t, std::size_t>{i, i + 1};
  };
  for (const ProbLine& p : prob_lines) {
    if (p.row.size() != o) fail(p.line, "prob line must list one value per outcome");
    const auto hr = index_range(p.hyp, h_count, p.line);
    const auto ar = index_range(p.action, k, p.line);
    for (std::size_t h = hr.first; h < hr.second; ++h) {
      for (std::size_t a = ar.first; a < ar.second; ++a) {
        std::copy(p.row.begin(), p.row.end(), probs.begin() + (h * k + a) * o);
        have_prob[h * k + a] = true;
      }
    }
  }
  for (std::size_t r = 0; r < h_count * k; ++r) {
    if (!have_prob[r]) {
      throw InputError("no prob row for hypothesis " + std::to_string(r / k) + ", action " +
                       std::to_string(r % k));
    }
  }
  return FiniteModel(std::move(*weights), k, o, std::move(probs), std::move(rewards));
}

FiniteModel read_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file " + path.string());
  try {
    return parse_model(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_model(const FiniteModel& model, std::ostream& out) {
  const std::size_t k = model.actions();
  const std::size_t o = model.outcomes();
  out << "hypotheses = " << model.hypotheses() << "\n";
  out << "actions = " << k << "\n";
  out << "outcomes = " << o << "\n";
  out << "weights = " << format_row(model.weights().data(), model.hypotheses()) << "\n";
  const std::vector<double>& rewards = model.reward_table();
  bool shared = true;
  for (std::size_t a = 1; a < k && shared; ++a) {
    shared = std::equal(rewards.begin(), rewards.begin() + static_cast<std::ptrdiff_t>(o),
                        rewards.begin() + static_cast<std::ptrdiff_t>(a * o));
  }
  if (shared) {
    out << "rewards = " << format_row(rewards.data(), o) << "\n";
  } else {
    for (std::size_t a = 0; a < k; ++a) {
      out << "reward " << a << " = " << format_row(rewards.data() + a * o, o) << "\n";
    }
  }
  const std::vector<double>& probs = model.prob_table();
  for (std::size_t h = 0; h < model.hypotheses(); ++h) {
    for (std::size_t a = 0; a < k; ++a) {
      out << "prob " << h << " " << a << " = "
          << format_row(probs.data() + (h * k + a) * o, o) << "\n";
    }
  }
}

std::string model_to_string(const FiniteModel& model) {
  std::ostringstream out;
  write_model(model, out);
  return out.str();
}

}  // namespace ids
