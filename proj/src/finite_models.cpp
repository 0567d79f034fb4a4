#include "ids/finite_models.hpp"

#include <bit>
#include <cmath>

#include "ids/errors.hpp"

namespace ids {

FiniteModel revealing_action_model(std::size_t k) {
  if (k < 1) throw InputError("revealing-action model needs K >= 1");
  const std::size_t actions = k + 1;
  const std::size_t outcomes = k + 2;
  std::vector<double> rewards(outcomes, 0.0);
  rewards[1] = 1.0;
  for (std::size_t i = 1; i <= k; ++i) rewards[1 + i] = 1.0 / (2.0 * static_cast<double>(i));
  std::vector<double> probs(k * actions * outcomes, 0.0);
  for (std::size_t h = 0; h < k; ++h) {
    const std::size_t i = h + 1;
    for (std::size_t j = 0; j < actions; ++j) {
      std::size_t o = 0;
      if (j == 0) {
        o = 1 + i;
      } else if (j == i) {
        o = 1;
      }
      probs[(h * actions + j) * outcomes + o] = 1.0;
    }
  }
  return FiniteModel(std::vector<double>(k, 1.0 / static_cast<double>(k)), actions, outcomes,
                     std::move(probs), std::move(rewards));
}

FiniteModel sparse_linear_model(std::size_t d) {
  if (d < 1 || d > 16) throw InputError("sparse linear model needs 1 <= d <= 16");
  const std::size_t actions = (std::size_t{1} << d) - 1;
  std::vector<double> rewards(actions * 2, 0.0);
  std::vector<double> probs(d * actions * 2, 0.0);
  for (std::size_t mask = 1; mask <= actions; ++mask) {
    const std::size_t a = mask - 1;
    rewards[a * 2 + 1] = 1.0 / std::popcount(mask);
    for (std::size_t h = 0; h < d; ++h) {
      const bool hit = (mask >> h) & 1U;
      probs[(h * actions + a) * 2 + (hit ? 1 : 0)] = 1.0;
    }
  }
  return FiniteModel(std::vector<double>(d, 1.0 / static_cast<double>(d)), actions, 2,
                     std::move(probs), std::move(rewards));
}

FiniteModel sparse_linear_reduced_model(std::size_t d) {
  if (d < 1) throw InputError("sparse linear model needs d >= 1");
  // Actions 0..d-1 are the singletons; action d+s-2 is the prefix {0..s-1}
  // for s = 2..d.
  const std::size_t actions = 2 * d - 1;
  std::vector<double> rewards(actions * 2, 0.0);
  std::vector<double> probs(d * actions * 2, 0.0);
  for (std::size_t a = 0; a < actions; ++a) {
    const std::size_t size = a < d ? 1 : a - d + 2;
    rewards[a * 2 + 1] = 1.0 / static_cast<double>(size);
    for (std::size_t h = 0; h < d; ++h) {
      const bool hit = a < d ? h == a : h < size;
      probs[(h * actions + a) * 2 + (hit ? 1 : 0)] = 1.0;
    }
  }
  return FiniteModel(std::vector<double>(d, 1.0 / static_cast<double>(d)), actions, 2,
                     std::move(probs), std::move(rewards));
}

std::vector<unsigned> semi_bandit_actions(std::size_t d, std::size_t m) {
  std::vector<unsigned> out;
  std::vector<std::size_t> pick(m);
  for (std::size_t i = 0; i < m; ++i) pick[i] = i;
  if (m == 0 || m > d) return out;
  while (true) {
    unsigned mask = 0;
    for (std::size_t i : pick) mask |= 1U << i;
    out.push_back(mask);
    std::size_t i = m;
    while (i > 0 && pick[i - 1] == d - m + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < m; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

FiniteModel semi_bandit_model(const std::vector<std::vector<double>>& values,
                              const std::vector<std::vector<double>>& weights,
                              std::size_t m) {
  const std::size_t d = values.size();
  if (d == 0 || d > 12 || weights.size() != d) {
    throw InputError("semi-bandit model needs 1 <= d <= 12 components with weights");
  }
  if (m < 1 || m > d) throw InputError("semi-bandit model needs 1 <= m <= d");
  std::size_t hyps = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (values[i].empty() || values[i].size() != weights[i].size()) {
      throw InputError("component value and weight lists must match");
    }
    hyps *= values[i].size();
  }
  const std::vector<unsigned> action_masks = semi_bandit_actions(d, m);
  const std::size_t actions = action_masks.size();
  const std::size_t outcomes = std::size_t{1} << m;

  std::vector<double> rewards(actions * outcomes);
  for (std::size_t a = 0; a < actions; ++a) {
    for (std::size_t o = 0; o < outcomes; ++o) {
      rewards[a * outcomes + o] =
          (static_cast<double>(std::popcount(o)) - 0.5 * static_cast<double>(m)) /
          static_cast<double>(m);
    }
  }

  std::vector<double> prior(hyps);
  std::vector<double> probs(hyps * actions * outcomes);
  std::vector<std::size_t> digit(d);
  std::vector<double> p(d);
  for (std::size_t h = 0; h < hyps; ++h) {
    std::size_t rest = h;
    double w = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      digit[i] = rest % values[i].size();
      rest /= values[i].size();
      w *= weights[i][digit[i]];
      p[i] = values[i][digit[i]];
    }
    prior[h] = w;
    for (std::size_t a = 0; a < actions; ++a) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < d; ++i) {
        if ((action_masks[a] >> i) & 1U) members.push_back(i);
      }
      for (std::size_t o = 0; o < outcomes; ++o) {
        double q = 1.0;
        for (std::size_t b = 0; b < m; ++b) {
          const double pi = p[members[b]];
          q *= ((o >> b) & 1U) ? pi : 1.0 - pi;
        }
        probs[(h * actions + a) * outcomes + o] = q;
      }
    }
  }
  // Row sums are products of exact binary sums; renormalize away rounding.
  for (std::size_t r = 0; r < hyps * actions; ++r) {
    double s = 0.0;
    for (std::size_t o = 0; o < outcomes; ++o) s += probs[r * outcomes + o];
    for (std::size_t o = 0; o < outcomes; ++o) probs[r * outcomes + o] /= s;
  }
  return FiniteModel(std::move(prior), actions, outcomes, std::move(probs), std::move(rewards));
}

FiniteModel randomization_example_model(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("p must lie in (0, 1)");
  // Hypothesis 0: a_2 ~ Bernoulli(3/4); hypothesis 1: a_2 ~ Bernoulli(1/4).
  std::vector<double> probs = {0.5, 0.5, 0.25, 0.75,   //
                               0.5, 0.5, 0.75, 0.25};
  return FiniteModel({p, 1.0 - p}, 2, 2, std::move(probs), {0.0, 1.0});
}

FiniteModel kg_independence_example_model() {
  const double t1[2] = {0.6, 0.4};
  const double t2[2] = {0.7, 0.5};
  std::vector<double> probs;
  for (double a : t1) {
    for (double b : t2) {
      probs.insert(probs.end(), {1.0 - a, a, 1.0 - b, b});
    }
  }
  return FiniteModel({0.25, 0.25, 0.25, 0.25}, 2, 2, std::move(probs), {0.0, 1.0});
}

std::vector<double> dirichlet_draw(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  double total = 0.0;
  for (double& x : v) {
    x = -std::log(1.0 - uniform01(rng));
    total += x;
  }
  for (double& x : v) x /= total;
  // Absorb rounding so each row sums to 1 within 1e-12.
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) s += v[i];
  v[n - 1] = std::max(0.0, 1.0 - s);
  return v;
}

FiniteModel random_finite_model(Rng& rng, std::size_t k, std::size_t h, std::size_t o) {
  std::vector<double> probs;
  for (std::size_t r = 0; r < h * k; ++r) {
    const std::vector<double> row = dirichlet_draw(rng, o);
    probs.insert(probs.end(), row.begin(), row.end());
  }
  std::vector<double> rewards(o);
  for (double& r : rewards) r = uniform01(rng);
  return FiniteModel(dirichlet_draw(rng, h), k, o, std::move(probs), std::move(rewards));
}

FiniteModel random_full_info_model(Rng& rng, std::size_t k, std::size_t h, std::size_t o) {
  std::vector<double> probs;
  for (std::size_t hyp = 0; hyp < h; ++hyp) {
    const std::vector<double> row = dirichlet_draw(rng, o);
    for (std::size_t a = 0; a < k; ++a) probs.insert(probs.end(), row.begin(), row.end());
  }
  std::vector<double> rewards(k * o);
  for (double& r : rewards) r = uniform01(rng);
  return FiniteModel(dirichlet_draw(rng, h), k, o, std::move(probs), std::move(rewards));
}

FiniteModel random_linear_model(Rng& rng, std::size_t d, std::size_t k, std::size_t h) {
  std::vector<std::vector<double>> features(k);
  for (auto& f : features) f = dirichlet_draw(rng, d);
  std::vector<double> probs;
  for (std::size_t hyp = 0; hyp < h; ++hyp) {
    std::vector<double> theta(d);
    for (double& t : theta) t = uniform01(rng);
    for (std::size_t a = 0; a < k; ++a) {
      double mean = 0.0;
      for (std::size_t j = 0; j < d; ++j) mean += features[a][j] * theta[j];
      mean = std::min(1.0, std::max(0.0, mean));
      probs.insert(probs.end(), {1.0 - mean, mean});
    }
  }
  return FiniteModel(dirichlet_draw(rng, h), k, 2, std::move(probs), {0.0, 1.0});
}

FiniteModel random_semi_bandit_model(Rng& rng, std::size_t d, std::size_t m) {
  std::vector<std::vector<double>> values(d), weights(d);
  for (std::size_t i = 0; i < d; ++i) {
    values[i] = {uniform01(rng), uniform01(rng)};
    const double w = 0.05 + 0.9 * uniform01(rng);
    weights[i] = {w, 1.0 - w};
  }
  return semi_bandit_model(values, weights, m);
}

}  // namespace ids
