#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ids/baselines.hpp"
#include "ids/errors.hpp"
#include "ids/finite_models.hpp"

using namespace ids;

namespace {

// E[max_i(a_i + b_i Z)] - max a by composite Simpson in z over [-12, 12].
double envelope_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  const int n = 200000;
  const double lo = -12.0, h = 24.0 / n;
  double s = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double z = lo + h * k;
    double m = -1e300;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, a[i] + b[i] * z);
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    s += w * m * std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
  }
  return s * h / 3.0 - *std::max_element(a.begin(), a.end());
}

double bisect_quantile(double (*cdf)(double), double level) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

FrequentistArmStats stats_of(std::vector<std::size_t> counts, std::vector<double> means) {
  FrequentistArmStats s = FrequentistArmStats::empty(counts.size());
  s.counts = std::move(counts);
  s.means = std::move(means);
  for (std::size_t i = 0; i < s.arms(); ++i) {
    // Variance 1/8 where a count is positive.
    s.sum_squares[i] = static_cast<double>(s.counts[i]) * (s.means[i] * s.means[i] + 0.125);
  }
  return s;
}

}  // namespace

TEST_CASE("frequentist arm stats") {
  FrequentistArmStats s = FrequentistArmStats::empty(2);
  for (double r : {1.0, 0.0, 1.0, 1.0}) s.record(1, r);
  CHECK(s.counts[1] == 4);
  CHECK(s.means[1] == doctest::Approx(0.75));
  CHECK(s.variance(1) == doctest::Approx(0.1875));
  CHECK(s.variance(0) == 0.0);
  CHECK_THROWS_AS(s.record(2, 1.0), InputError);
}

TEST_CASE("ucb1") {
  CHECK(ucb1_action(stats_of({3, 0, 0}, {0.9, 0, 0}), 4) == 1);
  const double b1 = 0.5 + std::sqrt(2 * std::log(12.0) / 10);
  const double b2 = 0.4 + std::sqrt(2 * std::log(12.0) / 2);
  CHECK(b1 == doctest::Approx(1.205).epsilon(1e-3));
  CHECK(b2 == doctest::Approx(1.976).epsilon(1e-3));
  CHECK(ucb1_action(stats_of({10, 2}, {0.5, 0.4}), 12) == 1);
  CHECK(ucb1_action(stats_of({1000000, 1000000}, {0.5, 0.4}), 2000000) == 0);
  CHECK(ucb1_action(stats_of({5, 5}, {0.5, 0.5}), 10) == 0);
  CHECK_THROWS_AS(ucb1_action(stats_of({1}, {0.5}), 0), InputError);
}

TEST_CASE("ucb tuned") {
  CHECK(ucb_tuned_action(stats_of({0, 4}, {0, 1}), 5) == 0);
  // Identical rewards: variance 0, exploration comes from sqrt(2 log t / N).
  FrequentistArmStats same = FrequentistArmStats::empty(2);
  for (int i = 0; i < 50; ++i) same.record(0, 1.0);
  for (int i = 0; i < 2; ++i) same.record(1, 0.9);
  CHECK(same.variance(0) == 0.0);
  const double log_t = std::log(52.0);
  const double b0 = 1.0 + std::sqrt(std::min(0.25, std::sqrt(2 * log_t / 50)) * log_t / 50);
  const double b1 = 0.9 + std::sqrt(std::min(0.25, same.variance(1) + std::sqrt(2 * log_t / 2)) * log_t / 2);
  CHECK(ucb_tuned_action(same, 52) == (b1 > b0 ? 1 : 0));
  // With the 1/4 cap binding the rule is UCB1 with 1/4 in place of 2.
  const auto s = stats_of({10, 2}, {0.5, 0.4});
  const double c0 = 0.5 + std::sqrt(0.25 * std::log(12.0) / 10);
  const double c1 = 0.4 + std::sqrt(0.25 * std::log(12.0) / 2);
  CHECK(ucb_tuned_action(s, 12) == (c1 > c0 ? 1 : 0));
}

TEST_CASE("moss") {
  CHECK(moss_action(stats_of({1, 0}, {0.5, 0}), 100) == 1);
  CHECK(std::sqrt(std::log(500.0)) == doctest::Approx(2.49).epsilon(1e-2));
  CHECK(moss_action(stats_of({50, 1}, {0.5, 0.4}), 1000) == 1);
  // N >= T/K everywhere: the bonus vanishes.
  CHECK(moss_action(stats_of({600, 500}, {0.4, 0.5}), 1000) == 1);
  CHECK(moss_action(stats_of({600, 500}, {0.5, 0.4}), 1000) == 0);
}

TEST_CASE("bayes ucb") {
  CHECK(bayes_ucb_level(1) == 1e-9);
  CHECK(bayes_ucb_level(10) == doctest::Approx(0.9));
  BetaPosterior p{{2, 1}, {1, 2}};
  const std::vector<double> q = bayes_ucb_indices(p, 10);
  CHECK(q[0] == doctest::Approx(std::sqrt(0.9)).epsilon(1e-10));
  CHECK(q[1] == doctest::Approx(1 - std::sqrt(0.1)).epsilon(1e-10));
  CHECK(q[0] == doctest::Approx(bisect_quantile([](double x) { return x * x; }, 0.9)).epsilon(1e-10));
  CHECK(q[1] == doctest::Approx(bisect_quantile([](double x) { return 1 - (1 - x) * (1 - x); }, 0.9))
                    .epsilon(1e-10));
  CHECK(bayes_ucb_action(p, 10) == 0);
  const std::vector<double> u = bayes_ucb_indices(BetaPosterior::uniform_prior(3), 1000);
  for (double v : u) CHECK(v == doctest::Approx(0.999).epsilon(1e-10));
  CHECK(bayes_ucb_action(BetaPosterior::uniform_prior(3), 1000) == 0);

  GaussianPosterior g{{0.0, 1.0}, {2.0, 0.5}, 1.0};
  const std::vector<double> gq = bayes_ucb_indices(g, 40);
  // Phi^{-1}(0.975) = 1.959963985
  CHECK(gq[0] == doctest::Approx(2.0 * 1.959963984540054).epsilon(1e-12));
  CHECK(gq[1] == doctest::Approx(1.0 + 0.5 * 1.959963984540054).epsilon(1e-12));
  CHECK(bayes_ucb_action(g, 40) == 0);
}

TEST_CASE("gpucb") {
  // 2 log(10 * 10^4 * pi^2 / 6)
  CHECK(gpucb_beta(10, 100, {}) == doctest::Approx(24.0213).epsilon(1e-5));
  CHECK(gpucb_beta(1, 100, {}) == doctest::Approx(19.4161).epsilon(1e-5));
  CHECK(gpucb_beta(10, 100, {true, 0.9}) == doctest::Approx(4.1447).epsilon(1e-4));
  CHECK(gpucb_beta(10, 1, {true, 0.9}) == 0.0);
  GaussianPosterior same{{0.2, 0.2, 0.2}, {1, 1, 1}, 1.0};
  CHECK(gpucb_action(same, 5, {}) == 0);
  GaussianPosterior g{{0.5, 0.0}, {0.1, 1.0}, 1.0};
  CHECK(gpucb_action(g, 1, {true, 0.9}) == 0);  // beta = 0: greedy
  CHECK(gpucb_action(g, 1, {}) == 1);
}

TEST_CASE("linear index policies use a'mu and sqrt(a' Sigma a)") {
  LinearGaussianPosterior post = LinearGaussianPosterior::isotropic_prior(2, 1.0, 1.0);
  post.mean << 1.0, 0.0;
  post.covariance << 0.01, 0.0, 0.0, 4.0;
  ActionMatrix x{Eigen::MatrixXd(2, 2)};
  x.rows << 1.0, 0.0, 0.0, 1.0;
  // Index of action 1 is 2 * z, of action 0 is 1 + 0.1 * z.
  CHECK(bayes_ucb_action(post, x, 2) == 0);     // level .5, z = 0
  CHECK(bayes_ucb_action(post, x, 100) == 1);  // z = 2.33
  CHECK(gpucb_action(post, x, 1, {true, 0.9}) == 0);
  CHECK(gpucb_action(post, x, 100, {true, 0.9}) == 1);
}

TEST_CASE("thompson sampling") {
  Rng rng{51};
  BetaPosterior point{{1e9, 1}, {1, 1e9}};
  for (int i = 0; i < 100; ++i) CHECK(thompson_action(point, rng) == 0);

  const int n = 100000;
  int first = 0;
  for (int i = 0; i < n; ++i) first += thompson_action(BetaPosterior::uniform_prior(2), rng) == 0;
  CHECK(std::abs(first - n / 2) < 4 * std::sqrt(n * 0.25));

  const FiniteModel rev = revealing_action_model(5);
  for (int i = 0; i < 1000; ++i) CHECK(thompson_action(rev, rng) != 0);

  // Selection frequencies match the optimal-action distribution.
  for (int m = 0; m < 3; ++m) {
    const FiniteModel f = random_finite_model(rng, 4, 6, 3);
    const ActionDistribution alpha = exact_alpha(f);
    std::vector<int> hits(4, 0);
    for (int i = 0; i < n; ++i) ++hits[thompson_action(f, rng)];
    for (std::size_t a = 0; a < 4; ++a) {
      const double se = std::sqrt(n * alpha[a] * (1 - alpha[a]));
      CHECK(std::abs(hits[a] - n * alpha[a]) <= 4 * se + 1e-9);
    }
  }
  BetaPosterior b{{3, 2, 5}, {2, 2, 6}};
  const IdsStats st = beta_ids_stats(b);
  std::vector<int> hits(3, 0);
  for (int i = 0; i < n; ++i) ++hits[thompson_action(b, rng)];
  for (std::size_t a = 0; a < 3; ++a) {
    CHECK(std::abs(hits[a] - n * st.alpha[a]) <= 4 * std::sqrt(n * st.alpha[a] * (1 - st.alpha[a])));
  }
  GaussianPosterior g{{0, 0.5}, {1, 1}, 1};
  int g1 = 0;
  for (int i = 0; i < n; ++i) g1 += thompson_action(g, rng) == 1;
  const double p1 = normal_cdf(0.5 / std::sqrt(2.0));
  CHECK(std::abs(g1 - n * p1) <= 4 * std::sqrt(n * p1 * (1 - p1)));
}

TEST_CASE("expected_max_improvement matches integration") {
  CHECK(expected_max_improvement({0, 0}, {0, 1}) == doctest::Approx(1 / std::sqrt(2 * M_PI)));
  CHECK(expected_max_improvement({1, 2}, {0, 0}) == 0.0);
  Rng rng{52};
  for (int n = 0; n < 60; ++n) {
    const std::size_t k = 1 + n % 7;
    std::vector<double> a(k), b(k);
    for (std::size_t i = 0; i < k; ++i) {
      a[i] = 2 * uniform01(rng) - 1;
      b[i] = 3 * uniform01(rng) - 1.5;
      if (n % 3 == 0 && i > 0) b[i] = b[i - 1];  // repeated slopes
      if (n % 5 == 0 && i > 0) a[i] = a[i - 1];  // repeated intercepts
    }
    CHECK(expected_max_improvement(a, b) == doctest::Approx(envelope_oracle(a, b)).epsilon(1e-7));
  }
}

TEST_CASE("gaussian KG closed form equals the envelope") {
  Rng rng{53};
  for (int n = 0; n < 50; ++n) {
    GaussianPosterior g{{}, {}, 0.5 + uniform01(rng)};
    for (int i = 0; i < 4; ++i) {
      g.means.push_back(standard_normal(rng));
      g.stddevs.push_back(0.1 + uniform01(rng));
    }
    const std::vector<double> f = kg_factors(g);
    for (std::size_t a = 0; a < 4; ++a) {
      std::vector<double> slope(4, 0.0);
      const double v = g.stddevs[a] * g.stddevs[a];
      slope[a] = v / std::sqrt(v + g.noise_stddev * g.noise_stddev);
      CHECK(f[a] == doctest::Approx(expected_max_improvement(g.means, slope)).epsilon(1e-12));
    }
  }
}

TEST_CASE("linear KG equals the lookahead over the rank-one update") {
  Rng rng{54};
  for (int n = 0; n < 10; ++n) {
    LinearGaussianPosterior post = LinearGaussianPosterior::isotropic_prior(3, 2.0, 1.0);
    for (int i = 0; i < 5; ++i) {
      Eigen::VectorXd x(3);
      for (int j = 0; j < 3; ++j) x(j) = standard_normal(rng);
      post = linear_gaussian_update(post, x, standard_normal(rng));
    }
    ActionMatrix x{Eigen::MatrixXd(6, 3)};
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 3; ++j) x.rows(i, j) = 2 * uniform01(rng) - 1;
    const std::vector<double> f = kg_factors(post, x);
    const std::vector<double> mu = posterior_means(post, x);
    const double best = *std::max_element(mu.begin(), mu.end());
    for (int a = 0; a < 6; ++a) {
      const Eigen::VectorXd xa = x.rows.row(a).transpose();
      const double pred_sd = std::sqrt(xa.dot(post.covariance * xa) + post.noise_variance);
      // E[max posterior mean reward after observing action a] by Simpson in z.
      const int m = 40000;
      const double h = 20.0 / m;
      double s = 0.0;
      for (int k = 0; k <= m; ++k) {
        const double z = -10.0 + h * k;
        const auto next = linear_gaussian_update(post, xa, xa.dot(post.mean) + pred_sd * z);
        const Eigen::VectorXd r = x.rows * next.mean;
        const double w = (k == 0 || k == m) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        s += w * r.maxCoeff() * std::exp(-0.5 * z * z) / std::sqrt(2 * M_PI);
      }
      CHECK(f[static_cast<std::size_t>(a)] == doctest::Approx(s * h / 3 - best).epsilon(1e-6));
    }
  }
}

TEST_CASE("bernoulli KG") {
  // Known arm at .51 against Beta(1, F): one sample can never flip the choice.
  for (double F : {2.0, 3.0, 10.0}) {
    const double m = 1 / (1 + F);
    const std::vector<double> f =
        bernoulli_kg_factors({0.51, m}, {0.51, 2 / (2 + F)}, {0.51, 1 / (2 + F)});
    CHECK(f[0] == 0.0);
    CHECK(f[1] == 0.0);
    for (std::size_t t = 1; t <= 100; ++t) CHECK(kg_choice({0.51, m}, f, t, 100) == 0);
  }
  // Beta(1, 1): success lifts the mean to 2/3 above .51.
  const std::vector<double> g = bernoulli_kg_factors({0.51, 0.5}, {0.51, 2.0 / 3}, {0.51, 1.0 / 3});
  CHECK(g[1] == doctest::Approx(0.5 * 2.0 / 3 + 0.5 * 0.51 - 0.51).epsilon(1e-14));

  // Two-successor enumeration through beta_update.
  BetaPosterior p{{2, 5, 1}, {3, 4, 1}};
  const std::vector<double> f = kg_factors(p);
  const std::vector<double> base = posterior_means(p);
  const double v = *std::max_element(base.begin(), base.end());
  for (std::size_t a = 0; a < 3; ++a) {
    const double pa = p.mean(a);
    const auto up = posterior_means(beta_update(p, a, 1));
    const auto down = posterior_means(beta_update(p, a, 0));
    const double next = pa * *std::max_element(up.begin(), up.end()) +
                        (1 - pa) * *std::max_element(down.begin(), down.end());
    CHECK(f[a] == doctest::Approx(next - v).epsilon(1e-14));
  }
  // Last period: greedy.
  CHECK(kg_choice({0.1, 0.7, 0.3}, {5, 0, 5}, 9, 9) == 1);
  CHECK(kg_choice({0.1, 0.7, 0.3}, {5, 0, 5}, 8, 9) == 2);
  CHECK_THROWS_AS(kg_choice({0.1}, {0.0}, 10, 9), InputError);
}

TEST_CASE("property: index policies commute with arm permutations") {
  Rng rng{55};
  for (int n = 0; n < 300; ++n) {
    const std::size_t k = 2 + n % 5;
    FrequentistArmStats s = FrequentistArmStats::empty(k);
    for (int t = 0; t < 30; ++t) {
      s.record(static_cast<std::size_t>(uniform01(rng) * k), uniform01(rng));
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (s.counts[i] == 0) s.record(i, uniform01(rng));
    }
    BetaPosterior b{{}, {}};
    GaussianPosterior g{{}, {}, 1.0};
    for (std::size_t i = 0; i < k; ++i) {
      b.alpha_params.push_back(1 + 10 * uniform01(rng));
      b.beta_params.push_back(1 + 10 * uniform01(rng));
      g.means.push_back(standard_normal(rng));
      g.stddevs.push_back(0.2 + uniform01(rng));
    }
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    FrequentistArmStats ps = FrequentistArmStats::empty(k);
    BetaPosterior pb = b;
    GaussianPosterior pg = g;
    for (std::size_t i = 0; i < k; ++i) {
      ps.counts[i] = s.counts[perm[i]];
      ps.means[i] = s.means[perm[i]];
      ps.sum_squares[i] = s.sum_squares[perm[i]];
      pb.alpha_params[i] = b.alpha_params[perm[i]];
      pb.beta_params[i] = b.beta_params[perm[i]];
      pg.means[i] = g.means[perm[i]];
      pg.stddevs[i] = g.stddevs[perm[i]];
    }
    const std::size_t t = 31 + k;
    CHECK(perm[ucb1_action(ps, t)] == ucb1_action(s, t));
    CHECK(perm[ucb_tuned_action(ps, t)] == ucb_tuned_action(s, t));
    CHECK(perm[moss_action(ps, 1000)] == moss_action(s, 1000));
    CHECK(perm[bayes_ucb_action(pb, t)] == bayes_ucb_action(b, t));
    CHECK(perm[gpucb_action(pg, t, {})] == gpucb_action(g, t, {}));
    const auto kb = kg_factors(pb), kb0 = kg_factors(b);
    for (std::size_t i = 0; i < k; ++i) CHECK(kb[i] == doctest::Approx(kb0[perm[i]]).epsilon(1e-14));
  }
}
