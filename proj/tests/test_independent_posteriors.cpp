#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ids/errors.hpp"
#include "ids/independent_posteriors.hpp"
#include "ids/random.hpp"

using namespace ids;

namespace {

// Exact two-arm oracle for integer Beta parameters: every integrand is a
// polynomial, so the integrals reduce to coefficient arithmetic.
using Poly = std::vector<double>;  // coefficient of x^n at index n

Poly mul(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

Poly antiderivative(const Poly& a) {
  Poly c(a.size() + 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) c[i + 1] = a[i] / static_cast<double>(i + 1);
  return c;
}

double eval(const Poly& a, double x) {
  double v = 0;
  for (std::size_t i = a.size(); i-- > 0;) v = v * x + a[i];
  return v;
}

Poly beta_density_poly(int a, int b) {
  Poly p(static_cast<std::size_t>(a + b - 1), 0.0);
  const double norm = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b));
  double binom = 1;
  for (int k = 0; k <= b - 1; ++k) {
    p[static_cast<std::size_t>(a - 1 + k)] = norm * binom * (k % 2 ? -1 : 1);
    binom = binom * (b - 1 - k) / (k + 1);
  }
  return p;
}

struct TwoArmOracle {
  double alpha1 = 0, m11 = 0, m12 = 0, m21 = 0, m22 = 0;
};

TwoArmOracle two_arm_oracle(int a1, int b1, int a2, int b2) {
  const Poly f1 = beta_density_poly(a1, b1);
  const Poly f2 = beta_density_poly(a2, b2);
  const Poly F2 = antiderivative(f2);
  const Poly G2 = antiderivative(mul(f2, {0, 1}));
  const double mean1 = static_cast<double>(a1) / (a1 + b1);
  const double mean2 = static_cast<double>(a2) / (a2 + b2);
  const auto integral = [](const Poly& p) { return eval(antiderivative(p), 1.0); };
  TwoArmOracle o;
  o.alpha1 = integral(mul(f1, F2));
  const double x_f1_F2 = integral(mul(mul(f1, {0, 1}), F2));
  const double f1_G2 = integral(mul(f1, G2));
  o.m11 = x_f1_F2 / o.alpha1;
  o.m12 = f1_G2 / o.alpha1;
  o.m21 = (mean1 - x_f1_F2) / (1 - o.alpha1);
  o.m22 = (mean2 - f1_G2) / (1 - o.alpha1);
  return o;
}

BetaPosterior random_beta(Rng& rng, std::size_t k) {
  BetaPosterior p;
  for (std::size_t i = 0; i < k; ++i) {
    p.alpha_params.push_back(1.0 + std::floor(40 * uniform01(rng)));
    p.beta_params.push_back(1.0 + std::floor(40 * uniform01(rng)));
  }
  return p;
}

double mean_of(const BetaPosterior& p, std::size_t i) { return p.mean(i); }

}  // namespace

TEST_CASE("beta_ids_stats: symmetric uniform arms") {
  const IdsStats s = beta_ids_stats(BetaPosterior::uniform_prior(2));
  CHECK(s.alpha[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(s.delta[0] == doctest::Approx(s.delta[1]).epsilon(1e-12));
  CHECK(s.gain[0] == doctest::Approx(s.gain[1]).epsilon(1e-12));
  // E[max of two uniforms] = 2/3.
  CHECK(s.rho_star == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("beta_ids_stats: Beta(2,1) vs Beta(1,2)") {
  const BetaPosterior post{{2, 1}, {1, 2}};
  const IdsStats s = beta_ids_stats(post);
  CHECK(s.alpha[0] == doctest::Approx(5.0 / 6.0).epsilon(1e-6));

  Rng rng{21};
  const int n = 4000000;
  int wins = 0;
  for (int i = 0; i < n; ++i) {
    if (beta_draw(rng, 2, 1) > beta_draw(rng, 1, 2)) ++wins;
  }
  const double p = static_cast<double>(wins) / n;
  CHECK(std::abs(p - s.alpha[0]) < 4 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("beta_ids_stats: single arm") {
  const IdsStats s = beta_ids_stats(BetaPosterior{{3}, {2}});
  CHECK(s.alpha[0] == 1.0);
  CHECK(s.delta[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s.gain[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s.rho_star == doctest::Approx(0.6).epsilon(1e-9));
}

TEST_CASE("beta_ids_stats: conditional means and gain against exact polynomial integrals") {
  const int a1 = 3, b1 = 2, a2 = 5, b2 = 4;
  const BetaPosterior post{{double(a1), double(a2)}, {double(b1), double(b2)}};
  const IdsStats s = beta_ids_stats(post);
  const TwoArmOracle o = two_arm_oracle(a1, b1, a2, b2);
  CHECK(s.alpha[0] == doctest::Approx(o.alpha1).epsilon(1e-8));
  CHECK(s.cond_means(0, 0) == doctest::Approx(o.m11).epsilon(1e-8));
  CHECK(s.cond_means(0, 1) == doctest::Approx(o.m12).epsilon(1e-8));
  CHECK(s.cond_means(1, 0) == doctest::Approx(o.m21).epsilon(1e-8));
  CHECK(s.cond_means(1, 1) == doctest::Approx(o.m22).epsilon(1e-8));

  const double mean1 = a1 / double(a1 + b1);
  const double mean2 = a2 / double(a2 + b2);
  const auto kl = [](double p, double q) {
    return p * std::log(p / q) + (1 - p) * std::log((1 - p) / (1 - q));
  };
  const double g1 = o.alpha1 * kl(o.m11, mean1) + (1 - o.alpha1) * kl(o.m21, mean1);
  const double g2 = o.alpha1 * kl(o.m12, mean2) + (1 - o.alpha1) * kl(o.m22, mean2);
  CHECK(s.gain[0] == doctest::Approx(g1).epsilon(1e-6));
  CHECK(s.gain[1] == doctest::Approx(g2).epsilon(1e-6));

  const IdsStats me = beta_ids_stats(post, kDefaultGridSize, GainKind::mean_based);
  const double me1 = o.alpha1 * std::pow(o.m11 - mean1, 2) +
                     (1 - o.alpha1) * std::pow(o.m21 - mean1, 2);
  CHECK(me.gain[0] == doctest::Approx(me1).epsilon(1e-6));
}

TEST_CASE("property: quadrature identities on random Beta posteriors") {
  Rng rng{22};
  for (int n = 0; n < 40; ++n) {
    const std::size_t k = 2 + n % 6;
    const BetaPosterior post = random_beta(rng, k);
    const IdsStats s = beta_ids_stats(post);
    double asum = 0, diag = 0;
    for (std::size_t i = 0; i < k; ++i) {
      asum += s.alpha[i];
      diag += s.alpha[i] * s.cond_means(i, i);
    }
    CHECK(asum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(diag == doctest::Approx(s.rho_star).epsilon(1e-8));
    for (std::size_t j = 0; j < k; ++j) {
      double tot = 0;
      for (std::size_t i = 0; i < k; ++i) tot += s.alpha[i] * s.cond_means(i, j);
      CHECK(std::abs(tot - mean_of(post, j)) <= 1e-6);
      CHECK(s.delta[j] >= -1e-9);
      CHECK(s.gain[j] >= 0.0);
      CHECK(s.cond_means(j, j) >= mean_of(post, j) - 1e-9);
    }
    double max_mean = 0;
    for (std::size_t j = 0; j < k; ++j) max_mean = std::max(max_mean, mean_of(post, j));
    CHECK(s.rho_star >= max_mean - 1e-9);

    const IdsStats fine = beta_ids_stats(post, 2 * kDefaultGridSize);
    for (std::size_t i = 0; i < k; ++i) CHECK(std::abs(fine.alpha[i] - s.alpha[i]) < 1e-6);
  }
}

TEST_CASE("BetaGridCache tracks fresh quadrature through updates") {
  Rng rng{23};
  BetaPosterior post = BetaPosterior::uniform_prior(5);
  BetaGridCache cache(post, kDefaultGridSize);
  for (int t = 0; t < 300; ++t) {
    const std::size_t arm = static_cast<std::size_t>(5 * uniform01(rng));
    post = beta_update(post, arm, uniform01(rng) < 0.4 ? 1 : 0);
    cache.set_arm(arm, post.alpha_params[arm], post.beta_params[arm]);
    if (t % 37 == 0 || t == 299) {
      const IdsStats a = cache.stats(GainKind::mutual_information);
      const IdsStats b = beta_ids_stats(post);
      for (std::size_t i = 0; i < 5; ++i) {
        CHECK(a.alpha[i] == doctest::Approx(b.alpha[i]).epsilon(1e-9));
        CHECK(a.gain[i] == doctest::Approx(b.gain[i]).epsilon(1e-7));
        CHECK(a.delta[i] == doctest::Approx(b.delta[i]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("beta posterior input validation and update") {
  CHECK_THROWS_AS(beta_ids_stats(BetaPosterior{{0}, {1}}), InputError);
  CHECK_THROWS_AS(beta_ids_stats(BetaPosterior::uniform_prior(2), 50), InputError);
  const BetaPosterior p = beta_update(BetaPosterior{{1, 3}, {1, 5}}, 1, 1);
  CHECK(p.alpha_params[1] == 4);
  CHECK(p.beta_params[1] == 5);
  CHECK(beta_update(BetaPosterior::uniform_prior(1), 0, 0).beta_params[0] == 2);
  CHECK_THROWS_AS(beta_update(BetaPosterior::uniform_prior(1), 0, 2), InputError);
  CHECK_THROWS_AS(beta_update(BetaPosterior::uniform_prior(1), 1, 1), InputError);
}

TEST_CASE("truncated_normal_mean") {
  CHECK(truncated_normal_mean(0, 1, 0) == doctest::Approx(-std::sqrt(2 / std::numbers::pi)));
  CHECK(std::abs(truncated_normal_mean(0, 1, 10)) < 1e-8);
  CHECK(truncated_normal_mean(1, 2, 1) ==
        doctest::Approx(1 - 2 * std::sqrt(2 / std::numbers::pi)));
  // Far lower tail: E[X | X <= x] approaches x from below.
  const double far = truncated_normal_mean(0, 1, -50);
  CHECK(far < -50);
  CHECK(far > -50.03);
  // Both sides of the switch to the asymptotic branch against the Mills-ratio
  // series E[X | X <= z] = z + 1/z - 2/z^3 + 10/z^5 for z -> -inf.
  for (double z : {-37.9, -38.1, -45.0}) {
    const double series = z + 1 / z - 2 / std::pow(z, 3) + 10 / std::pow(z, 5);
    CHECK(truncated_normal_mean(0, 1, z) == doctest::Approx(series).epsilon(1e-9));
  }
}

TEST_CASE("gaussian_ids_stats: two standard normal arms") {
  const IdsStats s = gaussian_ids_stats(GaussianPosterior::standard_prior(2));
  const double r = 1 / std::sqrt(std::numbers::pi);
  CHECK(s.alpha[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(s.rho_star == doctest::Approx(r).epsilon(1e-8));
  CHECK(s.cond_means(0, 0) == doctest::Approx(r).epsilon(1e-8));
  CHECK(s.cond_means(0, 1) == doctest::Approx(-r).epsilon(1e-8));
  CHECK(s.gain[0] == doctest::Approx(1 / std::numbers::pi).epsilon(1e-8));
  CHECK(s.gain[1] == doctest::Approx(1 / std::numbers::pi).epsilon(1e-8));
}

TEST_CASE("gaussian_ids_stats: dominance and symmetry") {
  const IdsStats dom = gaussian_ids_stats(GaussianPosterior{{0, 10}, {1, 1}, 1});
  CHECK(dom.alpha[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(dom.delta[1]) < 1e-6);
  const IdsStats sym = gaussian_ids_stats(GaussianPosterior::standard_prior(3));
  CHECK(sym.alpha[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  CHECK(sym.gain[0] == doctest::Approx(sym.gain[2]).epsilon(1e-9));
  CHECK_THROWS_AS(gaussian_ids_stats(GaussianPosterior{{0, 0}, {1, 0}, 1}), InputError);
}

TEST_CASE("gaussian_ids_stats against Monte Carlo") {
  const GaussianPosterior post{{0.2, -0.1, 0.5, 0.0}, {0.7, 1.2, 0.3, 0.9}, 1};
  const IdsStats s = gaussian_ids_stats(post);
  Rng rng{24};
  const int n = 1000000;
  std::vector<double> wins(4, 0), best_sum(4, 0);
  double max_sum = 0;
  for (int m = 0; m < n; ++m) {
    std::size_t best = 0;
    double xs[4];
    for (std::size_t i = 0; i < 4; ++i) {
      xs[i] = post.means[i] + post.stddevs[i] * standard_normal(rng);
      if (xs[i] > xs[best]) best = i;
    }
    wins[best] += 1;
    best_sum[best] += xs[0];
    max_sum += xs[best];
  }
  CHECK(std::abs(max_sum / n - s.rho_star) < 4 * 1.0 / std::sqrt(n));
  for (std::size_t i = 0; i < 4; ++i) {
    const double p = wins[i] / n;
    CHECK(std::abs(p - s.alpha[i]) < 4 * std::sqrt(p * (1 - p) / n) + 1e-6);
  }
  double total = 0;
  for (std::size_t i = 0; i < 4; ++i) total += s.alpha[i] * s.cond_means(i, 0);
  CHECK(total == doctest::Approx(0.2).epsilon(1e-6));
}

TEST_CASE("gaussian_update") {
  const GaussianPosterior p = gaussian_update(GaussianPosterior::standard_prior(1), 0, 2.0);
  CHECK(p.means[0] == doctest::Approx(1.0));
  CHECK(p.stddevs[0] == doctest::Approx(1 / std::sqrt(2.0)));
  const GaussianPosterior tight = gaussian_update(GaussianPosterior{{5}, {1e-6}, 1}, 0, -3);
  CHECK(tight.means[0] == doctest::Approx(5.0).epsilon(1e-9));
  const GaussianPosterior vague = gaussian_update(GaussianPosterior{{0}, {1}, 1e8}, 0, 4);
  CHECK(std::abs(vague.means[0]) < 1e-12);
  CHECK(vague.stddevs[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(gaussian_update(GaussianPosterior::standard_prior(1), 3, 0.0), InputError);
}

TEST_CASE("gains vanish when the optimal action is certain") {
  const IdsStats me = beta_ids_stats(BetaPosterior{{1}, {1}}, kDefaultGridSize,
                                     GainKind::mean_based);
  CHECK(me.gain[0] == 0.0);
  const IdsStats dom = gaussian_ids_stats(GaussianPosterior{{0, 10}, {0.5, 0.5}, 1});
  CHECK(std::abs(dom.gain[0]) < 1e-12);
  CHECK(std::abs(dom.gain[1]) < 1e-12);
}
