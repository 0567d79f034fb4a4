#include <doctest.h>

#include <cmath>

#include "ids/diagnostics.hpp"
#include "ids/errors.hpp"
#include "ids/finite_models.hpp"
#include "json.hpp"

using namespace ids;

namespace {

double kl_oracle(double p, double q) {
  return p * std::log(p / q) + (1 - p) * std::log((1 - p) / (1 - q));
}

PolicyResult fake_result(double mean, double se, double ratio) {
  PolicyResult r;
  r.policy = "ids";
  r.mean_regret = mean;
  r.std_error = se;
  r.mean_ratio = ratio;
  return r;
}

}  // namespace

TEST_CASE("bound report tolerance semantics") {
  CHECK(make_report("x", 1.0, 1.0, 0.0, "").satisfied);
  CHECK(make_report("x", 1.5, 1.0, 0.5, "").satisfied);
  CHECK_FALSE(make_report("x", 1.5 + 1e-12, 1.0, 0.5, "").satisfied);
  CHECK_FALSE(make_report("x", std::nan(""), 1.0, 0.5, "").satisfied);
  const auto doc = nlohmann::json::parse(
      reports_json("demo", {make_report("a", 1.0, 2.0, 0.0, "ctx"), make_report("b", INFINITY, 0, 0, "")}));
  CHECK(doc["suite"] == "demo");
  CHECK(doc["satisfied"] == false);
  CHECK(doc["reports"][1]["lhs"] == "inf");
}

TEST_CASE("Lai-Robbins constant as printed") {
  const double expected = 0.3 / (kl_oracle(0.3, 0.2) + kl_oracle(0.3, 0.1));
  CHECK(lai_robbins_constant({0.3, 0.2, 0.1}) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(lai_robbins_constant({0.3, 0.2, 0.1}) == doctest::Approx(1.6499).epsilon(1e-4));
  CHECK(lai_robbins_constant({0.1, 0.3, 0.2}) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(lai_robbins_constant({1.0, 0.0}) == 0.0);
  CHECK(lai_robbins_constant({0.5, 0.5 - 1e-3}) > 0.0);
  CHECK_THROWS_AS(lai_robbins_constant({0.3, 0.3, 0.1}), InputError);
  CHECK_THROWS_AS(lai_robbins_constant({0.3}), InputError);
}

TEST_CASE("regret certificate arithmetic") {
  const BoundReport r = check_regret_bound(fake_result(18.16, 0.55, 0.3), 5.0, std::log(10.0), 1000);
  CHECK(r.rhs == doctest::Approx(std::sqrt(5.0 * std::log(10.0) * 1000.0)));
  CHECK(r.rhs == doctest::Approx(107.3).epsilon(1e-3));
  CHECK(r.tol == doctest::Approx(1.65));
  CHECK(r.satisfied);
  const BoundReport zero = check_regret_bound(fake_result(0.0, 0.0, 0.0), 5.0, 0.0, 1000);
  CHECK(zero.rhs == 0.0);
  CHECK(zero.satisfied);
  CHECK_FALSE(check_regret_bound(fake_result(200.0, 1.0, 0.3), 5.0, std::log(10.0), 1000).satisfied);
  CHECK_THROWS_AS(check_regret_bound(fake_result(1.0, 0.1, std::nan("")), 5.0, 1.0, 10), InputError);
  const BoundReport avg = check_average_ratio_bound(fake_result(10.0, 0.5, 0.25), std::log(4.0), 100);
  CHECK(avg.rhs == doctest::Approx(std::sqrt(0.25 * std::log(4.0) * 100.0)));
}

TEST_CASE("regret certificate holds on the experiment families at small scale") {
  const auto reports = regret_bound_suite(20, 30, 5);
  CHECK(reports.size() == 6);
  for (const BoundReport& r : reports) {
    CAPTURE(r.context);
    CHECK(r.satisfied);
  }
}

TEST_CASE("information ratio suites") {
  const auto reports = info_ratio_suite(25, 12, 3);
  CHECK(reports.size() >= 90);
  for (const BoundReport& r : reports) {
    CAPTURE(r.context);
    CHECK(r.satisfied);
    CHECK(r.lhs >= 0.0);
  }
  // The sparse example at d = 4 sits well inside the d/2 bound.
  Rng rng(1);
  const auto sparse = check_info_ratio_bounds(sparse_linear_model(4), 2.0, 1, rng, "sparse");
  REQUIRE(sparse.size() == 1);
  CHECK(sparse[0].lhs == doctest::Approx(0.5625 / std::log(2.0)));
  CHECK(sparse[0].satisfied);
}

TEST_CASE("suites are reproducible from the seed") {
  const auto a = info_ratio_suite(6, 8, 11), b = info_ratio_suite(6, 8, 11);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].lhs == b[i].lhs);
    CHECK(a[i].context == b[i].context);
  }
}

TEST_CASE("randomization is necessary in the two-action example") {
  for (double p : {0.5, 0.1, 0.01, 0.001}) {
    CAPTURE(p);
    const auto reports = check_randomization_necessity(p);
    for (const BoundReport& r : reports) {
      CAPTURE(r.name);
      CAPTURE(r.context);
      CHECK(r.satisfied);
    }
  }
  // The informative point mass gets worse as p shrinks.
  const auto ratio_of_second = [](double p) {
    const IdsStats s = exact_ids_stats(randomization_example_model(p));
    return information_ratio(ActionDistribution::point_mass(2, 1), s.ratio_inputs());
  };
  CHECK(ratio_of_second(0.001) > ratio_of_second(0.01));
  CHECK(ratio_of_second(0.01) > ratio_of_second(0.1));
  CHECK_THROWS_AS(check_randomization_necessity(0.0), InputError);
}

TEST_CASE("pure exploration") {
  Rng rng(6);
  SUBCASE("revealing action resolves everything in one period") {
    const PureExplorationResult r = simulate_pure_exploration(revealing_action_model(6), 2, 50, rng);
    CHECK(r.mean_terminal == 0.0);
    CHECK(r.initial_entropy == doctest::Approx(std::log(6.0)));
  }
  SUBCASE("point-mass prior gives zero on both sides") {
    const FiniteModel m = revealing_action_model(4).with_weights({1.0, 0.0, 0.0, 0.0});
    // Every gain is zero, so the tie among maximizers goes to the lowest regret.
    const auto reports = check_pure_exploration(m, 2.5, 10, 20, rng, "point mass");
    for (const BoundReport& r : reports) {
      CHECK(r.lhs == 0.0);
      CHECK(r.rhs == 0.0);
      CHECK(r.satisfied);
    }
  }
  SUBCASE("random models") {
    for (const BoundReport& r : pure_exploration_suite(12, 20, 100, 9)) {
      CAPTURE(r.context);
      CHECK(r.satisfied);
    }
  }
}

TEST_CASE("sparse closed forms") {
  CHECK(sparse_ts_ratio_formula(4) == doctest::Approx(1.0003).epsilon(1e-4));
  CHECK(sparse_ids_ratio_formula(4) == doctest::Approx(0.8114).epsilon(1e-4));
  const auto r4 = sparse_ratio_reports({4});
  CHECK(all_satisfied(r4));
  // Beyond d = 4 the Thompson form still matches; the computed minimum is the
  // half-support ratio ((d-1)/d)^2 / log 2, not the printed log(d/2) form.
  const auto r8 = sparse_ratio_reports({8});
  CHECK(r8[0].satisfied);
  CHECK_FALSE(r8[1].satisfied);
  const IdsStats s = exact_ids_stats(sparse_linear_reduced_model(8));
  CHECK(ids_distribution(s.ratio_inputs()).ratio_value ==
        doctest::Approx(49.0 / 64.0 / std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(sparse_ratio_reports({2}), InputError);
}

TEST_CASE("knowledge gradient never leaves the known arm") {
  const KgExampleResult r = simulate_kg_example(0.51, 2.0, 10000);
  CHECK(r.known_arm_plays == 10000);
  CHECK(r.closed_form_constant == doctest::Approx(std::pow(0.49, 3) / 3.0).epsilon(1e-12));
  CHECK(r.quadrature_constant == doctest::Approx(std::pow(0.49, 3) / 3.0).epsilon(1e-12));
  CHECK(r.regret == doctest::Approx(10000.0 * std::pow(0.49, 3) / 3.0).epsilon(1e-12));
  CHECK(all_satisfied(kg_example_reports(10000)));
  // A flatter prior (F < 1 makes the uncertain arm look better) can move KG.
  CHECK(simulate_kg_example(0.51, 0.5, 50).known_arm_plays < 50);
}

TEST_CASE("revealing action comparison at small scale") {
  const RevealingComparison c = revealing_action_comparison({5, 10, 20}, 300, 40, 2);
  for (const BoundReport& r : revealing_reports(c)) {
    CAPTURE(r.context);
    CHECK(r.satisfied);
  }
  // IDS plays a_0 once, so its expected regret is 1 - E[1/(2i)] = 1 - H_K / (2K).
  for (std::size_t i = 0; i < 3; ++i) {
    double harmonic = 0.0;
    for (std::size_t j = 1; j <= c.ks[i]; ++j) harmonic += 1.0 / static_cast<double>(j);
    const double expected = 1.0 - harmonic / (2.0 * static_cast<double>(c.ks[i]));
    CHECK(std::abs(c.ids[i].mean_regret - expected) < 4.0 * c.ids[i].std_error);
  }
}
