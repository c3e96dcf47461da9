#include "cspa/theory.hpp"

#include <doctest.h>

#include <random>

#include "oracles.hpp"

using cspa::CspaConfig;
using cspa::Dataset;
using cspa::LabelOracle;
using cspa::Vector;
using cspa::WeightMatrix;

namespace {

Dataset random_dataset(int k, int d, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Dataset ds;
  ds.num_classes = k;
  ds.dimension = d;
  for (int i = 0; i < n; ++i) {
    cspa::Instance inst;
    inst.features = Vector(d);
    for (int j = 0; j < d; ++j) inst.features[j] = g(rng);
    inst.features.normalize();
    inst.label = 1 + static_cast<int>(rng() % k);
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

// Classes clustered around orthogonal basis directions: a geometry where a
// zero-hinge-loss comparator with alpha < 1 exists.
Dataset orthogonal_classes(int n_per_class, double sigma, std::uint64_t seed) {
  const int k = 4;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  Dataset ds;
  ds.num_classes = k;
  ds.dimension = k;
  for (int c = 0; c < k; ++c) {
    for (int i = 0; i < n_per_class; ++i) {
      cspa::Instance inst;
      inst.features = Vector::Zero(k);
      inst.features[c] = 1.0;
      for (int j = 0; j < k; ++j) inst.features[j] += noise(rng);
      inst.label = c + 1;
      ds.instances.push_back(std::move(inst));
    }
  }
  return cspa::normalize(cspa::shuffle(std::move(ds), seed + 1));
}

std::vector<cspa::StepOutcome> run_cspa(const Dataset& ds, double beta) {
  WeightMatrix w(ds.num_classes, ds.dimension);
  const CspaConfig cfg{beta, ds.num_classes};
  std::vector<cspa::StepOutcome> outs;
  outs.reserve(ds.size());
  for (const auto& inst : ds.instances) {
    outs.push_back(cspa::step(w, inst.features, LabelOracle{inst.label}, cfg));
  }
  return outs;
}

}  // namespace

TEST_CASE("alpha_of") {
  const Dataset ds = random_dataset(3, 4, 50, 13);

  SUBCASE("zero and constant comparators give zero") {
    CHECK(cspa::alpha_of(Eigen::MatrixXd::Zero(3, 4), ds) == 0.0);
    const Eigen::MatrixXd equal_rows = Eigen::MatrixXd::Ones(3, 4) * 0.8;
    CHECK(cspa::alpha_of(equal_rows, ds) == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("matches exhaustive enumeration") {
    std::mt19937_64 rng(29);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
      const int k = 3 + static_cast<int>(rng() % 4);
      const int d = 2 + static_cast<int>(rng() % 3);
      const Dataset sample = random_dataset(k, d, 20, 1000 + rep);
      Eigen::MatrixXd u(k, d);
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < d; ++j) u(i, j) = g(rng);
      }
      CHECK(cspa::alpha_of(u, sample) ==
            doctest::Approx(oracle::brute_force_alpha(u, sample))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("comparator loss") {
  Vector x(2);
  x << 1.0, 0.0;

  SUBCASE("zero comparator") {
    CHECK(cspa::comparator_loss(Eigen::MatrixXd::Zero(3, 2), x, 1) ==
          doctest::Approx(1.0));
  }

  SUBCASE("satisfied margin") {
    Eigen::MatrixXd u(3, 2);
    u << 2.0, 0.0, 0.0, 0.0, 0.0, 0.0;
    CHECK(cspa::comparator_loss(u, x, 1) == 0.0);
  }

  SUBCASE("violated margin from the wrong side") {
    Eigen::MatrixXd u(3, 2);
    u << 2.0, 0.0, 0.0, 0.0, 0.0, 0.0;
    // true class 2 scores 0 while class 1 scores 2: loss = 3
    CHECK(cspa::comparator_loss(u, x, 2) == doctest::Approx(3.0));
  }
}

TEST_CASE("theorem bound value") {
  SUBCASE("zero comparator losses") {
    Eigen::MatrixXd u(3, 2);
    u << 1.0, 0.0, 0.0, 1.0, 0.0, 0.0;  // sum ||u_i||^2 = 2
    const double rhs = cspa::theorem_bound(u, 0.0, {0.0, 0.0}, 1.0, 3);
    CHECK(rhs == doctest::Approx(12.0));  // (sqrt(6) * sqrt(2))^2
  }

  SUBCASE("zero comparator norm, unit losses") {
    const int big_t = 37;
    const std::vector<double> losses(big_t, 1.0);
    const double rhs =
        cspa::theorem_bound(Eigen::MatrixXd::Zero(4, 2), 0.0, losses, 1.0, 4);
    const double expected = 12.0 * std::sqrt(static_cast<double>(big_t));
    CHECK(rhs == doctest::Approx(expected * expected));
  }

  SUBCASE("diverges as alpha approaches one") {
    Eigen::MatrixXd u(3, 2);
    u.setOnes();
    double prev = 0.0;
    for (double alpha : {0.0, 0.5, 0.9, 0.99, 0.999}) {
      const double rhs = cspa::theorem_bound(u, alpha, {1.0}, 1.0, 3);
      CHECK(rhs > prev);
      prev = rhs;
    }
    CHECK(prev > 1e8);
    CHECK_THROWS_AS(cspa::theorem_bound(u, 1.0, {1.0}, 1.0, 3),
                    std::invalid_argument);
  }

  SUBCASE("monotone in losses and comparator norm") {
    Eigen::MatrixXd u(3, 2);
    u.setOnes();
    const double base = cspa::theorem_bound(u, 0.3, {0.5}, 1.0, 3);
    CHECK(cspa::theorem_bound(u, 0.3, {0.5, 0.4}, 1.0, 3) > base);
    CHECK(cspa::theorem_bound(Eigen::MatrixXd(2.0 * u), 0.3, {0.5}, 1.0, 3) >
          base);
  }
}

TEST_CASE("verify_run on a feasible separable geometry") {
  const Dataset ds = orthogonal_classes(250, 0.02, 2024);
  const int k = ds.num_classes;

  // comparator: scaled identity directions, scaled until every margin >= 1
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& inst : ds.instances) {
    for (int i = 0; i < k; ++i) {
      if (i + 1 == inst.label) continue;
      min_margin = std::min(
          min_margin, inst.features[inst.label - 1] - inst.features[i]);
    }
  }
  REQUIRE(min_margin > 0.0);
  const Eigen::MatrixXd u =
      Eigen::MatrixXd::Identity(k, k) / min_margin;

  for (const auto& inst : ds.instances) {
    CHECK(cspa::comparator_loss(u, inst.features, inst.label) == 0.0);
  }
  const double alpha = cspa::alpha_of(u, ds);
  REQUIRE(alpha < 1.0);

  const double beta = (1.0 - alpha) / (k - 1);
  const auto outcomes = run_cspa(ds, beta);
  const cspa::BoundReport report = cspa::verify_run(outcomes, u, ds, beta);

  CHECK(report.beta_matches_theorem);
  CHECK(report.bound_holds);
  CHECK(report.sum_sq_loss <= report.bound_rhs);
  CHECK(report.mistakes_within_loss);
  CHECK(report.telescoping_ok);
  CHECK(report.telescoping_error <= 1e-6);
  CHECK(report.complementary_audit_ok);
  CHECK(report.complementary_rounds > 0);
  CHECK(report.comparator_sq_loss == 0.0);
}

TEST_CASE("verify_run audits an arbitrary beta without the bound") {
  Dataset ds = cspa::gen_four_gaussians(500, 0.3, 5);
  ds = cspa::normalize(cspa::shuffle(std::move(ds), 6));
  const auto outcomes = run_cspa(ds, 1.0 / 6.0);
  Eigen::MatrixXd centers(4, 2);
  centers << 1, 1, 1, -1, -1, 1, -1, -1;
  const cspa::BoundReport report =
      cspa::verify_run(outcomes, centers, ds, 1.0 / 6.0);

  CHECK_FALSE(report.beta_matches_theorem);
  CHECK(std::isnan(report.bound_rhs));
  CHECK(report.mistakes_within_loss);  // holds unconditionally
  CHECK(report.telescoping_ok);
  CHECK(report.mistakes <= report.sum_sq_loss);
}

TEST_CASE("verify_run rejects mismatched inputs") {
  Dataset ds = cspa::gen_four_gaussians(10, 0.3, 5);
  ds = cspa::normalize(std::move(ds));
  auto outcomes = run_cspa(ds, 0.5);
  outcomes.pop_back();
  CHECK_THROWS_AS(
      cspa::verify_run(outcomes, Eigen::MatrixXd::Zero(4, 2), ds, 0.5),
      std::invalid_argument);
}

TEST_CASE("verify_run on a zero-round dataset") {
  Dataset ds;
  ds.num_classes = 4;
  ds.dimension = 2;
  Eigen::MatrixXd u(4, 2);
  u << 0.1, 0.0, 0.0, 0.1, -0.1, 0.0, 0.0, -0.1;
  const double beta = (1.0 - 0.0) / 3.0;  // alpha over no rounds is 0
  const cspa::BoundReport report = cspa::verify_run({}, u, ds, beta);
  CHECK(report.sum_sq_loss == 0.0);
  CHECK(report.mistakes == 0);
  CHECK(report.beta_matches_theorem);
  // R^2 K(K-1) sum||u||^2 / (1-alpha)^2 with R = 1, alpha = 0
  CHECK(report.bound_rhs == doctest::Approx(12.0 * u.squaredNorm()));
  CHECK(report.bound_holds);
  CHECK(report.telescoping_ok);
}

TEST_CASE("bound report serializes to a flat key-value block") {
  Dataset ds = cspa::gen_four_gaussians(50, 0.3, 5);
  ds = cspa::normalize(std::move(ds));
  const auto outcomes = run_cspa(ds, 0.25);
  const cspa::BoundReport report =
      cspa::verify_run(outcomes, Eigen::MatrixXd::Zero(4, 2), ds, 0.25);
  const std::string text = report.to_text();
  for (const char* key :
       {"sum_sq_loss", "comparator_sq_loss", "mistakes", "alpha", "beta_used",
        "bound_rhs", "bound_holds", "mistakes_within_loss",
        "telescoping_error", "telescoping_ok", "complementary_audit_ok"}) {
    CHECK(text.find(key) != std::string::npos);
  }
}
