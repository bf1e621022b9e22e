#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "voicemark/explain.hpp"
#include "voicemark/gbt.hpp"

using namespace voicemark;
using namespace voicemark::model;

namespace {

GBTModel stump(std::size_t n_features, int feature, double threshold, double lo, double hi, double cover_lo = 5,
               double cover_hi = 5) {
  GBTModel m;
  m.n_features = n_features;
  m.learning_rate = 1.0;
  for (std::size_t f = 0; f < n_features; ++f) m.feature_names.push_back("f" + std::to_string(f));
  Tree t;
  t.nodes = {TreeNode{feature, threshold, 1, 2, 1.0, cover_lo + cover_hi, 0.0}, TreeNode{-1, 0, -1, -1, 0, cover_lo, lo},
             TreeNode{-1, 0, -1, -1, 0, cover_hi, hi}};
  m.trees.push_back(t);
  return m;
}

FeatureMatrix gaussian(std::uint64_t seed, std::size_t rows, std::size_t cols) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  FeatureMatrix X;
  for (std::size_t c = 0; c < cols; ++c) X.columns.push_back("f" + std::to_string(c));
  std::vector<double> row(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (auto& v : row) v = g(rng);
    X.append_row("r" + std::to_string(r), "s" + std::to_string(r), row, row[0] + 0.3 * g(rng) > 0 ? 1 : 0);
  }
  return X;
}

// Weighted ridge with an unpenalized intercept, solved as one augmented least-squares system.
std::vector<double> ridge_reference(const LimeExplanation& e, double lambda) {
  const auto n = static_cast<Eigen::Index>(e.design.size());
  const auto d = static_cast<Eigen::Index>(e.design.front().size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + d, d + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = std::sqrt(e.kernel[static_cast<std::size_t>(i)]);
    A(i, 0) = w;
    for (Eigen::Index j = 0; j < d; ++j) A(i, j + 1) = w * e.design[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    b(i) = w * e.targets[static_cast<std::size_t>(i)];
  }
  for (Eigen::Index j = 0; j < d; ++j) A(n + j, j + 1) = std::sqrt(lambda);
  const Eigen::VectorXd beta = A.colPivHouseholderQr().solve(b);
  return std::vector<double>(beta.data(), beta.data() + beta.size());
}

}  // namespace

TEST_SUITE("explain") {
  TEST_CASE("stump attribution") {
    const auto m = stump(3, 1, 0.0, -1.0, 1.0);
    const std::vector<double> x{0.3, 2.0, -4.0};
    const auto e = tree_shap(m, x);
    CHECK(e.phi[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e.phi[0] == 0.0);
    CHECK(e.phi[2] == 0.0);
    CHECK(e.base_value == doctest::Approx(0.0));
    CHECK(e.target == 1.0);
  }

  TEST_CASE("empty ensemble") {
    GBTModel m;
    m.n_features = 4;
    m.base_score = 0.3;
    const auto e = tree_shap(m, std::vector<double>{1, 2, 3, 4});
    CHECK(e.phi == std::vector<double>(4, 0.0));
    CHECK(e.base_value == 0.3);
    CHECK(expected_margin(m) == 0.3);
  }

  TEST_CASE("TreeSHAP equals brute-force Shapley") {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    for (int trial = 0; trial < 20; ++trial) {
      const int nf = 1 + static_cast<int>(rng() % 8);
      const auto m = oracle::random_ensemble(rng(), nf, 1 + static_cast<int>(rng() % 12), 3);
      std::vector<double> x(static_cast<std::size_t>(nf));
      for (int k = 0; k < 20; ++k) {
        for (auto& v : x) v = rng() % 4 == 0 ? 0.25 * static_cast<int>(rng() % 9 - 4) : u(rng);
        const auto e = tree_shap(m, x);
        const auto want = oracle::brute_shapley(m, x);
        double sum = e.base_value;
        for (int f = 0; f < nf; ++f) {
          REQUIRE(std::fabs(e.phi[static_cast<std::size_t>(f)] - want[static_cast<std::size_t>(f)]) <= 1e-9);
          sum += e.phi[static_cast<std::size_t>(f)];
        }
        CHECK(std::fabs(sum - m.margin(x)) <= 1e-9);
        CHECK(e.target == m.margin(x));
      }
      double prior = m.base_score;
      for (const auto& t : m.trees) prior += m.learning_rate * oracle::tree_expectation(t, x, 0u);
      CHECK(expected_margin(m) == doctest::Approx(prior).epsilon(1e-12));
    }
  }

  TEST_CASE("TreeSHAP on trained models") {
    const auto X = gaussian(8, 120, 6);
    GBTConfig cfg;
    cfg.n_trees = 15;
    cfg.max_depth = 3;
    const auto m = train_gbt(X, cfg);
    for (std::size_t r = 0; r < 30; ++r) {
      const auto e = tree_shap(m, X.row(r));
      const auto want = oracle::brute_shapley(m, X.row(r));
      double sum = e.base_value;
      for (std::size_t f = 0; f < 6; ++f) {
        CHECK(std::fabs(e.phi[f] - want[f]) <= 1e-9);
        sum += e.phi[f];
      }
      CHECK(std::fabs(sum - m.margin(X.row(r))) <= 1e-9);
    }
  }

  TEST_CASE("LIME on a flat model") {
    const auto X = gaussian(1, 80, 4);
    GBTModel m;
    m.n_features = 4;
    m.feature_names = X.columns;
    const auto e = lime_explain(m, X.row(0), X);
    for (double w : e.weights) CHECK(std::fabs(w) <= 1e-9);
    CHECK(e.kernel_width == doctest::Approx(0.75 * 2.0));
    CHECK(e.design.size() == 1000);
  }

  TEST_CASE("LIME singles out the split feature") {
    const auto X = gaussian(2, 100, 5);
    const auto m = stump(5, 3, 0.0, -2.0, 2.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      LimeConfig cfg;
      cfg.seed = seed;
      const auto e = lime_explain(m, X.row(static_cast<std::size_t>(seed)), X, cfg);
      for (std::size_t f = 0; f < 5; ++f) {
        if (f != 3) CHECK(std::fabs(e.weights[3]) > std::fabs(e.weights[f]));
      }
    }
  }

  TEST_CASE("LIME excludes constant features") {
    auto X = gaussian(3, 60, 3);
    for (std::size_t r = 0; r < X.rows(); ++r) X.at(r, 2) = 7.0;
    const auto m = stump(3, 0, 0.0, -1.0, 1.0);
    const auto e = lime_explain(m, X.row(0), X);
    CHECK(e.excluded == std::vector<bool>{false, false, true});
    CHECK(e.weights[2] == 0.0);
    CHECK(e.design.front().size() == 2);
  }

  TEST_CASE("LIME duplicate column against closed-form ridge") {
    auto X = gaussian(4, 100, 3);
    auto Xd = X;
    for (std::size_t r = 0; r < X.rows(); ++r) Xd.at(r, 2) = X.at(r, 0);
    const auto m = stump(3, 0, 0.0, -2.0, 2.0);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      LimeConfig cfg;
      cfg.seed = seed;
      const auto single = lime_explain(m, X.row(seed), X, cfg);
      const auto dup = lime_explain(m, Xd.row(seed), Xd, cfg);
      const auto ref = ridge_reference(dup, cfg.ridge_lambda);
      CHECK(dup.intercept == doctest::Approx(ref[0]).epsilon(1e-9));
      for (std::size_t j = 0; j < 3; ++j) CHECK(std::fabs(dup.weights[j] - ref[j + 1]) <= 1e-9);
      const auto sign = [](double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); };
      CHECK(sign(dup.weights[0]) == sign(single.weights[0]));
      CHECK(sign(dup.weights[0] + dup.weights[2]) == sign(single.weights[0]));
      CHECK(std::fabs(dup.weights[0]) > std::fabs(dup.weights[2]));
    }
  }

  TEST_CASE("LIME is seeded") {
    const auto X = gaussian(5, 50, 4);
    const auto m = stump(4, 1, 0.2, -1.0, 1.0);
    LimeConfig cfg;
    cfg.seed = 9;
    CHECK(lime_explain(m, X.row(3), X, cfg).weights == lime_explain(m, X.row(3), X, cfg).weights);
    const auto e = lime_explain(m, X.row(3), X, cfg);
    CHECK(e.design.front() == e.design.front());
    CHECK(e.kernel.front() == 1.0);
  }

  TEST_CASE("aggregate LIME") {
    const std::vector<std::string> names{"a", "b", "c"};
    const std::vector<std::vector<double>> one{{0.1, -0.5, 0.3}};
    const auto r = aggregate_lime(one, names);
    REQUIRE(r.size() == 3);
    CHECK(r[0].name == "b");
    CHECK(r[1].name == "c");
    CHECK(r[2].name == "a");
    CHECK(r[0].value == 0.5);

    const std::vector<std::vector<double>> flipped{{0.1, -0.5, 0.3}, {-0.1, 0.5, -0.3}};
    const auto f = aggregate_lime(flipped, names);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(f[i].name == r[i].name);
      CHECK(f[i].value == doctest::Approx(r[i].value));
    }
    const std::vector<std::vector<double>> zeros{{0, 0, 0}, {0, 0, 0}};
    CHECK(aggregate_lime(zeros, names).empty());
  }

  TEST_CASE("partial dependence") {
    const auto X = gaussian(6, 200, 3);
    const auto m = stump(3, 1, 0.1, -1.0, 1.0);
    const auto flat = pdp(m, X, 0);
    CHECK(*std::max_element(flat.values.begin(), flat.values.end()) - *std::min_element(flat.values.begin(), flat.values.end()) <=
          1e-9);
    CHECK(flat.feature == "f0");

    const auto step = pdp(m, X, 1);
    CHECK(step.grid.size() == 20);
    CHECK(std::is_sorted(step.grid.begin(), step.grid.end()));
    int jumps = 0;
    for (std::size_t i = 1; i < step.values.size(); ++i) {
      if (step.values[i] != step.values[i - 1]) {
        ++jumps;
        CHECK(step.grid[i - 1] < 0.1);
        CHECK(step.grid[i] >= 0.1);
      }
    }
    CHECK(jumps == 1);
    CHECK(step.values.front() == doctest::Approx(sigmoid(-1.0)));
    CHECK(step.values.back() == doctest::Approx(sigmoid(1.0)));

    FeatureMatrix line;
    line.columns = {"x"};
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 200; ++i) {
      const double x = u(rng);
      line.append_row("r", "s", std::vector<double>{x}, x > 0.5 ? 1 : 0);
    }
    const auto mono = train_gbt(line, GBTConfig{.n_trees = 40});
    const auto curve = pdp(mono, line, 0, 25);
    for (std::size_t i = 1; i < curve.values.size(); ++i) CHECK(curve.values[i] >= curve.values[i - 1]);
  }

  TEST_CASE("grid of a low-cardinality column") {
    FeatureMatrix X;
    X.columns = {"b"};
    for (int i = 0; i < 30; ++i) X.append_row("r", "s", std::vector<double>{static_cast<double>(i % 2)}, i % 2);
    const auto curve = pdp(stump(1, 0, 0.5, -1, 1), X, 0);
    CHECK(curve.grid == std::vector<double>{0.0, 1.0});
  }
}
