#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tabaudit/error.hpp"
#include "tabaudit/gbdt.hpp"
#include "tabaudit/parallel.hpp"

using namespace tabaudit;

namespace {

GbdtHyperparams hyper(int rounds, int depth, double lr, int min_leaf,
                      Loss loss) {
  GbdtHyperparams hp;
  hp.n_rounds = rounds;
  hp.max_depth = depth;
  hp.learning_rate = lr;
  hp.min_samples_leaf = min_leaf;
  hp.loss = loss;
  return hp;
}

double rmse(const GbdtModel& model, const FeatureMatrix& x,
            const std::vector<double>& y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double d = model.predict_value(x.row(i)) - y[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(x.rows()));
}

double train_accuracy(const GbdtModel& model, const FeatureMatrix& x,
                      const std::vector<int>& y) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto probs = model.predict_proba(x.row(i));
    std::size_t best = 0;
    for (std::size_t k = 1; k < probs.size(); ++k) {
      if (probs[k] > probs[best]) {
        best = k;
      }
    }
    if (static_cast<int>(best) == y[i]) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(x.rows());
}

}  // namespace

TEST_CASE("constant targets reduce to the base score") {
  const auto x = FeatureMatrix::from_rows({{0.0}, {1.0}, {2.0}, {3.0}});
  const std::vector<double> y(4, 7.25);
  const auto model = fit_regression(
      x, y, hyper(5, 2, 0.5, 1, Loss::SquaredError), 1);
  CHECK(model.base_scores[0] == 7.25);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    CHECK(model.predict_value(x.row(i)) == 7.25);
  }
}

TEST_CASE("two-point regression is exact after one round at lr 1") {
  const auto x = FeatureMatrix::from_rows({{0.0}, {1.0}});
  const std::vector<double> y{0.0, 1.0};
  const auto model = fit_regression(
      x, y, hyper(1, 1, 1.0, 1, Loss::SquaredError), 1);
  // base 0.5, one split at 0.5, leaves -0.5 and +0.5
  CHECK(model.base_scores[0] == 0.5);
  CHECK(model.predict_value(std::vector<double>{0.0}) == 0.0);
  CHECK(model.predict_value(std::vector<double>{1.0}) == 1.0);
}

TEST_CASE("line fit beats the constant predictor by far") {
  std::vector<std::vector<double>> rows;
  std::vector<double> y;
  for (int i = 0; i < 16; ++i) {
    rows.push_back({static_cast<double>(i)});
    y.push_back(3.0 * i + 1.0);
  }
  const auto x = FeatureMatrix::from_rows(rows);
  const auto model = fit_regression(
      x, y, hyper(50, 3, 0.3, 1, Loss::SquaredError), 1);

  // Constant-predictor oracle: rmse of the best constant is std(y).
  double mean = 0.0;
  for (double v : y) {
    mean += v;
  }
  mean /= static_cast<double>(y.size());
  double var = 0.0;
  for (double v : y) {
    var += (v - mean) * (v - mean);
  }
  const double constant_rmse = std::sqrt(var / static_cast<double>(y.size()));
  CHECK(constant_rmse > 10.0);
  CHECK(rmse(model, x, y) < 0.1);
}

TEST_CASE("linearly separable data reaches accuracy 1 quickly") {
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 80; ++i) {
    const double a = static_cast<double>(rng() % 1000) / 500.0 - 1.0;
    const double b = static_cast<double>(rng() % 1000) / 500.0 - 1.0;
    rows.push_back({a, b});
    y.push_back(a + b > 0.0 ? 1 : 0);
  }
  const auto x = FeatureMatrix::from_rows(rows);
  const auto model = fit_classification(
      x, y, 2, hyper(20, 2, 0.3, 1, Loss::LogisticBinary), 1);
  CHECK(train_accuracy(model, x, y) == 1.0);
}

TEST_CASE("xor needs the zero-gain root split and still reaches accuracy 1") {
  const auto x =
      FeatureMatrix::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  const std::vector<int> y{0, 1, 1, 0};
  const auto model = fit_classification(
      x, y, 2, hyper(15, 2, 0.3, 1, Loss::LogisticBinary), 1);
  // Brute-force truth table check.
  for (std::size_t i = 0; i < 4; ++i) {
    const auto probs = model.predict_proba(x.row(i));
    CHECK((probs[1] > 0.5 ? 1 : 0) == y[i]);
  }
  CHECK(train_accuracy(model, x, y) == 1.0);
}

TEST_CASE("classification rejects degenerate inputs") {
  const auto x = FeatureMatrix::from_rows({{0.0}, {1.0}});
  SUBCASE("single-class labels") {
    const std::vector<int> y{0, 0};
    CHECK_THROWS_WITH_AS(
        fit_classification(x, y, 2, hyper(5, 2, 0.1, 1, Loss::LogisticBinary),
                           1),
        doctest::Contains("absent"), Error);
  }
  SUBCASE("class index out of range") {
    const std::vector<int> y{0, 2};
    CHECK_THROWS_AS(
        fit_classification(x, y, 2, hyper(5, 2, 0.1, 1, Loss::LogisticBinary),
                           1),
        Error);
  }
  SUBCASE("loss mismatch") {
    const std::vector<int> y{0, 1};
    CHECK_THROWS_AS(
        fit_classification(x, y, 2, hyper(5, 2, 0.1, 1, Loss::SquaredError),
                           1),
        Error);
  }
}

TEST_CASE("regression rejects bad inputs") {
  CHECK_THROWS_WITH_AS(
      fit_regression(FeatureMatrix(), std::vector<double>{},
                     hyper(5, 2, 0.1, 1, Loss::SquaredError), 1),
      doctest::Contains("empty"), Error);
  const auto x = FeatureMatrix::from_rows({{0.0}, {1.0}});
  const std::vector<double> bad{0.0, std::nan("")};
  CHECK_THROWS_WITH_AS(
      fit_regression(x, bad, hyper(5, 2, 0.1, 1, Loss::SquaredError), 1),
      doctest::Contains("non-finite target"), Error);
  GbdtHyperparams hp = hyper(5, 2, 1.5, 1, Loss::SquaredError);
  CHECK_THROWS_AS(fit_regression(x, std::vector<double>{0.0, 1.0}, hp, 1),
                  Error);
}

TEST_CASE("prediction contracts") {
  SUBCASE("a model with no trees returns the base score") {
    GbdtModel model;
    model.loss = Loss::SquaredError;
    model.n_features = 3;
    model.base_scores = {4.5};
    CHECK(model.predict_value(std::vector<double>{1, 2, 3}) == 4.5);
  }
  SUBCASE("dimension mismatch") {
    GbdtModel model;
    model.loss = Loss::SquaredError;
    model.n_features = 2;
    model.base_scores = {0.0};
    CHECK_THROWS_AS(model.predict_value(std::vector<double>{1.0}), Error);
  }
  SUBCASE("probabilities sum to one") {
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    std::mt19937_64 rng(5);
    for (int i = 0; i < 90; ++i) {
      rows.push_back({static_cast<double>(rng() % 100),
                      static_cast<double>(rng() % 100)});
      y.push_back(static_cast<int>(rng() % 3));
    }
    const auto x = FeatureMatrix::from_rows(rows);
    const auto model = fit_classification(
        x, y, 3, hyper(10, 3, 0.2, 2, Loss::SoftmaxMulticlass), 1);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const auto probs = model.predict_proba(x.row(i));
      REQUIRE(probs.size() == 3);
      double sum = 0.0;
      for (double p : probs) {
        CHECK(p >= 0.0);
        sum += p;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("training loss is non-increasing per round") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = 30 + rng() % 120;
    const std::size_t m = 1 + rng() % 6;
    FeatureMatrix x(n, m);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < m; ++c) {
        x.at(r, c) = static_cast<double>(rng() % 50) / 7.0;
      }
    }
    const double lr = (trial % 3 == 0) ? 1.0 : (trial % 3 == 1) ? 0.3 : 0.1;
    const int min_leaf = 1 + static_cast<int>(rng() % 5);
    std::vector<double> losses;

    if (trial % 2 == 0) {
      std::vector<double> y(n);
      for (auto& v : y) {
        v = static_cast<double>(rng() % 1000) / 10.0 - 50.0;
      }
      fit_regression(x, y, hyper(25, 3, lr, min_leaf, Loss::SquaredError), 1,
                     &losses);
    } else {
      const std::size_t k = 2 + rng() % 3;
      std::vector<int> y(n);
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = static_cast<int>(i % k);  // every class present
      }
      const Loss loss =
          k == 2 ? Loss::LogisticBinary : Loss::SoftmaxMulticlass;
      fit_classification(x, y, k, hyper(25, 3, lr, min_leaf, loss), 1,
                         &losses);
    }
    REQUIRE(losses.size() == 26);
    for (std::size_t t = 1; t < losses.size(); ++t) {
      CHECK(losses[t] <= losses[t - 1] + 1e-12);
    }
  }
}

TEST_CASE("equal-gain splits break ties toward low feature and threshold") {
  SUBCASE("feature tie") {
    // Two identical columns: both give the same gain at 0.5.
    const auto x =
        FeatureMatrix::from_rows({{0, 0}, {0, 0}, {1, 1}, {1, 1}});
    const std::vector<double> y{0, 0, 1, 1};
    const auto model = fit_regression(
        x, y, hyper(1, 1, 1.0, 1, Loss::SquaredError), 1);
    REQUIRE(!model.trees.empty());
    CHECK(model.trees[0].nodes[0].feature == 0);
    CHECK(model.trees[0].nodes[0].threshold == 0.5);
  }
  SUBCASE("threshold tie within a feature") {
    // Symmetric residuals: thresholds 0.5 and 2.5 tie; 0.5 must win.
    const auto x = FeatureMatrix::from_rows({{0}, {1}, {2}, {3}});
    const std::vector<double> y{0, 1, 1, 0};
    const auto model = fit_regression(
        x, y, hyper(1, 1, 1.0, 1, Loss::SquaredError), 1);
    CHECK(model.trees[0].nodes[0].feature == 0);
    CHECK(model.trees[0].nodes[0].threshold == 0.5);
  }
}

TEST_CASE("fits are bit-identical across seeds of parallelism") {
  std::mt19937_64 rng(23);
  const std::size_t n = 150;
  FeatureMatrix x(n, 5);
  std::vector<double> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < 5; ++c) {
      x.at(r, c) = static_cast<double>(rng() % 97) / 13.0;
    }
    y[r] = x.at(r, 0) * 2.0 - x.at(r, 3) + static_cast<double>(rng() % 7);
  }
  const auto hp = hyper(20, 4, 0.1, 2, Loss::SquaredError);

  set_worker_count(1);
  const auto serial = fit_regression(x, y, hp, 42);
  set_worker_count(8);
  const auto parallel = fit_regression(x, y, hp, 42);
  set_worker_count(0);
  const auto again = fit_regression(x, y, hp, 42);

  CHECK(model_to_json(serial) == model_to_json(parallel));
  CHECK(model_to_json(serial) == model_to_json(again));
}

TEST_CASE("max depth bounds every tree") {
  std::mt19937_64 rng(31);
  FeatureMatrix x(120, 3);
  std::vector<double> y(120);
  for (std::size_t r = 0; r < 120; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      x.at(r, c) = static_cast<double>(rng() % 1009);
    }
    y[r] = static_cast<double>(rng() % 1009);
  }
  for (int depth : {1, 2, 4}) {
    const auto model = fit_regression(
        x, y, hyper(8, depth, 0.3, 1, Loss::SquaredError), 9);
    for (const Tree& tree : model.trees) {
      CHECK(tree.depth() <= depth);
    }
  }
}

TEST_CASE("serialization round-trips predictions exactly") {
  std::mt19937_64 rng(47);
  FeatureMatrix x(100, 4);
  std::vector<int> y(100);
  for (std::size_t r = 0; r < 100; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      x.at(r, c) = static_cast<double>(rng() % 211) / 17.0;
    }
    y[r] = static_cast<int>(rng() % 3);
  }
  for (std::size_t k = 0; k < 3; ++k) {
    y[k] = static_cast<int>(k);
  }
  const auto model = fit_classification(
      x, y, 3, hyper(12, 3, 0.2, 2, Loss::SoftmaxMulticlass), 7);
  const auto restored = model_from_json(model_to_json(model));
  for (std::size_t i = 0; i < x.rows(); ++i) {
    CHECK(model.predict_proba(x.row(i)) == restored.predict_proba(x.row(i)));
  }

  SUBCASE("version and index validation") {
    auto j = model_to_json(model);
    j["version"] = "gbdt-v0";
    CHECK_THROWS_AS(model_from_json(j), Error);
    j = model_to_json(model);
    j["trees"][0]["nodes"][0]["feature"] = 99;
    CHECK_THROWS_AS(model_from_json(j), Error);
  }
}
