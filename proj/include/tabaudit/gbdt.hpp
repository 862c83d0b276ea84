#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace tabaudit {

enum class Loss { SquaredError, LogisticBinary, SoftmaxMulticlass };

std::string_view loss_name(Loss loss);
Loss loss_from_name(std::string_view name);

struct GbdtHyperparams {
  int n_rounds = 100;
  int max_depth = 4;
  double learning_rate = 0.1;
  int min_samples_leaf = 5;
  Loss loss = Loss::SquaredError;

  void validate() const;
};

// Dense row-major feature matrix.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  static FeatureMatrix from_rows(
      const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Internal nodes split on "x[feature] < threshold" (left when true); leaves
// carry the already-shrunk value. feature < 0 marks a leaf.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double eval(std::span<const double> x) const;
  int depth() const;
};

struct GbdtModel {
  Loss loss = Loss::SquaredError;
  std::size_t n_features = 0;
  std::size_t n_outputs = 1;          // 1 for regression/binary, K for softmax
  std::vector<double> base_scores;    // one per output
  std::vector<Tree> trees;            // round-major: trees[round*n_outputs+k]

  // Regression only: base score plus tree sum.
  double predict_value(std::span<const double> x) const;
  // Classification only: probabilities over classes, summing to 1.
  std::vector<double> predict_proba(std::span<const double> x) const;
  // Raw additive scores per output, any loss.
  std::vector<double> predict_raw(std::span<const double> x) const;

  std::size_t n_classes() const {
    return loss == Loss::LogisticBinary ? 2 : n_outputs;
  }
};

// Exact greedy boosting. Each round fits one tree per output to the loss
// gradients over sorted unique feature values with midpoint thresholds.
// Equal-gain splits resolve to the lowest feature index, then the lowest
// threshold; split search may run parallel across features but reduces in
// feature order, so the fit is bit-identical for any worker count.
GbdtModel fit_regression(const FeatureMatrix& x, std::span<const double> y,
                         const GbdtHyperparams& hp, std::uint64_t seed,
                         std::vector<double>* round_train_loss = nullptr);

// y holds class indices in [0, n_classes); every class must occur at least
// once. n_classes == 2 uses logistic loss, larger uses softmax; leaf values
// are Newton steps.
GbdtModel fit_classification(const FeatureMatrix& x, std::span<const int> y,
                             std::size_t n_classes, const GbdtHyperparams& hp,
                             std::uint64_t seed,
                             std::vector<double>* round_train_loss = nullptr);

// File format "gbdt-v1": {"version","loss","n_features","n_outputs",
// "base_scores","trees":[{"nodes":[{"feature","threshold","left","right",
// "value"}]}]}. Round-trip preserves predictions exactly.
nlohmann::json model_to_json(const GbdtModel& model);
GbdtModel model_from_json(const nlohmann::json& j);
GbdtModel load_model(const std::string& path);
void save_model(const GbdtModel& model, const std::string& path);

}  // namespace tabaudit
