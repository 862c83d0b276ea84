#include "tabaudit/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "tabaudit/error.hpp"
#include "tabaudit/parallel.hpp"

namespace tabaudit {

std::string_view loss_name(Loss loss) {
  switch (loss) {
    case Loss::SquaredError:
      return "squared_error";
    case Loss::LogisticBinary:
      return "logistic_binary";
    case Loss::SoftmaxMulticlass:
      return "softmax_multiclass";
  }
  throw Error("gbdt: unknown loss");
}

Loss loss_from_name(std::string_view name) {
  if (name == "squared_error") {
    return Loss::SquaredError;
  }
  if (name == "logistic_binary") {
    return Loss::LogisticBinary;
  }
  if (name == "softmax_multiclass") {
    return Loss::SoftmaxMulticlass;
  }
  throw Error("gbdt: unknown loss '" + std::string(name) + "'");
}

void GbdtHyperparams::validate() const {
  if (n_rounds <= 0) {
    throw Error("gbdt: n_rounds must be positive");
  }
  if (max_depth <= 0) {
    throw Error("gbdt: max_depth must be positive");
  }
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw Error("gbdt: learning_rate must lie in (0, 1]");
  }
  if (min_samples_leaf <= 0) {
    throw Error("gbdt: min_samples_leaf must be positive");
  }
}

FeatureMatrix FeatureMatrix::from_rows(
    const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) {
    return FeatureMatrix();
  }
  FeatureMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) {
      throw Error("feature matrix: ragged rows");
    }
    for (std::size_t c = 0; c < m.cols(); ++c) {
      m.at(r, c) = rows[r][c];
    }
  }
  return m;
}

double Tree::eval(std::span<const double> x) const {
  int id = 0;
  for (;;) {
    const TreeNode& node = nodes[id];
    if (node.is_leaf()) {
      return node.value;
    }
    id = x[node.feature] < node.threshold ? node.left : node.right;
  }
}

int Tree::depth() const {
  // Iterative: depth of node i (edges from root); nodes are created in
  // level order, so parents precede children.
  std::vector<int> depth_of(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& node = nodes[i];
    if (!node.is_leaf()) {
      depth_of[node.left] = depth_of[i] + 1;
      depth_of[node.right] = depth_of[i] + 1;
      best = std::max(best, depth_of[i] + 1);
    }
  }
  return best;
}

namespace {

constexpr double kHessFloor = 1e-16;
// Newton leaf steps for logistic/softmax are clamped: a logit move of 15
// saturates the probability anyway, and near-zero hessians would otherwise
// produce arbitrarily large steps and break monotone training loss.
constexpr double kMaxNewtonStep = 15.0;

double split_score(double g, double h) {
  return g * g / std::max(h, kHessFloor);
}

struct SplitChoice {
  double gain = -1.0;
  int feature = -1;
  double threshold = 0.0;

  bool valid() const { return feature >= 0; }
};

// Ranking used everywhere a split is chosen: gain first, then lowest feature
// index, then lowest threshold.
bool split_better(const SplitChoice& a, const SplitChoice& b) {
  if (!a.valid()) {
    return false;
  }
  if (!b.valid()) {
    return true;
  }
  if (a.gain != b.gain) {
    return a.gain > b.gain;
  }
  if (a.feature != b.feature) {
    return a.feature < b.feature;
  }
  return a.threshold < b.threshold;
}

struct NodeAgg {
  double g = 0.0;
  double h = 0.0;
  int count = 0;
};

// One boosted tree, grown level-wise with exact greedy splits over the
// presorted feature orders.
class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x,
              const std::vector<std::vector<int>>& order,
              const GbdtHyperparams& hp, bool clamp_leaves)
      : x_(x), order_(order), hp_(hp), clamp_(clamp_leaves) {}

  Tree build(std::span<const double> grad, std::span<const double> hess) {
    const std::size_t n = x_.rows();
    const std::size_t n_feat = x_.cols();

    Tree tree;
    std::vector<NodeAgg> agg;
    tree.nodes.emplace_back();
    agg.emplace_back();
    for (std::size_t i = 0; i < n; ++i) {
      agg[0].g += grad[i];
      agg[0].h += hess[i];
      ++agg[0].count;
    }
    pos_.assign(n, 0);
    std::vector<int> level{0};

    for (int depth = 0; depth < hp_.max_depth && !level.empty(); ++depth) {
      const std::size_t width = level.size();
      std::vector<int> slot_of(tree.nodes.size(), -1);
      for (std::size_t s = 0; s < width; ++s) {
        slot_of[level[s]] = static_cast<int>(s);
      }

      // Best candidate per (node, feature); filled independently per
      // feature, reduced in feature order afterwards.
      std::vector<SplitChoice> bests(width * n_feat);
      parallel_for(n_feat, [&](std::size_t f) {
        scan_feature(static_cast<int>(f), grad, hess, level, slot_of, agg,
                     &bests[0], width);
      });

      std::vector<SplitChoice> chosen(width);
      for (std::size_t s = 0; s < width; ++s) {
        for (std::size_t f = 0; f < n_feat; ++f) {
          if (split_better(bests[s * n_feat + f], chosen[s])) {
            chosen[s] = bests[s * n_feat + f];
          }
        }
      }

      std::vector<int> next_level;
      bool any_split = false;
      for (std::size_t s = 0; s < width; ++s) {
        const int id = level[s];
        if (!chosen[s].valid()) {
          finalize_leaf(tree, id, agg[id]);
          continue;
        }
        any_split = true;
        const int left = static_cast<int>(tree.nodes.size());
        tree.nodes[id].feature = chosen[s].feature;
        tree.nodes[id].threshold = chosen[s].threshold;
        tree.nodes[id].left = left;
        tree.nodes[id].right = left + 1;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        agg.emplace_back();
        agg.emplace_back();
        next_level.push_back(left);
        next_level.push_back(left + 1);
      }
      if (!any_split) {
        return tree;
      }

      // Route samples in index order; child aggregates stay deterministic.
      for (std::size_t i = 0; i < n; ++i) {
        const TreeNode& node = tree.nodes[pos_[i]];
        if (node.is_leaf()) {
          continue;
        }
        const int child =
            x_.at(i, node.feature) < node.threshold ? node.left : node.right;
        pos_[i] = child;
        agg[child].g += grad[i];
        agg[child].h += hess[i];
        ++agg[child].count;
      }
      level = std::move(next_level);
    }

    for (int id : level) {
      finalize_leaf(tree, id, agg[id]);
    }
    return tree;
  }

 private:
  // Streams one feature's presorted order, keeping running left-side sums
  // per level node. A candidate sits between two distinct values; zero-gain
  // candidates are kept so symmetric interactions can still split.
  void scan_feature(int f, std::span<const double> grad,
                    std::span<const double> hess,
                    const std::vector<int>& level,
                    const std::vector<int>& slot_of,
                    const std::vector<NodeAgg>& agg, SplitChoice* bests,
                    std::size_t width) {
    struct Scan {
      double gl = 0.0;
      double hl = 0.0;
      int count = 0;
      double prev = 0.0;
      bool has_prev = false;
    };
    std::vector<Scan> scans(width);

    const std::size_t n_feat = x_.cols();
    for (int i : order_[f]) {
      const int slot = slot_of[pos_[i]];
      if (slot < 0) {
        continue;
      }
      Scan& sc = scans[slot];
      const NodeAgg& node = agg[level[slot]];
      if (node.count < 2 * hp_.min_samples_leaf) {
        continue;
      }
      const double v = x_.at(static_cast<std::size_t>(i), f);
      if (sc.has_prev && v > sc.prev && sc.count >= hp_.min_samples_leaf &&
          node.count - sc.count >= hp_.min_samples_leaf) {
        const double mid = sc.prev + (v - sc.prev) / 2.0;
        if (sc.prev < mid && std::isfinite(mid)) {
          const double gain = split_score(sc.gl, sc.hl) +
                              split_score(node.g - sc.gl, node.h - sc.hl) -
                              split_score(node.g, node.h);
          SplitChoice& best = bests[slot * n_feat + f];
          // Ascending scan: a later equal-gain threshold never replaces an
          // earlier one.
          if (gain >= 0.0 && gain > best.gain) {
            best.gain = gain;
            best.feature = f;
            best.threshold = mid;
          }
        }
      }
      sc.gl += grad[i];
      sc.hl += hess[i];
      ++sc.count;
      sc.prev = v;
      sc.has_prev = true;
    }
  }

  void finalize_leaf(Tree& tree, int id, const NodeAgg& a) const {
    double step = -a.g / std::max(a.h, kHessFloor);
    if (clamp_) {
      step = std::clamp(step, -kMaxNewtonStep, kMaxNewtonStep);
    }
    tree.nodes[id].feature = -1;
    tree.nodes[id].value = hp_.learning_rate * step;
  }

  const FeatureMatrix& x_;
  const std::vector<std::vector<int>>& order_;
  const GbdtHyperparams& hp_;
  bool clamp_;
  std::vector<int> pos_;  // current node of each sample
};

std::vector<std::vector<int>> presort_features(const FeatureMatrix& x) {
  std::vector<std::vector<int>> order(x.cols());
  parallel_for(x.cols(), [&](std::size_t f) {
    auto& idx = order[f];
    idx.resize(x.rows());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      const double va = x.at(a, f);
      const double vb = x.at(b, f);
      if (va != vb) {
        return va < vb;
      }
      return a < b;
    });
  });
  return order;
}

void check_matrix(const FeatureMatrix& x) {
  if (x.rows() == 0 || x.cols() == 0) {
    throw Error("gbdt: empty input");
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (!std::isfinite(x.at(r, c))) {
        throw Error("gbdt: non-finite feature value");
      }
    }
  }
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double log_prob(double p) {
  return std::log(std::clamp(p, 1e-15, 1.0 - 1e-15));
}

}  // namespace

GbdtModel fit_regression(const FeatureMatrix& x, std::span<const double> y,
                         const GbdtHyperparams& hp, std::uint64_t /*seed*/,
                         std::vector<double>* round_train_loss) {
  hp.validate();
  if (hp.loss != Loss::SquaredError) {
    throw Error("gbdt: fit_regression requires the squared_error loss");
  }
  check_matrix(x);
  const std::size_t n = x.rows();
  if (y.size() != n) {
    throw Error("gbdt: target length does not match row count");
  }
  for (double v : y) {
    if (!std::isfinite(v)) {
      throw Error("gbdt: non-finite target");
    }
  }

  GbdtModel model;
  model.loss = Loss::SquaredError;
  model.n_features = x.cols();
  model.n_outputs = 1;
  double mean = 0.0;
  for (double v : y) {
    mean += v;
  }
  mean /= static_cast<double>(n);
  model.base_scores = {mean};

  std::vector<double> score(n, mean);
  std::vector<double> grad(n);
  std::vector<double> hess(n, 1.0);
  const auto order = presort_features(x);

  auto mse = [&] {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = score[i] - y[i];
      sum += d * d;
    }
    return sum / static_cast<double>(n);
  };
  if (round_train_loss) {
    round_train_loss->clear();
    round_train_loss->push_back(mse());
  }

  TreeBuilder builder(x, order, hp, /*clamp_leaves=*/false);
  for (int round = 0; round < hp.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      grad[i] = score[i] - y[i];
    }
    Tree tree = builder.build(grad, hess);
    for (std::size_t i = 0; i < n; ++i) {
      score[i] += tree.eval(x.row(i));
    }
    model.trees.push_back(std::move(tree));
    if (round_train_loss) {
      round_train_loss->push_back(mse());
    }
  }
  return model;
}

GbdtModel fit_classification(const FeatureMatrix& x, std::span<const int> y,
                             std::size_t n_classes, const GbdtHyperparams& hp,
                             std::uint64_t /*seed*/,
                             std::vector<double>* round_train_loss) {
  hp.validate();
  if (n_classes < 2) {
    throw Error("gbdt: classification needs at least two classes");
  }
  const bool binary = n_classes == 2;
  if (binary && hp.loss != Loss::LogisticBinary) {
    throw Error("gbdt: two-class fit requires the logistic_binary loss");
  }
  if (!binary && hp.loss != Loss::SoftmaxMulticlass) {
    throw Error("gbdt: multiclass fit requires the softmax_multiclass loss");
  }
  check_matrix(x);
  const std::size_t n = x.rows();
  if (y.size() != n) {
    throw Error("gbdt: target length does not match row count");
  }
  std::vector<std::size_t> class_count(n_classes, 0);
  for (int label : y) {
    if (label < 0 || static_cast<std::size_t>(label) >= n_classes) {
      throw Error("gbdt: class index out of range");
    }
    ++class_count[label];
  }
  for (std::size_t k = 0; k < n_classes; ++k) {
    if (class_count[k] == 0) {
      throw Error("gbdt: class " + std::to_string(k) +
                  " absent from training data");
    }
  }

  GbdtModel model;
  model.loss = binary ? Loss::LogisticBinary : Loss::SoftmaxMulticlass;
  model.n_features = x.cols();
  model.n_outputs = binary ? 1 : n_classes;

  // Loss-minimizing constants: log-odds for logistic, log priors for softmax.
  if (binary) {
    const double p = static_cast<double>(class_count[1]) /
                     static_cast<double>(n);
    model.base_scores = {std::log(p / (1.0 - p))};
  } else {
    model.base_scores.resize(n_classes);
    for (std::size_t k = 0; k < n_classes; ++k) {
      model.base_scores[k] = std::log(static_cast<double>(class_count[k]) /
                                      static_cast<double>(n));
    }
  }

  const std::size_t outputs = model.n_outputs;
  std::vector<double> score(n * outputs);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < outputs; ++k) {
      score[i * outputs + k] = model.base_scores[k];
    }
  }
  std::vector<double> prob(n * outputs);
  auto refresh_prob = [&] {
    if (binary) {
      for (std::size_t i = 0; i < n; ++i) {
        prob[i] = sigmoid(score[i]);
      }
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < outputs; ++k) {
        mx = std::max(mx, score[i * outputs + k]);
      }
      double sum = 0.0;
      for (std::size_t k = 0; k < outputs; ++k) {
        prob[i * outputs + k] = std::exp(score[i * outputs + k] - mx);
        sum += prob[i * outputs + k];
      }
      for (std::size_t k = 0; k < outputs; ++k) {
        prob[i * outputs + k] /= sum;
      }
    }
  };
  auto log_loss = [&] {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double py = binary ? (y[i] == 1 ? prob[i] : 1.0 - prob[i])
                               : prob[i * outputs + y[i]];
      sum -= log_prob(py);
    }
    return sum / static_cast<double>(n);
  };

  refresh_prob();
  if (round_train_loss) {
    round_train_loss->clear();
    round_train_loss->push_back(log_loss());
  }

  const auto order = presort_features(x);
  TreeBuilder builder(x, order, hp, /*clamp_leaves=*/true);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  for (int round = 0; round < hp.n_rounds; ++round) {
    for (std::size_t k = 0; k < outputs; ++k) {
      if (binary) {
        for (std::size_t i = 0; i < n; ++i) {
          const double p = prob[i];
          grad[i] = p - static_cast<double>(y[i]);
          hess[i] = p * (1.0 - p);
        }
      } else {
        // Diagonal softmax hessian with the customary factor 2.
        for (std::size_t i = 0; i < n; ++i) {
          const double p = prob[i * outputs + k];
          grad[i] = p - (static_cast<std::size_t>(y[i]) == k ? 1.0 : 0.0);
          hess[i] = 2.0 * p * (1.0 - p);
        }
      }
      Tree tree = builder.build(grad, hess);
      for (std::size_t i = 0; i < n; ++i) {
        score[i * outputs + k] += tree.eval(x.row(i));
      }
      model.trees.push_back(std::move(tree));
    }
    refresh_prob();
    if (round_train_loss) {
      round_train_loss->push_back(log_loss());
    }
  }
  return model;
}

namespace {

void check_input(const GbdtModel& model, std::span<const double> x) {
  if (x.size() != model.n_features) {
    throw Error("gbdt: input has " + std::to_string(x.size()) +
                " features, model expects " +
                std::to_string(model.n_features));
  }
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw Error("gbdt: non-finite input value");
    }
  }
}

}  // namespace

std::vector<double> GbdtModel::predict_raw(std::span<const double> x) const {
  check_input(*this, x);
  std::vector<double> out(base_scores.begin(), base_scores.end());
  for (std::size_t t = 0; t < trees.size(); ++t) {
    out[t % n_outputs] += trees[t].eval(x);
  }
  return out;
}

double GbdtModel::predict_value(std::span<const double> x) const {
  if (loss != Loss::SquaredError) {
    throw Error("gbdt: predict_value requires a regression model");
  }
  return predict_raw(x)[0];
}

std::vector<double> GbdtModel::predict_proba(std::span<const double> x) const {
  if (loss == Loss::SquaredError) {
    throw Error("gbdt: predict_proba requires a classification model");
  }
  const std::vector<double> raw = predict_raw(x);
  if (loss == Loss::LogisticBinary) {
    const double p = sigmoid(raw[0]);
    return {1.0 - p, p};
  }
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : raw) {
    mx = std::max(mx, v);
  }
  std::vector<double> probs(raw.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    probs[k] = std::exp(raw[k] - mx);
    sum += probs[k];
  }
  for (double& p : probs) {
    p /= sum;
  }
  return probs;
}

nlohmann::json model_to_json(const GbdtModel& model) {
  nlohmann::json trees = nlohmann::json::array();
  for (const Tree& tree : model.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& n : tree.nodes) {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"value", n.value}});
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  return {{"version", "gbdt-v1"},
          {"loss", loss_name(model.loss)},
          {"n_features", model.n_features},
          {"n_outputs", model.n_outputs},
          {"base_scores", model.base_scores},
          {"trees", std::move(trees)}};
}

GbdtModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("version", "") != "gbdt-v1") {
    throw Error("gbdt model: expected version \"gbdt-v1\"");
  }
  GbdtModel model;
  model.loss = loss_from_name(j.at("loss").get<std::string>());
  model.n_features = j.at("n_features").get<std::size_t>();
  model.n_outputs = j.at("n_outputs").get<std::size_t>();
  model.base_scores = j.at("base_scores").get<std::vector<double>>();
  if (model.base_scores.size() != model.n_outputs) {
    throw Error("gbdt model: base_scores size mismatch");
  }
  for (const auto& jt : j.at("trees")) {
    Tree tree;
    for (const auto& jn : jt.at("nodes")) {
      TreeNode node;
      node.feature = jn.at("feature").get<int>();
      node.threshold = jn.at("threshold").get<double>();
      node.left = jn.at("left").get<int>();
      node.right = jn.at("right").get<int>();
      node.value = jn.at("value").get<double>();
      if (node.feature >= static_cast<int>(model.n_features)) {
        throw Error("gbdt model: node feature index out of range");
      }
      tree.nodes.push_back(node);
    }
    if (tree.nodes.empty()) {
      throw Error("gbdt model: empty tree");
    }
    model.trees.push_back(std::move(tree));
  }
  if (model.trees.size() % model.n_outputs != 0) {
    throw Error("gbdt model: tree count not a multiple of outputs");
  }
  return model;
}

GbdtModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open model file '" + path + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("model file '" + path + "': " + e.what());
  }
  return model_from_json(j);
}

void save_model(const GbdtModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write model file '" + path + "'");
  }
  out << model_to_json(model).dump() << '\n';
}

}  // namespace tabaudit
