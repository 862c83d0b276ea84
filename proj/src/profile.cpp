#include "tabaudit/profile.hpp"

#include <algorithm>
#include <cmath>

#include "tabaudit/error.hpp"
#include "tabaudit/parallel.hpp"
#include "tabaudit/rng.hpp"

namespace tabaudit {

std::string_view feature_kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Actual:
      return "actual";
    case FeatureKind::Prediction:
      return "prediction";
    case FeatureKind::Error:
      return "error";
    case FeatureKind::ErrorRatio:
      return "error_ratio";
    case FeatureKind::Accuracy:
      return "accuracy";
  }
  throw Error("unknown feature kind");
}

FeatureKind feature_kind_from_name(std::string_view name) {
  for (FeatureKind kind : kFeatureKindOrder) {
    if (feature_kind_name(kind) == name) {
      return kind;
    }
  }
  throw Error("unknown feature kind '" + std::string(name) + "'");
}

bool feature_applies(FeatureKind kind, ColumnKind column) {
  switch (kind) {
    case FeatureKind::Actual:
    case FeatureKind::Prediction:
      return true;
    case FeatureKind::Error:
    case FeatureKind::ErrorRatio:
      return column == ColumnKind::Numeric;
    case FeatureKind::Accuracy:
      return column == ColumnKind::Categorical;
  }
  return false;
}

FeatureSet FeatureSet::of(std::initializer_list<FeatureKind> kinds) {
  FeatureSet set;
  for (FeatureKind kind : kinds) {
    set.add(kind);
  }
  return set;
}

FeatureSet FeatureSet::full() {
  FeatureSet set;
  for (FeatureKind kind : kFeatureKindOrder) {
    set.add(kind);
  }
  return set;
}

FeatureSet FeatureSet::parse(std::string_view text) {
  FeatureSet set;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t plus = text.find('+', start);
    const std::size_t end = plus == std::string_view::npos ? text.size() : plus;
    set.add(feature_kind_from_name(text.substr(start, end - start)));
    if (plus == std::string_view::npos) {
      break;
    }
    start = plus + 1;
  }
  if (set.empty()) {
    throw Error("feature set must not be empty");
  }
  return set;
}

std::vector<FeatureSet> FeatureSet::all_non_empty() {
  std::vector<FeatureSet> sets;
  for (std::uint8_t bits = 1; bits < (1u << kFeatureKindOrder.size());
       ++bits) {
    FeatureSet set;
    set.bits_ = bits;
    sets.push_back(set);
  }
  return sets;
}

std::string FeatureSet::name() const {
  std::string out;
  for (FeatureKind kind : kFeatureKindOrder) {
    if (contains(kind)) {
      if (!out.empty()) {
        out += '+';
      }
      out += feature_kind_name(kind);
    }
  }
  return out;
}

ProfileLayout build_profile_layout(const TableSchema& schema,
                                   const FeatureSet& features) {
  if (features.empty()) {
    throw Error("profile layout: feature set must not be empty");
  }
  ProfileLayout layout;
  for (std::size_t c : schema.feature_columns()) {
    for (FeatureKind kind : kFeatureKindOrder) {
      if (features.contains(kind) &&
          feature_applies(kind, schema.columns[c].kind)) {
        layout.entries.push_back({c, kind});
      }
    }
  }
  if (layout.entries.empty()) {
    throw Error("profile layout: no applicable features for this schema");
  }
  return layout;
}

nlohmann::json layout_to_json(const ProfileLayout& layout,
                              const TableSchema& schema) {
  nlohmann::json entries = nlohmann::json::array();
  for (const LayoutEntry& e : layout.entries) {
    entries.push_back({{"column", schema.columns[e.column].name},
                       {"kind", feature_kind_name(e.kind)}});
  }
  return {{"version", "layout-v1"},
          {"width", layout.width()},
          {"entries", std::move(entries)}};
}

ProfileLayout layout_from_json(const nlohmann::json& j,
                               const TableSchema& schema) {
  if (!j.is_object() || j.value("version", "") != "layout-v1") {
    throw Error("layout file: expected version \"layout-v1\"");
  }
  ProfileLayout layout;
  for (const auto& je : j.at("entries")) {
    layout.entries.push_back(
        {schema.column_index(je.at("column").get<std::string>()),
         feature_kind_from_name(je.at("kind").get<std::string>())});
  }
  if (layout.entries.size() != j.at("width").get<std::size_t>()) {
    throw Error("layout file: width does not match entries");
  }
  return layout;
}

double compute_error_ratio(double actual, double predicted, double eps,
                           double cap) {
  const double denom = std::max(std::abs(actual), eps);
  return std::min(std::abs(actual - predicted) / denom, cap);
}

std::vector<AttributePredictor> train_attribute_predictors(
    const Dataset& synthetic, const PredictorTrainOptions& options,
    std::uint64_t seed) {
  if (synthetic.provenance() != Provenance::Synthetic) {
    throw Error("attribute predictors must train on synthetic data, never on "
                "real records");
  }
  const TableSchema& schema = synthetic.schema();
  const std::vector<std::size_t> feat_cols = schema.feature_columns();
  if (feat_cols.size() < 2) {
    throw Error("attribute predictors need at least two feature columns");
  }
  if (synthetic.row_count() < options.min_rows) {
    throw Error("attribute predictors need at least " +
                std::to_string(options.min_rows) + " synthetic rows, got " +
                std::to_string(synthetic.row_count()));
  }

  // Every schema category must occur, otherwise the predictor could never
  // emit that class.
  for (std::size_t c : feat_cols) {
    const ColumnSchema& col = schema.columns[c];
    if (col.kind != ColumnKind::Categorical) {
      continue;
    }
    std::vector<bool> seen(col.categories.size(), false);
    for (std::size_t r = 0; r < synthetic.row_count(); ++r) {
      seen[synthetic.category(r, c)] = true;
    }
    for (std::size_t k = 0; k < seen.size(); ++k) {
      if (!seen[k]) {
        throw Error("synthetic data is missing category '" +
                    col.categories[k] + "' of column '" + col.name +
                    "'; the predictor for that column cannot be trained");
      }
    }
  }

  const std::size_t n = synthetic.row_count();
  std::vector<AttributePredictor> predictors(feat_cols.size());
  parallel_for(feat_cols.size(), [&](std::size_t slot) {
    const std::size_t target = feat_cols[slot];
    FeatureMatrix x(n, feat_cols.size() - 1);
    for (std::size_t r = 0; r < n; ++r) {
      std::size_t w = 0;
      for (std::size_t c : feat_cols) {
        if (c != target) {
          x.at(r, w++) = synthetic.value(r, c);
        }
      }
    }
    const std::uint64_t column_seed = derive_seed(seed, "column", target);
    const ColumnSchema& col = schema.columns[target];
    GbdtHyperparams hp = options.hyper;
    GbdtModel model;
    if (col.kind == ColumnKind::Numeric) {
      hp.loss = Loss::SquaredError;
      model = fit_regression(x, synthetic.column(target), hp, column_seed);
    } else {
      const std::size_t n_classes = col.categories.size();
      hp.loss = n_classes == 2 ? Loss::LogisticBinary
                               : Loss::SoftmaxMulticlass;
      std::vector<int> y(n);
      for (std::size_t r = 0; r < n; ++r) {
        y[r] = static_cast<int>(synthetic.category(r, target));
      }
      model = fit_classification(x, y, n_classes, hp, column_seed);
    }
    predictors[slot] = AttributePredictor{target, std::move(model)};
  });
  return predictors;
}

namespace {

std::size_t argmax_lowest(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) {
      best = k;
    }
  }
  return best;
}

struct ColumnPrediction {
  double predicted = 0.0;   // value or argmax class index
};

ColumnPrediction predict_column(const AttributePredictor& predictor,
                                const TableSchema& schema, const Dataset& data,
                                std::size_t row) {
  std::vector<double> input;
  input.reserve(predictor.model.n_features);
  for (std::size_t c : schema.feature_columns()) {
    if (c != predictor.target_column) {
      input.push_back(data.value(row, c));
    }
  }
  if (input.size() != predictor.model.n_features) {
    throw Error("profile: record does not match the predictor's schema");
  }
  ColumnPrediction out;
  if (schema.columns[predictor.target_column].kind == ColumnKind::Numeric) {
    out.predicted = predictor.model.predict_value(input);
  } else {
    const std::vector<double> probs = predictor.model.predict_proba(input);
    out.predicted = static_cast<double>(argmax_lowest(probs));
  }
  return out;
}

}  // namespace

ErrorProfile extract_profile(const std::vector<AttributePredictor>& predictors,
                             const ProfileLayout& layout, const Dataset& data,
                             std::size_t row, const ErrorRatioParams& ratio) {
  const TableSchema& schema = data.schema();
  // Predict each layout column once, then emit its signals.
  std::vector<double> predicted(schema.columns.size(), 0.0);
  std::vector<bool> have(schema.columns.size(), false);
  for (const LayoutEntry& entry : layout.entries) {
    if (have[entry.column]) {
      continue;
    }
    const auto it = std::find_if(
        predictors.begin(), predictors.end(),
        [&](const AttributePredictor& p) {
          return p.target_column == entry.column;
        });
    if (it == predictors.end()) {
      throw Error("profile: no predictor for column '" +
                  schema.columns[entry.column].name + "'");
    }
    predicted[entry.column] = predict_column(*it, schema, data, row).predicted;
    have[entry.column] = true;
  }

  ErrorProfile profile;
  profile.values.reserve(layout.width());
  for (const LayoutEntry& entry : layout.entries) {
    const double actual = data.value(row, entry.column);
    const double guess = predicted[entry.column];
    switch (entry.kind) {
      case FeatureKind::Actual:
        profile.values.push_back(actual);
        break;
      case FeatureKind::Prediction:
        profile.values.push_back(guess);
        break;
      case FeatureKind::Error:
        profile.values.push_back(std::abs(actual - guess));
        break;
      case FeatureKind::ErrorRatio:
        profile.values.push_back(
            compute_error_ratio(actual, guess, ratio.eps, ratio.cap));
        break;
      case FeatureKind::Accuracy:
        profile.values.push_back(actual == guess ? 1.0 : 0.0);
        break;
    }
  }
  return profile;
}

ProfileTable extract_profile_table(
    const std::vector<AttributePredictor>& predictors,
    const ProfileLayout& layout, const FeatureSet& features,
    const Dataset& data, const std::string& id_prefix, int label,
    const ErrorRatioParams& ratio) {
  ProfileTable table;
  table.layout = layout;
  table.features = features;
  const std::size_t n = data.row_count();
  table.values = FeatureMatrix(n, layout.width());
  table.ids.resize(n);
  if (label >= 0) {
    table.labels.assign(n, label);
  }
  parallel_for(n, [&](std::size_t r) {
    const ErrorProfile profile =
        extract_profile(predictors, layout, data, r, ratio);
    for (std::size_t k = 0; k < layout.width(); ++k) {
      table.values.at(r, k) = profile.values[k];
    }
    table.ids[r] = id_prefix + std::to_string(r);
  });
  return table;
}

ProfileTable project_profiles(const ProfileTable& full,
                              const FeatureSet& sub) {
  if (sub.empty()) {
    throw Error("project_profiles: feature set must not be empty");
  }
  std::vector<std::size_t> keep;
  ProfileLayout layout;
  for (std::size_t k = 0; k < full.layout.entries.size(); ++k) {
    if (sub.contains(full.layout.entries[k].kind)) {
      keep.push_back(k);
      layout.entries.push_back(full.layout.entries[k]);
    }
  }
  for (FeatureKind kind : kFeatureKindOrder) {
    if (sub.contains(kind) && !full.features.contains(kind)) {
      throw Error("project_profiles: source table lacks feature '" +
                  std::string(feature_kind_name(kind)) + "'");
    }
  }
  if (layout.entries.empty()) {
    throw Error("project_profiles: no applicable features for this schema");
  }

  ProfileTable out;
  out.layout = std::move(layout);
  out.features = sub;
  out.labels = full.labels;
  out.ids = full.ids;
  out.values = FeatureMatrix(full.values.rows(), keep.size());
  for (std::size_t r = 0; r < full.values.rows(); ++r) {
    for (std::size_t k = 0; k < keep.size(); ++k) {
      out.values.at(r, k) = full.values.at(r, keep[k]);
    }
  }
  return out;
}

void append_profiles(ProfileTable& dst, const ProfileTable& src) {
  if (dst.values.rows() == 0 && dst.layout.entries.empty()) {
    dst = src;
    return;
  }
  if (!(dst.layout == src.layout)) {
    throw Error("profiles from mixed layouts cannot be combined");
  }
  const std::size_t old_rows = dst.values.rows();
  FeatureMatrix merged(old_rows + src.values.rows(), dst.values.cols());
  for (std::size_t r = 0; r < old_rows; ++r) {
    for (std::size_t c = 0; c < dst.values.cols(); ++c) {
      merged.at(r, c) = dst.values.at(r, c);
    }
  }
  for (std::size_t r = 0; r < src.values.rows(); ++r) {
    for (std::size_t c = 0; c < src.values.cols(); ++c) {
      merged.at(old_rows + r, c) = src.values.at(r, c);
    }
  }
  dst.values = std::move(merged);
  dst.labels.insert(dst.labels.end(), src.labels.begin(), src.labels.end());
  dst.ids.insert(dst.ids.end(), src.ids.begin(), src.ids.end());
}

}  // namespace tabaudit
