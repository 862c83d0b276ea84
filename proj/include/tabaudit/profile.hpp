#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabaudit/dataset.hpp"
#include "tabaudit/gbdt.hpp"

namespace tabaudit {

// The five per-column reconstruction signals. Error and ErrorRatio exist for
// numeric columns only, Accuracy for categorical only; Actual and Prediction
// for both.
enum class FeatureKind : std::uint8_t {
  Actual = 0,
  Prediction = 1,
  Error = 2,
  ErrorRatio = 3,
  Accuracy = 4,
};

inline constexpr std::array<FeatureKind, 5> kFeatureKindOrder = {
    FeatureKind::Actual, FeatureKind::Prediction, FeatureKind::Error,
    FeatureKind::ErrorRatio, FeatureKind::Accuracy};

std::string_view feature_kind_name(FeatureKind kind);
FeatureKind feature_kind_from_name(std::string_view name);
bool feature_applies(FeatureKind kind, ColumnKind column);

// Non-empty subset of FeatureKind, named "actual+error+accuracy" style with
// tokens in the fixed kind order.
class FeatureSet {
 public:
  FeatureSet() = default;
  static FeatureSet of(std::initializer_list<FeatureKind> kinds);
  static FeatureSet full();
  static FeatureSet parse(std::string_view text);   // "+"-separated tokens
  static std::vector<FeatureSet> all_non_empty();   // the 31 subsets

  void add(FeatureKind kind) { bits_ |= mask(kind); }
  bool contains(FeatureKind kind) const { return bits_ & mask(kind); }
  bool empty() const { return bits_ == 0; }
  std::string name() const;

  auto operator<=>(const FeatureSet&) const = default;

 private:
  static std::uint8_t mask(FeatureKind kind) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(kind));
  }
  std::uint8_t bits_ = 0;
};

struct LayoutEntry {
  std::size_t column;
  FeatureKind kind;

  bool operator==(const LayoutEntry&) const = default;
};

// Profile vector layout: feature columns in schema order, kinds in the fixed
// order within a column, only applicable (column kind, feature kind) pairs.
struct ProfileLayout {
  std::vector<LayoutEntry> entries;

  std::size_t width() const { return entries.size(); }
  bool operator==(const ProfileLayout&) const = default;
};

// Throws "no applicable features" when the combination is empty.
ProfileLayout build_profile_layout(const TableSchema& schema,
                                   const FeatureSet& features);

nlohmann::json layout_to_json(const ProfileLayout& layout,
                              const TableSchema& schema);
ProfileLayout layout_from_json(const nlohmann::json& j,
                               const TableSchema& schema);

struct ErrorRatioParams {
  double eps = 1e-8;
  double cap = 1e6;
};

// min(|actual - predicted| / max(|actual|, eps), cap)
double compute_error_ratio(double actual, double predicted, double eps,
                           double cap);

// Per-column model trained on synthetic data to reconstruct its target
// column from the remaining feature columns.
struct AttributePredictor {
  std::size_t target_column;
  GbdtModel model;
};

struct PredictorTrainOptions {
  GbdtHyperparams hyper;      // loss field is set internally per column
  std::size_t min_rows = 100;
};

// One predictor per feature column, trained only on the synthetic table
// (Provenance::Synthetic enforced). Column c trains with seed
// derive_seed(seed, "column", c). Fails if a categorical column is missing
// one of its schema categories.
std::vector<AttributePredictor> train_attribute_predictors(
    const Dataset& synthetic, const PredictorTrainOptions& options,
    std::uint64_t seed);

struct ErrorProfile {
  std::string record_id;
  std::vector<double> values;
  std::optional<int> label;
};

// Masks each layout column of the record, predicts it with the matching
// predictor, and emits the layout's signals. Categorical predictions take
// the argmax class, ties resolving to the lowest index.
ErrorProfile extract_profile(const std::vector<AttributePredictor>& predictors,
                             const ProfileLayout& layout, const Dataset& data,
                             std::size_t row,
                             const ErrorRatioParams& ratio = {});

// Batch of profiles sharing one layout.
struct ProfileTable {
  ProfileLayout layout;
  FeatureSet features;
  FeatureMatrix values;
  std::vector<int> labels;           // empty when unlabeled
  std::vector<std::string> ids;
};

// Extracts profiles for every row of data (parallel across rows). label < 0
// means unlabeled; ids default to "<id_prefix><row>".
ProfileTable extract_profile_table(
    const std::vector<AttributePredictor>& predictors,
    const ProfileLayout& layout, const FeatureSet& features,
    const Dataset& data, const std::string& id_prefix, int label,
    const ErrorRatioParams& ratio = {});

// Keeps the columns of `full` whose kind lies in `sub`; `full` must contain
// every kind of `sub`.
ProfileTable project_profiles(const ProfileTable& full, const FeatureSet& sub);

// Concatenates rows; layouts must match exactly.
void append_profiles(ProfileTable& dst, const ProfileTable& src);

}  // namespace tabaudit
