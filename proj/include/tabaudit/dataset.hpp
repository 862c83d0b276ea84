#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabaudit/csv.hpp"
#include "tabaudit/schema.hpp"

namespace tabaudit {

// Where a table's rows came from. Attribute predictors refuse to train on
// Real data; the tag makes that rule checkable instead of a convention.
enum class Provenance { Real, Synthetic };

// Typed, encoded table. A numeric cell stores its value; a categorical cell
// stores the index into the column's sorted category list (exact small
// integers, so the double carrier is lossless). Immutable once filled.
class Dataset {
 public:
  Dataset(TableSchema schema, Provenance provenance);

  void reserve(std::size_t rows);
  void append_row(std::span<const double> cells);  // validates kinds and ranges

  const TableSchema& schema() const { return schema_; }
  Provenance provenance() const { return provenance_; }
  std::size_t row_count() const {
    return width_ == 0 ? 0 : cells_.size() / width_;
  }
  std::size_t column_count() const { return width_; }
  bool empty() const { return cells_.empty(); }

  std::span<const double> row(std::size_t r) const {
    return {cells_.data() + r * width_, width_};
  }
  double value(std::size_t r, std::size_t c) const {
    return cells_[r * width_ + c];
  }
  std::size_t category(std::size_t r, std::size_t c) const {
    return static_cast<std::size_t>(value(r, c));
  }
  std::vector<double> column(std::size_t c) const;

  Dataset with_provenance(Provenance p) const;

 private:
  TableSchema schema_;
  Provenance provenance_;
  std::size_t width_;
  std::vector<double> cells_;
};

// Strict decimal parse: full-token, finite, from_chars grammar. Integer
// tokens beyond the exactly representable range (|v| > 2^53) are rejected
// so every stored value round-trips.
std::optional<double> parse_numeric(std::string_view text);

// A column is Numeric iff every non-empty cell parses as a finite decimal;
// otherwise Categorical with sorted distinct values, plus "<NA>" when any
// cell is empty. A would-be numeric column containing an empty cell is an
// error rather than silently imputed.
TableSchema infer_schema(const RawTable& raw);

Dataset encode_dataset(const RawTable& raw, const TableSchema& schema,
                       Provenance provenance);

// Inverse of encode for writing datasets back out: category indices become
// their strings, numeric values their shortest round-trip form.
RawTable decode_dataset(const Dataset& data);

// Parent-child join: one output row per child row, child columns first, then
// every parent non-key column renamed "<parent_table>.<name>". Key and
// foreign-key columns stay in the output but remain excluded from features.
Dataset denormalize(const Dataset& parent, const Dataset& child,
                    const ForeignKey& fk);

double column_mean(const Dataset& data, std::size_t column);
// Population standard deviation (divides by N).
double column_stddev(const Dataset& data, std::size_t column);

}  // namespace tabaudit
