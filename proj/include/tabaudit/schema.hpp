#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tabaudit {

enum class ColumnKind { Numeric, Categorical };

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  // Categorical only: distinct category strings, strictly sorted. A cell is
  // encoded as its index into this list.
  std::vector<std::string> categories;

  bool has_category(std::string_view value) const;
  std::size_t category_index(std::string_view value) const;  // throws if unseen

  bool operator==(const ColumnSchema&) const = default;
};

struct ForeignKey {
  std::string column;  // local column name
  std::string parent_table;
  std::string parent_key;

  bool operator==(const ForeignKey&) const = default;
};

struct TableSchema {
  std::vector<ColumnSchema> columns;
  std::optional<std::string> key;
  std::vector<ForeignKey> foreign_keys;

  void validate() const;
  bool has_column(std::string_view name) const;
  std::size_t column_index(std::string_view name) const;  // throws if absent

  // Identifier and foreign-key columns never enter prediction, neither as
  // targets nor as inputs.
  bool excluded_from_features(std::size_t column) const;
  std::vector<std::size_t> feature_columns() const;

  bool operator==(const TableSchema&) const = default;
};

std::string_view column_kind_name(ColumnKind kind);
ColumnKind column_kind_from_name(std::string_view name);

// File format "schema-v1":
// {"version":"schema-v1","columns":[{"name","kind","categories"?}],
//  "key"?, "foreign_keys"?:[{"column","parent_table","parent_key"}]}
nlohmann::json schema_to_json(const TableSchema& schema);
TableSchema schema_from_json(const nlohmann::json& j);
TableSchema load_schema(const std::string& path);
void save_schema(const TableSchema& schema, const std::string& path);

}  // namespace tabaudit
