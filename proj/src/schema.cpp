#include "tabaudit/schema.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "tabaudit/error.hpp"

namespace tabaudit {

bool ColumnSchema::has_category(std::string_view value) const {
  return std::binary_search(categories.begin(), categories.end(), value);
}

std::size_t ColumnSchema::category_index(std::string_view value) const {
  const auto it = std::lower_bound(categories.begin(), categories.end(), value);
  if (it == categories.end() || *it != value) {
    throw Error("unseen category '" + std::string(value) + "' in column '" +
                name + "'");
  }
  return static_cast<std::size_t>(it - categories.begin());
}

void TableSchema::validate() const {
  std::unordered_set<std::string_view> seen;
  for (const auto& col : columns) {
    if (col.name.empty()) {
      throw Error("schema: empty column name");
    }
    if (!seen.insert(col.name).second) {
      throw Error("schema: duplicate column name '" + col.name + "'");
    }
    if (col.kind == ColumnKind::Categorical) {
      if (col.categories.empty()) {
        throw Error("schema: categorical column '" + col.name +
                    "' has no categories");
      }
      for (std::size_t i = 1; i < col.categories.size(); ++i) {
        if (!(col.categories[i - 1] < col.categories[i])) {
          throw Error("schema: categories of column '" + col.name +
                      "' are not strictly sorted");
        }
      }
    } else if (!col.categories.empty()) {
      throw Error("schema: numeric column '" + col.name +
                  "' must not list categories");
    }
  }
  if (key && !has_column(*key)) {
    throw Error("schema: key column '" + *key + "' does not exist");
  }
  for (const auto& fk : foreign_keys) {
    if (!has_column(fk.column)) {
      throw Error("schema: foreign-key column '" + fk.column +
                  "' does not exist");
    }
  }
}

bool TableSchema::has_column(std::string_view name) const {
  return std::any_of(columns.begin(), columns.end(),
                     [&](const ColumnSchema& c) { return c.name == name; });
}

std::size_t TableSchema::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) {
      return i;
    }
  }
  throw Error("schema: no column named '" + std::string(name) + "'");
}

bool TableSchema::excluded_from_features(std::size_t column) const {
  const std::string& name = columns.at(column).name;
  if (key && *key == name) {
    return true;
  }
  return std::any_of(foreign_keys.begin(), foreign_keys.end(),
                     [&](const ForeignKey& fk) { return fk.column == name; });
}

std::vector<std::size_t> TableSchema::feature_columns() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (!excluded_from_features(i)) {
      out.push_back(i);
    }
  }
  return out;
}

std::string_view column_kind_name(ColumnKind kind) {
  return kind == ColumnKind::Numeric ? "numeric" : "categorical";
}

ColumnKind column_kind_from_name(std::string_view name) {
  if (name == "numeric") {
    return ColumnKind::Numeric;
  }
  if (name == "categorical") {
    return ColumnKind::Categorical;
  }
  throw Error("unknown column kind '" + std::string(name) + "'");
}

nlohmann::json schema_to_json(const TableSchema& schema) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& col : schema.columns) {
    nlohmann::json jc{{"name", col.name},
                      {"kind", column_kind_name(col.kind)}};
    if (col.kind == ColumnKind::Categorical) {
      jc["categories"] = col.categories;
    }
    cols.push_back(std::move(jc));
  }
  nlohmann::json j{{"version", "schema-v1"}, {"columns", std::move(cols)}};
  if (schema.key) {
    j["key"] = *schema.key;
  }
  if (!schema.foreign_keys.empty()) {
    nlohmann::json fks = nlohmann::json::array();
    for (const auto& fk : schema.foreign_keys) {
      fks.push_back({{"column", fk.column},
                     {"parent_table", fk.parent_table},
                     {"parent_key", fk.parent_key}});
    }
    j["foreign_keys"] = std::move(fks);
  }
  return j;
}

TableSchema schema_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("version", "") != "schema-v1") {
    throw Error("schema file: expected version \"schema-v1\"");
  }
  TableSchema schema;
  for (const auto& jc : j.at("columns")) {
    ColumnSchema col;
    col.name = jc.at("name").get<std::string>();
    col.kind = column_kind_from_name(jc.at("kind").get<std::string>());
    if (col.kind == ColumnKind::Categorical) {
      col.categories = jc.at("categories").get<std::vector<std::string>>();
    }
    schema.columns.push_back(std::move(col));
  }
  if (j.contains("key")) {
    schema.key = j.at("key").get<std::string>();
  }
  if (j.contains("foreign_keys")) {
    for (const auto& jf : j.at("foreign_keys")) {
      schema.foreign_keys.push_back(
          ForeignKey{jf.at("column").get<std::string>(),
                     jf.at("parent_table").get<std::string>(),
                     jf.at("parent_key").get<std::string>()});
    }
  }
  schema.validate();
  return schema;
}

TableSchema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open schema file '" + path + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("schema file '" + path + "': " + e.what());
  }
  return schema_from_json(j);
}

void save_schema(const TableSchema& schema, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write schema file '" + path + "'");
  }
  out << schema_to_json(schema).dump(2) << '\n';
}

}  // namespace tabaudit
