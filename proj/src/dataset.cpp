#include "tabaudit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "tabaudit/error.hpp"

namespace tabaudit {

namespace {

std::string format_value(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool is_integer_token(std::string_view s) {
  std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (i >= s.size()) {
    return false;
  }
  return std::all_of(s.begin() + i, s.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

Dataset::Dataset(TableSchema schema, Provenance provenance)
    : schema_(std::move(schema)),
      provenance_(provenance),
      width_(schema_.columns.size()) {
  schema_.validate();
}

void Dataset::reserve(std::size_t rows) { cells_.reserve(rows * width_); }

void Dataset::append_row(std::span<const double> cells) {
  if (cells.size() != width_) {
    throw Error("dataset: row has " + std::to_string(cells.size()) +
                " cells, schema has " + std::to_string(width_) + " columns");
  }
  for (std::size_t c = 0; c < width_; ++c) {
    const double v = cells[c];
    const ColumnSchema& col = schema_.columns[c];
    if (!std::isfinite(v)) {
      throw Error("dataset: non-finite value in column '" + col.name + "'");
    }
    if (col.kind == ColumnKind::Categorical) {
      if (v != std::floor(v) || v < 0.0 ||
          v >= static_cast<double>(col.categories.size())) {
        throw Error("dataset: categorical index " + format_value(v) +
                    " out of range for column '" + col.name + "'");
      }
    }
  }
  cells_.insert(cells_.end(), cells.begin(), cells.end());
}

std::vector<double> Dataset::column(std::size_t c) const {
  std::vector<double> out;
  const std::size_t n = row_count();
  out.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    out.push_back(value(r, c));
  }
  return out;
}

Dataset Dataset::with_provenance(Provenance p) const {
  Dataset copy = *this;
  copy.provenance_ = p;
  return copy;
}

std::optional<double> parse_numeric(std::string_view text) {
  if (text.empty()) {
    return std::nullopt;
  }
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  if (is_integer_token(text)) {
    // Integer tokens must survive the double carrier exactly, so check the
    // token itself, not the already-rounded double: |v| <= 2^53.
    constexpr long long kLimit = 1LL << 53;
    long long exact = 0;
    const auto ires = std::from_chars(begin, end, exact);
    if (ires.ec != std::errc() || ires.ptr != end || exact > kLimit ||
        exact < -kLimit) {
      return std::nullopt;
    }
  }
  return value;
}

TableSchema infer_schema(const RawTable& raw) {
  if (raw.header.empty() || raw.rows.empty()) {
    throw Error("infer_schema: empty table");
  }
  {
    std::unordered_set<std::string_view> seen;
    for (const auto& name : raw.header) {
      if (!seen.insert(name).second) {
        throw Error("infer_schema: duplicate header name '" + name + "'");
      }
    }
  }

  TableSchema schema;
  for (std::size_t c = 0; c < raw.header.size(); ++c) {
    bool has_empty = false;
    bool numeric = true;
    for (const auto& row : raw.rows) {
      const std::string& cell = row[c];
      if (cell.empty()) {
        has_empty = true;
      } else if (!parse_numeric(cell)) {
        numeric = false;
      }
    }
    ColumnSchema col;
    col.name = raw.header[c];
    if (numeric) {
      if (has_empty) {
        throw Error("infer_schema: numeric column '" + col.name +
                    "' contains an empty cell");
      }
      col.kind = ColumnKind::Numeric;
    } else {
      col.kind = ColumnKind::Categorical;
      std::set<std::string> values;
      for (const auto& row : raw.rows) {
        values.insert(row[c].empty() ? std::string("<NA>") : row[c]);
      }
      col.categories.assign(values.begin(), values.end());
    }
    schema.columns.push_back(std::move(col));
  }
  schema.validate();
  return schema;
}

Dataset encode_dataset(const RawTable& raw, const TableSchema& schema,
                       Provenance provenance) {
  schema.validate();
  if (raw.header.size() != schema.columns.size()) {
    throw Error("encode: table has " + std::to_string(raw.header.size()) +
                " columns, schema has " +
                std::to_string(schema.columns.size()));
  }
  for (std::size_t c = 0; c < raw.header.size(); ++c) {
    if (raw.header[c] != schema.columns[c].name) {
      throw Error("encode: column " + std::to_string(c) + " is '" +
                  raw.header[c] + "', schema expects '" +
                  schema.columns[c].name + "'");
    }
  }

  Dataset data(schema, provenance);
  data.reserve(raw.rows.size());
  std::vector<double> cells(schema.columns.size());
  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
      const ColumnSchema& col = schema.columns[c];
      const std::string& cell = raw.rows[r][c];
      if (col.kind == ColumnKind::Numeric) {
        const auto v = parse_numeric(cell);
        if (!v) {
          throw Error("encode: row " + std::to_string(r + 1) +
                      ", column '" + col.name + "': unparsable numeric cell '" +
                      cell + "'");
        }
        cells[c] = *v;
      } else {
        const std::string_view name = cell.empty() ? "<NA>" : cell;
        cells[c] = static_cast<double>(col.category_index(name));
      }
    }
    data.append_row(cells);
  }
  return data;
}

RawTable decode_dataset(const Dataset& data) {
  RawTable raw;
  for (const auto& col : data.schema().columns) {
    raw.header.push_back(col.name);
  }
  raw.rows.reserve(data.row_count());
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    std::vector<std::string> row;
    row.reserve(data.column_count());
    for (std::size_t c = 0; c < data.column_count(); ++c) {
      const ColumnSchema& col = data.schema().columns[c];
      if (col.kind == ColumnKind::Numeric) {
        row.push_back(format_value(data.value(r, c)));
      } else {
        row.push_back(col.categories[data.category(r, c)]);
      }
    }
    raw.rows.push_back(std::move(row));
  }
  return raw;
}

namespace {

std::string cell_as_text(const Dataset& data, std::size_t r, std::size_t c) {
  const ColumnSchema& col = data.schema().columns[c];
  if (col.kind == ColumnKind::Numeric) {
    return format_value(data.value(r, c));
  }
  return col.categories[data.category(r, c)];
}

}  // namespace

Dataset denormalize(const Dataset& parent, const Dataset& child,
                    const ForeignKey& fk) {
  const std::size_t fk_col = child.schema().column_index(fk.column);
  const std::size_t pk_col = parent.schema().column_index(fk.parent_key);

  std::unordered_map<std::string, std::size_t> parent_by_key;
  parent_by_key.reserve(parent.row_count());
  for (std::size_t r = 0; r < parent.row_count(); ++r) {
    const std::string key = cell_as_text(parent, r, pk_col);
    if (!parent_by_key.emplace(key, r).second) {
      throw Error("denormalize: duplicate parent keys ('" + key + "')");
    }
  }

  TableSchema joined;
  joined.columns = child.schema().columns;
  joined.key = child.schema().key;
  joined.foreign_keys = child.schema().foreign_keys;
  std::vector<std::size_t> parent_cols;
  for (std::size_t c = 0; c < parent.schema().columns.size(); ++c) {
    if (c == pk_col) {
      continue;
    }
    ColumnSchema col = parent.schema().columns[c];
    col.name = fk.parent_table + "." + col.name;
    joined.columns.push_back(std::move(col));
    parent_cols.push_back(c);
  }
  joined.validate();

  Dataset out(joined, child.provenance());
  out.reserve(child.row_count());
  std::vector<double> cells(joined.columns.size());
  for (std::size_t r = 0; r < child.row_count(); ++r) {
    const std::string key = cell_as_text(child, r, fk_col);
    const auto it = parent_by_key.find(key);
    if (it == parent_by_key.end()) {
      throw Error("denormalize: dangling foreign key '" + key +
                  "' in column '" + fk.column + "'");
    }
    const auto child_row = child.row(r);
    std::copy(child_row.begin(), child_row.end(), cells.begin());
    std::size_t w = child.column_count();
    for (std::size_t c : parent_cols) {
      cells[w++] = parent.value(it->second, c);
    }
    out.append_row(cells);
  }
  return out;
}

double column_mean(const Dataset& data, std::size_t column) {
  const std::size_t n = data.row_count();
  if (n == 0) {
    throw Error("column_mean: empty dataset");
  }
  double sum = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    sum += data.value(r, column);
  }
  return sum / static_cast<double>(n);
}

double column_stddev(const Dataset& data, std::size_t column) {
  const double mean = column_mean(data, column);
  const std::size_t n = data.row_count();
  double ss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double d = data.value(r, column) - mean;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(n));
}

}  // namespace tabaudit
