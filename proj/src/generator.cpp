#include "tabaudit/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "tabaudit/error.hpp"
#include "tabaudit/rng.hpp"

namespace tabaudit {

void GeneratorSpec::validate() const {
  if (!(leakage >= 0.0 && leakage <= 1.0)) {
    throw Error("generator: leakage must lie in [0, 1]");
  }
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    throw Error("generator: noise_scale must be non-negative");
  }
  if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) {
    throw Error("generator: flip_prob must lie in [0, 1]");
  }
}

PopulationModel fit_population_model(const Dataset& reference) {
  if (reference.empty()) {
    throw Error("fit_population_model: empty dataset");
  }
  PopulationModel model;
  model.schema = reference.schema();
  const std::size_t n = reference.row_count();
  for (std::size_t c = 0; c < reference.column_count(); ++c) {
    ColumnMarginal marginal;
    const ColumnSchema& col = reference.schema().columns[c];
    if (col.kind == ColumnKind::Numeric) {
      marginal.numeric_values = reference.column(c);
    } else {
      std::vector<std::size_t> counts(col.categories.size(), 0);
      for (std::size_t r = 0; r < n; ++r) {
        ++counts[reference.category(r, c)];
      }
      marginal.category_freq.resize(counts.size());
      marginal.category_cum.resize(counts.size());
      double cum = 0.0;
      for (std::size_t k = 0; k < counts.size(); ++k) {
        marginal.category_freq[k] =
            static_cast<double>(counts[k]) / static_cast<double>(n);
        cum += marginal.category_freq[k];
        marginal.category_cum[k] = cum;
      }
      // Guard the top of the cumulative table against rounding.
      marginal.category_cum.back() = 1.0;
    }
    model.marginals.push_back(std::move(marginal));
  }
  return model;
}

namespace {

std::size_t sample_category(const ColumnMarginal& marginal, Rng& rng) {
  const double u = rng.uniform();
  const auto it = std::upper_bound(marginal.category_cum.begin(),
                                   marginal.category_cum.end(), u);
  const std::size_t k = static_cast<std::size_t>(
      it - marginal.category_cum.begin());
  return std::min(k, marginal.category_cum.size() - 1);
}

void check_same_schema(const TableSchema& a, const TableSchema& b,
                       const char* what) {
  if (!(a.columns == b.columns)) {
    throw Error(std::string("generator: ") + what +
                " schema does not match the member schema");
  }
}

}  // namespace

LeakyGenerator::LeakyGenerator(GeneratorSpec spec, PopulationModel population)
    : spec_(spec), population_(std::move(population)) {
  spec_.validate();
}

Dataset LeakyGenerator::generate(const Dataset& members, std::size_t n,
                                 std::uint64_t seed) const {
  if (members.empty()) {
    throw Error("generator: member dataset is empty");
  }
  if (n == 0) {
    throw Error("generator: sample count must be positive");
  }
  check_same_schema(population_.schema, members.schema(), "population");

  const TableSchema& schema = members.schema();
  const std::size_t n_cols = schema.columns.size();
  std::vector<double> col_std(n_cols, 0.0);
  for (std::size_t c = 0; c < n_cols; ++c) {
    if (schema.columns[c].kind == ColumnKind::Numeric) {
      col_std[c] = column_stddev(members, c);
    }
  }

  Rng rng(seed);
  Dataset out(schema, Provenance::Synthetic);
  out.reserve(n);
  std::vector<double> cells(n_cols);
  for (std::size_t r = 0; r < n; ++r) {
    const bool copy = rng.uniform() < spec_.leakage;
    if (copy) {
      const std::size_t src = rng.uniform_index(members.row_count());
      const auto row = members.row(src);
      std::copy(row.begin(), row.end(), cells.begin());
      for (std::size_t c = 0; c < n_cols; ++c) {
        if (schema.columns[c].kind == ColumnKind::Numeric) {
          // Zero-variance columns stay exact copies.
          if (spec_.noise_scale > 0.0 && col_std[c] > 0.0) {
            cells[c] += rng.gaussian() * spec_.noise_scale * col_std[c];
          }
        } else {
          const double flip = rng.uniform();
          if (flip < spec_.flip_prob) {
            cells[c] = static_cast<double>(
                sample_category(population_.marginals[c], rng));
          }
        }
      }
    } else {
      for (std::size_t c = 0; c < n_cols; ++c) {
        const ColumnMarginal& marginal = population_.marginals[c];
        if (schema.columns[c].kind == ColumnKind::Numeric) {
          const std::size_t k =
              rng.uniform_index(marginal.numeric_values.size());
          cells[c] = marginal.numeric_values[k];
        } else {
          cells[c] = static_cast<double>(sample_category(marginal, rng));
        }
      }
    }
    out.append_row(cells);
  }
  return out;
}

ExternalCommandGenerator::ExternalCommandGenerator(std::string command_template,
                                                   std::string work_dir)
    : command_template_(std::move(command_template)),
      work_dir_(std::move(work_dir)) {
  if (command_template_.empty()) {
    throw Error("generator: empty external command template");
  }
}

namespace {

void replace_all(std::string& text, std::string_view what,
                 const std::string& with) {
  std::size_t at = 0;
  while ((at = text.find(what, at)) != std::string::npos) {
    text.replace(at, what.size(), with);
    at += with.size();
  }
}

}  // namespace

Dataset ExternalCommandGenerator::generate(const Dataset& members,
                                           std::size_t n,
                                           std::uint64_t seed) const {
  if (members.empty()) {
    throw Error("generator: member dataset is empty");
  }
  if (n == 0) {
    throw Error("generator: sample count must be positive");
  }
  namespace fs = std::filesystem;
  fs::create_directories(work_dir_);
  const std::string tag = std::to_string(seed);
  const std::string input =
      (fs::path(work_dir_) / ("members_" + tag + ".csv")).string();
  const std::string output =
      (fs::path(work_dir_) / ("synthetic_" + tag + ".csv")).string();

  write_csv_file(input, decode_dataset(members));

  std::string cmd = command_template_;
  replace_all(cmd, "{input}", input);
  replace_all(cmd, "{output}", output);
  replace_all(cmd, "{n}", std::to_string(n));
  replace_all(cmd, "{seed}", tag);

  const int status = std::system(cmd.c_str());
  if (status != 0) {
    throw Error("external generator failed (exit status " +
                std::to_string(status) + "): " + cmd);
  }
  const RawTable raw = read_csv_file(output);
  // Encode against the member schema: categories may not grow.
  return encode_dataset(raw, members.schema(), Provenance::Synthetic);
}

}  // namespace tabaudit
