#pragma once

#include <cstdint>
#include <string>

#include "tabaudit/csv.hpp"
#include "tabaudit/generator.hpp"

namespace tabaudit {

// Mixed-type table with planted cross-column structure plus idiosyncratic
// noise: eight numeric columns (two latent factors, linear combinations with
// private noise, pure noise) and four categorical columns (factor buckets
// and one independent tag). The private components are what a memorizing
// generator leaks, so end-to-end attack behaviour can be validated against
// a known leakage level.
RawTable make_benchmark_table(std::size_t rows, std::uint64_t seed);

struct BenchmarkSpec {
  std::size_t aux_rows = 2000;
  std::size_t target_members = 125;
  std::size_t target_non_members = 125;
  std::size_t target_synthetic_rows = 375;
  std::uint64_t seed = 7;
};

struct BenchmarkFiles {
  std::string aux_csv;
  std::string target_synthetic_csv;
  std::string challenge_csv;
  std::string challenge_labels_csv;
  std::string config_json;
};

// Writes aux.csv, target_synthetic.csv (leaky generator over the target
// members), challenge.csv (members and non-members shuffled, with a
// record_id column), challenge_labels.csv, and a ready-to-run config.json.
BenchmarkFiles write_benchmark_fixture(const std::string& dir,
                                       const BenchmarkSpec& spec,
                                       const GeneratorSpec& generator,
                                       std::uint64_t master_seed);

}  // namespace tabaudit
