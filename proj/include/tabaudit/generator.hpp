#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tabaudit/dataset.hpp"

namespace tabaudit {

// Controls for the reference leaky generator. leakage is the probability a
// synthetic row is a perturbed copy of a member row; copied rows get
// noise_scale * column_std Gaussian noise on numeric cells and each
// categorical cell resampled from the population marginal with probability
// flip_prob. Non-copy rows sample every cell independently from the
// population marginals.
struct GeneratorSpec {
  double leakage = 1.0;
  double noise_scale = 0.0;
  double flip_prob = 0.0;

  void validate() const;
};

// Per-column empirical marginals fitted on a reference dataset.
struct ColumnMarginal {
  std::vector<double> numeric_values;    // numeric columns: observed values
  std::vector<double> category_freq;     // categorical: frequencies, sum 1
  std::vector<double> category_cum;      // cumulative, for sampling
};

struct PopulationModel {
  TableSchema schema;
  std::vector<ColumnMarginal> marginals;
};

PopulationModel fit_population_model(const Dataset& reference);

// Anything that turns a member table into a synthetic table. The attack
// never looks inside; only the synthetic output crosses this boundary.
class SyntheticGenerator {
 public:
  virtual ~SyntheticGenerator() = default;
  virtual Dataset generate(const Dataset& members, std::size_t n,
                           std::uint64_t seed) const = 0;
};

class LeakyGenerator : public SyntheticGenerator {
 public:
  LeakyGenerator(GeneratorSpec spec, PopulationModel population);
  Dataset generate(const Dataset& members, std::size_t n,
                   std::uint64_t seed) const override;

  const GeneratorSpec& spec() const { return spec_; }

 private:
  GeneratorSpec spec_;
  PopulationModel population_;
};

// Adapter for external tools: a command template with the placeholders
// {input}, {output}, {n} and {seed}. The command must read the member CSV,
// write a synthetic CSV conforming to the schema, and exit with status 0.
class ExternalCommandGenerator : public SyntheticGenerator {
 public:
  ExternalCommandGenerator(std::string command_template,
                           std::string work_dir);
  Dataset generate(const Dataset& members, std::size_t n,
                   std::uint64_t seed) const override;

 private:
  std::string command_template_;
  std::string work_dir_;
};

}  // namespace tabaudit
