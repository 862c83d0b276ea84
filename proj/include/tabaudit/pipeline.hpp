#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tabaudit/attack.hpp"
#include "tabaudit/metrics.hpp"
#include "tabaudit/shadow.hpp"

namespace tabaudit {

enum class GeneratorKind { Leaky, External };

// Parsed "config-v1" document. Paths are resolved relative to the config
// file; the TABAUDIT_OUTPUT_DIR environment variable overrides output_dir.
struct RunConfig {
  std::string aux_csv;
  std::string schema_json;            // empty: infer from aux
  std::string target_synthetic_csv;   // empty: skip target stage
  std::string challenge_csv;          // empty: skip scoring
  std::string output_dir;

  ShadowRunPlan plan;

  GeneratorKind generator_kind = GeneratorKind::Leaky;
  GeneratorSpec leaky;
  std::string external_command;

  std::vector<std::string> feature_sets;  // "*" expands to all 31 subsets
  std::map<std::string, GbdtHyperparams> classifiers;
  GbdtHyperparams predictor_hyper;
  std::size_t min_predictor_rows = 100;
  ErrorRatioParams error_ratio;

  std::uint64_t master_seed = 42;
  double fpr_cap = 0.10;
  unsigned threads = 0;

  std::string config_hash;  // over the canonical parsed document

  static RunConfig load(const std::string& path);
  void validate() const;
  std::vector<AblationCandidate> candidates() const;
};

// Individual pipeline stages, each reading and writing artifacts under
// output_dir so they can also run as standalone subcommands.
void cmd_schema_infer(const std::string& input_csv,
                      const std::string& output_json);
// Joins a child CSV with its parent and writes the flattened table plus a
// schema file that keeps key/foreign-key columns excluded from features.
void cmd_denormalize(const std::string& parent_csv,
                     const std::string& child_csv, const ForeignKey& fk,
                     const std::string& child_key,
                     const std::string& output_csv,
                     const std::string& output_schema);
void cmd_shadow_run(const RunConfig& config);
void cmd_attack_train(const RunConfig& config);
std::vector<MembershipScore> cmd_attack_score(const std::string& bundle_dir,
                                              const std::string& challenge_csv,
                                              const std::string& output_csv);
AttackReport cmd_evaluate(const std::string& scores_csv,
                          const std::string& labels_csv, double fpr_cap,
                          const std::string& output_dir);
void cmd_ablate(const RunConfig& config);

// The whole attack: shadow runs, attack training (with selection when
// several candidates are configured), challenge scoring, evaluation on the
// held-out shadows. Writes every artifact plus a manifest; returns 0 on
// success and prints a diagnostic on failure.
int cmd_pipeline_run(const std::string& config_path,
                     std::optional<unsigned> threads_override = {});

}  // namespace tabaudit
