// tabaudit: membership-inference auditing for synthetic tabular data.
//
// Subcommands mirror the pipeline stages so each can run on its own:
//   schema infer, benchmark make, shadow run, attack train, attack score,
//   evaluate, ablate, pipeline run.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tabaudit/benchmark.hpp"
#include "tabaudit/parallel.hpp"
#include "tabaudit/pipeline.hpp"
#include "tabaudit/version.hpp"

namespace {

tabaudit::RunConfig load_config(const std::string& path,
                                std::optional<unsigned> threads) {
  tabaudit::RunConfig cfg = tabaudit::RunConfig::load(path);
  if (threads) {
    cfg.threads = *threads;
  }
  tabaudit::set_worker_count(cfg.threads);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Black-box membership-inference auditing for synthetic "
               "tabular data"};
  app.set_version_flag("--version", tabaudit::kVersion);
  app.require_subcommand(1);

  // schema infer
  auto* schema = app.add_subcommand("schema", "Schema utilities");
  schema->require_subcommand(1);
  auto* infer = schema->add_subcommand("infer", "Infer a schema from a CSV");
  std::string infer_input;
  std::string infer_output;
  infer->add_option("--input", infer_input, "Input CSV")->required();
  infer->add_option("--output", infer_output, "Output schema JSON")
      ->required();

  // denormalize
  auto* denorm = app.add_subcommand(
      "denormalize", "Flatten a parent-child table pair for the attack");
  std::string denorm_parent;
  std::string denorm_child;
  std::string denorm_child_key;
  std::string denorm_output;
  std::string denorm_output_schema;
  tabaudit::ForeignKey denorm_fk;
  denorm->add_option("--parent", denorm_parent, "Parent CSV")->required();
  denorm->add_option("--child", denorm_child, "Child CSV")->required();
  denorm->add_option("--fk-column", denorm_fk.column,
                     "Child column referencing the parent")->required();
  denorm->add_option("--parent-table", denorm_fk.parent_table,
                     "Parent table name (column rename prefix)")->required();
  denorm->add_option("--parent-key", denorm_fk.parent_key,
                     "Parent key column")->required();
  denorm->add_option("--child-key", denorm_child_key,
                     "Child identifier column, if any");
  denorm->add_option("--output", denorm_output, "Joined CSV")->required();
  denorm->add_option("--output-schema", denorm_output_schema,
                     "Joined schema JSON (default <output>.schema.json)");

  // benchmark make
  auto* benchmark = app.add_subcommand("benchmark", "Benchmark fixtures");
  benchmark->require_subcommand(1);
  auto* make = benchmark->add_subcommand(
      "make", "Generate the synthetic audit benchmark and a quickstart "
              "config");
  std::string make_out;
  tabaudit::BenchmarkSpec bench;
  tabaudit::GeneratorSpec bench_gen{1.0, 0.05, 0.0};
  std::uint64_t bench_master_seed = 42;
  make->add_option("--out", make_out, "Fixture directory")->required();
  make->add_option("--rows", bench.aux_rows, "Auxiliary rows");
  make->add_option("--seed", bench.seed, "Data generation seed");
  make->add_option("--leakage", bench_gen.leakage,
                   "Target generator leakage in [0,1]");
  make->add_option("--noise-scale", bench_gen.noise_scale,
                   "Relative numeric noise on copied rows");
  make->add_option("--flip-prob", bench_gen.flip_prob,
                   "Categorical resample probability on copied rows");
  make->add_option("--master-seed", bench_master_seed,
                   "Master seed written into the config");

  std::string config_path;
  std::optional<unsigned> threads;
  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Run config JSON")->required();
    cmd->add_option("--threads", threads, "Worker thread cap");
  };

  // shadow run
  auto* shadow = app.add_subcommand("shadow", "Shadow data stages");
  shadow->require_subcommand(1);
  auto* shadow_run = shadow->add_subcommand(
      "run", "Partition auxiliary data and generate shadow synthetics");
  add_config(shadow_run);

  // attack train / attack score
  auto* attack = app.add_subcommand("attack", "Attack stages");
  attack->require_subcommand(1);
  auto* attack_train = attack->add_subcommand(
      "train", "Train predictors and the attack classifier from the shadow "
               "artifacts");
  add_config(attack_train);
  auto* attack_score = attack->add_subcommand(
      "score", "Score challenge records with a trained bundle");
  std::string bundle_dir;
  std::string challenge_csv;
  std::string scores_out;
  attack_score->add_option("--bundle", bundle_dir, "Attack bundle directory")
      ->required();
  attack_score->add_option("--challenge", challenge_csv, "Challenge CSV")
      ->required();
  attack_score->add_option("--output", scores_out, "Scores CSV")->required();
  attack_score->add_option("--threads", threads, "Worker thread cap");

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "Compute AUC-ROC and TPR at the FPR cap from scores and "
                  "labels");
  std::string eval_scores;
  std::string eval_labels;
  std::string eval_out;
  double eval_cap = 0.10;
  evaluate->add_option("--scores", eval_scores, "Scores CSV")->required();
  evaluate->add_option("--labels", eval_labels, "Labels CSV")->required();
  evaluate->add_option("--output", eval_out, "Output directory")->required();
  evaluate->add_option("--fpr-cap", eval_cap, "FPR cap (default 0.10)");

  // ablate
  auto* ablate = app.add_subcommand(
      "ablate", "Run the full feature-subset ablation (all 31 sets)");
  add_config(ablate);

  // pipeline run
  auto* pipeline = app.add_subcommand("pipeline", "End-to-end pipelines");
  pipeline->require_subcommand(1);
  auto* pipeline_run = pipeline->add_subcommand(
      "run", "Shadow generation, attack training, scoring and evaluation in "
             "one pass");
  add_config(pipeline_run);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*infer) {
      tabaudit::cmd_schema_infer(infer_input, infer_output);
    } else if (*denorm) {
      if (denorm_output_schema.empty()) {
        denorm_output_schema = denorm_output + ".schema.json";
      }
      tabaudit::cmd_denormalize(denorm_parent, denorm_child, denorm_fk,
                                denorm_child_key, denorm_output,
                                denorm_output_schema);
    } else if (*make) {
      const auto files = tabaudit::write_benchmark_fixture(
          make_out, bench, bench_gen, bench_master_seed);
      std::cout << "wrote " << files.aux_csv << ", "
                << files.target_synthetic_csv << ", " << files.challenge_csv
                << ", " << files.challenge_labels_csv << ", "
                << files.config_json << '\n';
    } else if (*shadow_run) {
      tabaudit::cmd_shadow_run(load_config(config_path, threads));
      std::cout << "shadow artifacts written\n";
    } else if (*attack_train) {
      tabaudit::cmd_attack_train(load_config(config_path, threads));
      std::cout << "attack bundle written\n";
    } else if (*attack_score) {
      if (threads) {
        tabaudit::set_worker_count(*threads);
      }
      const auto scores =
          tabaudit::cmd_attack_score(bundle_dir, challenge_csv, scores_out);
      std::cout << "scored " << scores.size() << " records -> " << scores_out
                << '\n';
    } else if (*evaluate) {
      tabaudit::cmd_evaluate(eval_scores, eval_labels, eval_cap, eval_out);
    } else if (*ablate) {
      tabaudit::cmd_ablate(load_config(config_path, threads));
      std::cout << "ablation report written\n";
    } else if (*pipeline_run) {
      return tabaudit::cmd_pipeline_run(config_path, threads);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
