#include "tabaudit/pipeline.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <json.hpp>

#include "tabaudit/error.hpp"
#include "tabaudit/parallel.hpp"
#include "tabaudit/rng.hpp"
#include "tabaudit/version.hpp"

namespace fs = std::filesystem;

namespace tabaudit {

namespace {

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open '" + path + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write '" + path + "'");
  }
  out << j.dump(2) << '\n';
}

GbdtHyperparams hyper_from_json(const nlohmann::json& j) {
  GbdtHyperparams hp;
  hp.n_rounds = j.value("n_rounds", hp.n_rounds);
  hp.max_depth = j.value("max_depth", hp.max_depth);
  hp.learning_rate = j.value("learning_rate", hp.learning_rate);
  hp.min_samples_leaf = j.value("min_samples_leaf", hp.min_samples_leaf);
  hp.validate();
  return hp;
}

std::string resolve(const fs::path& base, const std::string& path) {
  if (path.empty()) {
    return {};
  }
  const fs::path p(path);
  return p.is_absolute() ? p.string() : (base / p).string();
}

void require_file(const std::string& path, const char* field) {
  if (!path.empty() && !fs::exists(path)) {
    throw Error(std::string("config: ") + field + " path '" + path +
                "' does not exist");
  }
}

}  // namespace

RunConfig RunConfig::load(const std::string& path) {
  const nlohmann::json j = read_json_file(path);
  if (j.value("version", "") != "config-v1") {
    throw Error("config: expected version \"config-v1\"");
  }
  RunConfig cfg;
  cfg.config_hash = hex64(fnv1a64(j.dump()));

  const fs::path base = fs::path(path).parent_path();
  const auto& paths = j.at("paths");
  cfg.aux_csv = resolve(base, paths.at("aux_csv").get<std::string>());
  cfg.schema_json = resolve(base, paths.value("schema", ""));
  cfg.target_synthetic_csv =
      resolve(base, paths.value("target_synthetic_csv", ""));
  cfg.challenge_csv = resolve(base, paths.value("challenge_csv", ""));
  cfg.output_dir = resolve(base, paths.at("output_dir").get<std::string>());
  if (const char* env = std::getenv("TABAUDIT_OUTPUT_DIR")) {
    cfg.output_dir = env;
  }

  const auto& plan = j.at("plan");
  cfg.plan.shadow_count = plan.at("shadows").get<std::size_t>();
  cfg.plan.train_count = plan.at("train_shadows").get<std::size_t>();
  cfg.plan.eval_count = plan.at("eval_shadows").get<std::size_t>();
  cfg.plan.synthetic_rows = plan.value("synthetic_rows", std::size_t{0});
  cfg.master_seed = j.value("master_seed", std::uint64_t{42});
  cfg.plan.master_seed = cfg.master_seed;

  const auto& gen = j.at("generator");
  const std::string kind = gen.at("type").get<std::string>();
  if (kind == "leaky") {
    cfg.generator_kind = GeneratorKind::Leaky;
    cfg.leaky.leakage = gen.value("leakage", 1.0);
    cfg.leaky.noise_scale = gen.value("noise_scale", 0.0);
    cfg.leaky.flip_prob = gen.value("flip_prob", 0.0);
  } else if (kind == "external") {
    cfg.generator_kind = GeneratorKind::External;
    cfg.external_command = gen.at("command").get<std::string>();
  } else {
    throw Error("config: generator.type must be \"leaky\" or \"external\"");
  }

  cfg.feature_sets = j.value("feature_sets",
                             std::vector<std::string>{"*"});
  if (j.contains("classifiers")) {
    for (const auto& [name, jc] : j.at("classifiers").items()) {
      cfg.classifiers[name] = hyper_from_json(jc);
    }
  } else {
    cfg.classifiers["gbdt"] = GbdtHyperparams{};
  }
  if (j.contains("predictor")) {
    cfg.predictor_hyper = hyper_from_json(j.at("predictor"));
  }
  cfg.min_predictor_rows = j.value("min_predictor_rows", 100);
  if (j.contains("error_ratio")) {
    cfg.error_ratio.eps = j.at("error_ratio").value("eps", 1e-8);
    cfg.error_ratio.cap = j.at("error_ratio").value("cap", 1e6);
  }
  cfg.fpr_cap = j.value("fpr_cap", 0.10);
  cfg.threads = j.value("threads", 0);

  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  require_file(aux_csv, "aux_csv");
  require_file(schema_json, "schema");
  require_file(target_synthetic_csv, "target_synthetic_csv");
  require_file(challenge_csv, "challenge_csv");
  if (aux_csv.empty()) {
    throw Error("config: aux_csv is required");
  }
  if (output_dir.empty()) {
    throw Error("config: output_dir is required");
  }
  if (!challenge_csv.empty() && target_synthetic_csv.empty()) {
    throw Error("config: challenge_csv requires target_synthetic_csv");
  }
  if (plan.train_count + plan.eval_count != plan.shadow_count) {
    throw Error("config: plan.train_shadows + plan.eval_shadows must equal "
                "plan.shadows");
  }
  plan.validate();
  if (generator_kind == GeneratorKind::Leaky) {
    leaky.validate();
  } else if (external_command.empty()) {
    throw Error("config: generator.command is required for external "
                "generators");
  }
  if (feature_sets.empty()) {
    throw Error("config: feature_sets must not be empty");
  }
  if (classifiers.empty()) {
    throw Error("config: classifiers must not be empty");
  }
  predictor_hyper.validate();
  if (!(fpr_cap >= 0.0 && fpr_cap <= 1.0)) {
    throw Error("config: fpr_cap must lie in [0, 1]");
  }
  if (!(error_ratio.eps > 0.0 && error_ratio.cap > 0.0)) {
    throw Error("config: error_ratio.eps and error_ratio.cap must be "
                "positive");
  }
  // Validates names early so typos fail at load time.
  for (const std::string& name : feature_sets) {
    if (name != "*") {
      FeatureSet::parse(name);
    }
  }
}

std::vector<AblationCandidate> RunConfig::candidates() const {
  std::vector<FeatureSet> sets;
  for (const std::string& name : feature_sets) {
    if (name == "*") {
      const auto all = FeatureSet::all_non_empty();
      sets.insert(sets.end(), all.begin(), all.end());
    } else {
      sets.push_back(FeatureSet::parse(name));
    }
  }
  std::vector<AblationCandidate> out;
  for (const FeatureSet& set : sets) {
    for (const auto& [name, hyper] : classifiers) {
      out.push_back({name, set, hyper});
    }
  }
  return out;
}

namespace {

TableSchema load_or_infer_schema(const RunConfig& cfg, const RawTable& aux) {
  if (!cfg.schema_json.empty()) {
    return load_schema(cfg.schema_json);
  }
  return infer_schema(aux);
}

std::unique_ptr<SyntheticGenerator> make_generator(const RunConfig& cfg,
                                                   const Dataset& aux) {
  if (cfg.generator_kind == GeneratorKind::Leaky) {
    return std::make_unique<LeakyGenerator>(cfg.leaky,
                                            fit_population_model(aux));
  }
  return std::make_unique<ExternalCommandGenerator>(
      cfg.external_command,
      (fs::path(cfg.output_dir) / "external_work").string());
}

std::string shadow_dir(const RunConfig& cfg, std::size_t i) {
  return (fs::path(cfg.output_dir) / "shadows" /
          ("shadow_" + std::to_string(i)))
      .string();
}

}  // namespace

void cmd_schema_infer(const std::string& input_csv,
                      const std::string& output_json) {
  const RawTable raw = read_csv_file(input_csv);
  const TableSchema schema = infer_schema(raw);
  save_schema(schema, output_json);
  std::cout << "inferred " << schema.columns.size() << " columns from "
            << raw.rows.size() << " rows -> " << output_json << '\n';
}

void cmd_denormalize(const std::string& parent_csv,
                     const std::string& child_csv, const ForeignKey& fk,
                     const std::string& child_key,
                     const std::string& output_csv,
                     const std::string& output_schema) {
  const RawTable parent_raw = read_csv_file(parent_csv);
  const RawTable child_raw = read_csv_file(child_csv);
  TableSchema parent_schema = infer_schema(parent_raw);
  parent_schema.key = fk.parent_key;
  TableSchema child_schema = infer_schema(child_raw);
  if (!child_key.empty()) {
    child_schema.key = child_key;
  }
  child_schema.foreign_keys.push_back(fk);
  child_schema.validate();

  const Dataset joined = denormalize(
      encode_dataset(parent_raw, parent_schema, Provenance::Real),
      encode_dataset(child_raw, child_schema, Provenance::Real), fk);
  write_csv_file(output_csv, decode_dataset(joined));
  save_schema(joined.schema(), output_schema);
  std::cout << "joined " << joined.row_count() << " rows, "
            << joined.column_count() << " columns -> " << output_csv << '\n';
}

void cmd_shadow_run(const RunConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  const RawTable aux_raw = read_csv_file(cfg.aux_csv);
  const TableSchema schema = load_or_infer_schema(cfg, aux_raw);
  const Dataset aux = encode_dataset(aux_raw, schema, Provenance::Real);

  std::vector<ShadowSplit> splits =
      partition_shadow_splits(aux, cfg.plan.shadow_count, cfg.master_seed);
  const auto generator = make_generator(cfg, aux);
  run_shadows(splits, *generator, cfg.plan);

  nlohmann::json shadows = nlohmann::json::array();
  for (const ShadowSplit& split : splits) {
    const std::string dir = shadow_dir(cfg, split.index);
    fs::create_directories(dir);
    const std::string members = (fs::path(dir) / "members.csv").string();
    const std::string non_members =
        (fs::path(dir) / "non_members.csv").string();
    const std::string synthetic = (fs::path(dir) / "synthetic.csv").string();
    write_csv_file(members, decode_dataset(split.members));
    write_csv_file(non_members, decode_dataset(split.non_members));
    write_csv_file(synthetic, decode_dataset(*split.synthetic));
    shadows.push_back(
        {{"index", split.index},
         {"seed", derive_seed(cfg.master_seed, "shadow", split.index)},
         {"members_csv", members},
         {"non_members_csv", non_members},
         {"synthetic_csv", synthetic}});
  }

  const nlohmann::json manifest{
      {"version", "run-v1"},
      {"tool_version", kVersion},
      {"config_hash", cfg.config_hash},
      {"plan",
       {{"shadows", cfg.plan.shadow_count},
        {"train_shadows", cfg.plan.train_count},
        {"eval_shadows", cfg.plan.eval_count},
        {"synthetic_rows", cfg.plan.synthetic_rows},
        {"master_seed", cfg.master_seed}}},
      {"schema", schema_to_json(schema)},
      {"shadows", std::move(shadows)}};
  write_json_file((fs::path(cfg.output_dir) / "run_manifest.json").string(),
                  manifest);
}

namespace {

struct ShadowProfiles {
  ProfileTable train_full;  // concatenated profiles of the training shadows
  ProfileTable eval_full;   // concatenated profiles of the held-out shadows
};

// Loads the shadow artifacts back from disk, trains per-shadow attribute
// predictors on the synthetic tables, and extracts full profiles for the
// labeled member/non-member records.
ShadowProfiles build_shadow_profiles(const RunConfig& cfg,
                                     const nlohmann::json& run_manifest,
                                     const TableSchema& schema) {
  const FeatureSet full = FeatureSet::full();
  const ProfileLayout layout = build_profile_layout(schema, full);
  PredictorTrainOptions options{cfg.predictor_hyper, cfg.min_predictor_rows};

  ShadowProfiles out;
  for (const auto& js : run_manifest.at("shadows")) {
    const std::size_t index = js.at("index").get<std::size_t>();
    const Dataset members = encode_dataset(
        read_csv_file(js.at("members_csv").get<std::string>()), schema,
        Provenance::Real);
    const Dataset non_members = encode_dataset(
        read_csv_file(js.at("non_members_csv").get<std::string>()), schema,
        Provenance::Real);
    const Dataset synthetic = encode_dataset(
        read_csv_file(js.at("synthetic_csv").get<std::string>()), schema,
        Provenance::Synthetic);

    const std::vector<AttributePredictor> predictors =
        train_attribute_predictors(
            synthetic, options,
            derive_seed(cfg.master_seed, "predictors", index));

    const std::string prefix = "s" + std::to_string(index);
    ProfileTable profiles = extract_profile_table(
        predictors, layout, full, members, prefix + ":m", 1,
        cfg.error_ratio);
    append_profiles(profiles,
                    extract_profile_table(predictors, layout, full,
                                          non_members, prefix + ":n", 0,
                                          cfg.error_ratio));

    ProfileTable& dst =
        index < cfg.plan.train_count ? out.train_full : out.eval_full;
    append_profiles(dst, profiles);
  }
  return out;
}

std::vector<std::size_t> predictor_columns(const TableSchema& schema) {
  return schema.feature_columns();
}

}  // namespace

void cmd_attack_train(const RunConfig& cfg) {
  const std::string manifest_path =
      (fs::path(cfg.output_dir) / "run_manifest.json").string();
  if (!fs::exists(manifest_path)) {
    throw Error("attack train: no run manifest at '" + manifest_path +
                "'; run the shadow stage first");
  }
  const nlohmann::json run_manifest = read_json_file(manifest_path);
  const TableSchema schema = schema_from_json(run_manifest.at("schema"));

  const ShadowProfiles profiles =
      build_shadow_profiles(cfg, run_manifest, schema);

  // Candidate selection on the held-out shadows, then the final classifier
  // retrained with the same derived seed (bit-identical to the selected one).
  const std::vector<AblationCandidate> candidates = cfg.candidates();
  const std::uint64_t selection_seed =
      derive_seed(cfg.master_seed, "selection");
  const SelectionResult selection =
      select_best_config(candidates, profiles.train_full, profiles.eval_full,
                         cfg.fpr_cap, selection_seed);
  write_ablation_csv((fs::path(cfg.output_dir) / "ablation.csv").string(),
                     selection);

  const AblationCandidate& chosen = candidates[selection.best_index];
  const AttackClassifier classifier = train_attack_classifier(
      project_profiles(profiles.train_full, chosen.features), chosen.hyper,
      derive_seed(selection_seed, "candidate", selection.best_index));

  // Self-evaluation on the held-out shadows.
  const ProfileTable eval =
      project_profiles(profiles.eval_full, chosen.features);
  const std::vector<double> eval_scores = classify_profiles(classifier, eval);
  const AttackReport report =
      make_attack_report(eval_scores, eval.labels, cfg.fpr_cap);
  write_metrics_json((fs::path(cfg.output_dir) / "metrics.json").string(),
                     report);
  const RocCurve curve = roc_curve(eval_scores, eval.labels);
  write_roc_csv((fs::path(cfg.output_dir) / "roc.csv").string(), curve);
  write_roc_svg((fs::path(cfg.output_dir) / "roc.svg").string(), curve,
                "attack ROC on held-out shadows");

  // Bundle: everything `attack score` needs later.
  const std::string bundle = (fs::path(cfg.output_dir) / "bundle").string();
  fs::create_directories(bundle);
  save_schema(schema, (fs::path(bundle) / "schema.json").string());
  write_json_file((fs::path(bundle) / "layout.json").string(),
                  layout_to_json(classifier.layout, schema));
  save_model(classifier.model,
             (fs::path(bundle) / "classifier.json").string());

  bool has_target = false;
  if (!cfg.target_synthetic_csv.empty()) {
    has_target = true;
    const Dataset target_synthetic =
        encode_dataset(read_csv_file(cfg.target_synthetic_csv), schema,
                       Provenance::Synthetic);
    const std::vector<AttributePredictor> target_predictors =
        train_attribute_predictors(
            target_synthetic,
            PredictorTrainOptions{cfg.predictor_hyper, cfg.min_predictor_rows},
            derive_seed(cfg.master_seed, "target_predictors"));
    const std::string dir =
        (fs::path(bundle) / "target_predictors").string();
    fs::create_directories(dir);
    for (const AttributePredictor& p : target_predictors) {
      save_model(p.model,
                 (fs::path(dir) /
                  ("col_" + std::to_string(p.target_column) + ".json"))
                     .string());
    }
  }

  write_json_file(
      (fs::path(bundle) / "manifest.json").string(),
      {{"version", "bundle-v1"},
       {"tool_version", kVersion},
       {"config_hash", cfg.config_hash},
       {"classifier", chosen.classifier_name},
       {"feature_set", chosen.features.name()},
       {"predictor_columns", predictor_columns(schema)},
       {"has_target_predictors", has_target},
       {"error_ratio",
        {{"eps", cfg.error_ratio.eps}, {"cap", cfg.error_ratio.cap}}},
       {"validation",
        {{"tpr_at_fpr", report.tpr_at_fpr}, {"auc_roc", report.auc_roc}}}});
}

namespace {

// Challenge CSV: a record_id column plus the schema columns (any order).
struct ChallengeData {
  Dataset records;
  std::vector<std::string> ids;
};

ChallengeData load_challenge(const std::string& path,
                             const TableSchema& schema) {
  const RawTable raw = read_csv_file(path);
  const std::size_t id_col = raw.column_index("record_id");

  RawTable ordered;
  std::vector<std::size_t> source(schema.columns.size());
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    ordered.header.push_back(schema.columns[c].name);
    source[c] = raw.column_index(schema.columns[c].name);
  }
  if (raw.header.size() != schema.columns.size() + 1) {
    throw Error("challenge file: expected record_id plus the " +
                std::to_string(schema.columns.size()) + " schema columns");
  }
  ChallengeData out{Dataset(schema, Provenance::Real), {}};
  ordered.rows.reserve(raw.rows.size());
  for (const auto& row : raw.rows) {
    out.ids.push_back(row[id_col]);
    std::vector<std::string> cells(schema.columns.size());
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
      cells[c] = row[source[c]];
    }
    ordered.rows.push_back(std::move(cells));
  }
  out.records = encode_dataset(ordered, schema, Provenance::Real);
  return out;
}

}  // namespace

std::vector<MembershipScore> cmd_attack_score(
    const std::string& bundle_dir, const std::string& challenge_csv,
    const std::string& output_csv) {
  const fs::path bundle(bundle_dir);
  const nlohmann::json manifest =
      read_json_file((bundle / "manifest.json").string());
  if (manifest.value("version", "") != "bundle-v1") {
    throw Error("attack bundle: expected version \"bundle-v1\"");
  }
  if (!manifest.value("has_target_predictors", false)) {
    throw Error("attack bundle has no target predictors; train with a "
                "target_synthetic_csv configured");
  }
  const TableSchema schema = load_schema((bundle / "schema.json").string());

  AttackClassifier classifier;
  classifier.model = load_model((bundle / "classifier.json").string());
  classifier.layout =
      layout_from_json(read_json_file((bundle / "layout.json").string()),
                       schema);
  classifier.features = FeatureSet::parse(
      manifest.at("feature_set").get<std::string>());

  std::vector<AttributePredictor> predictors;
  for (const std::size_t c :
       manifest.at("predictor_columns").get<std::vector<std::size_t>>()) {
    predictors.push_back(AttributePredictor{
        c, load_model((bundle / "target_predictors" /
                       ("col_" + std::to_string(c) + ".json"))
                          .string())});
  }

  ErrorRatioParams ratio;
  ratio.eps = manifest.at("error_ratio").at("eps").get<double>();
  ratio.cap = manifest.at("error_ratio").at("cap").get<double>();

  const ChallengeData challenge = load_challenge(challenge_csv, schema);
  const std::vector<MembershipScore> scores = score_membership(
      classifier, predictors, challenge.records, challenge.ids, ratio);
  write_scores_csv(output_csv, scores);
  return scores;
}

AttackReport cmd_evaluate(const std::string& scores_csv,
                          const std::string& labels_csv, double fpr_cap,
                          const std::string& output_dir) {
  const RawTable scores_raw = read_csv_file(scores_csv);
  const RawTable labels_raw = read_csv_file(labels_csv);
  const std::size_t sid = scores_raw.column_index("record_id");
  const std::size_t sval = scores_raw.column_index("score");
  const std::size_t lid = labels_raw.column_index("record_id");
  const std::size_t lval = labels_raw.column_index("label");

  std::map<std::string, int> label_of;
  for (const auto& row : labels_raw.rows) {
    if (row[lval] != "0" && row[lval] != "1") {
      throw Error("labels file: label must be 0 or 1");
    }
    if (!label_of.emplace(row[lid], row[lval] == "1" ? 1 : 0).second) {
      throw Error("labels file: duplicate record_id '" + row[lid] + "'");
    }
  }

  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& row : scores_raw.rows) {
    const auto it = label_of.find(row[sid]);
    if (it == label_of.end()) {
      throw Error("no label for record_id '" + row[sid] + "'");
    }
    const auto value = parse_numeric(row[sval]);
    if (!value) {
      throw Error("scores file: unparsable score '" + row[sval] + "'");
    }
    scores.push_back(*value);
    labels.push_back(it->second);
  }

  fs::create_directories(output_dir);
  const AttackReport report = make_attack_report(scores, labels, fpr_cap);
  write_metrics_json((fs::path(output_dir) / "metrics.json").string(),
                     report);
  const RocCurve curve = roc_curve(scores, labels);
  write_roc_csv((fs::path(output_dir) / "roc.csv").string(), curve);
  write_roc_svg((fs::path(output_dir) / "roc.svg").string(), curve,
                "challenge ROC");
  std::cout << "auc_roc=" << report.auc_roc
            << " tpr_at_fpr=" << report.tpr_at_fpr
            << " (fpr_cap=" << report.fpr_cap << ", n=" << report.n_members
            << "+" << report.n_non_members << ")\n";
  return report;
}

void cmd_ablate(const RunConfig& config) {
  RunConfig cfg = config;
  cfg.feature_sets = {"*"};
  cmd_shadow_run(cfg);
  cmd_attack_train(cfg);
}

int cmd_pipeline_run(const std::string& config_path,
                     std::optional<unsigned> threads_override) {
  std::vector<nlohmann::json> stages;
  std::string output_dir;
  std::string config_hash;

  auto fail = [&](const std::string& stage, const std::string& what) {
    stages.push_back({{"name", stage}, {"status", "failed"}});
    std::cerr << "pipeline: stage '" << stage << "' failed: " << what << '\n';
    if (!output_dir.empty()) {
      write_json_file(
          (fs::path(output_dir) / "manifest.json").string(),
          {{"version", "manifest-v1"},
           {"tool_version", kVersion},
           {"config_hash", config_hash},
           {"stages", stages}});
    }
    return 1;
  };

  RunConfig cfg;
  try {
    cfg = RunConfig::load(config_path);
    output_dir = cfg.output_dir;
    config_hash = cfg.config_hash;
    if (threads_override) {
      cfg.threads = *threads_override;
    }
    set_worker_count(cfg.threads);
    fs::create_directories(cfg.output_dir);
  } catch (const std::exception& e) {
    std::cerr << "pipeline: invalid config: " << e.what() << '\n';
    return 1;
  }

  try {
    cmd_shadow_run(cfg);
    stages.push_back({{"name", "shadow"}, {"status", "ok"}});
  } catch (const std::exception& e) {
    return fail("shadow", e.what());
  }

  try {
    cmd_attack_train(cfg);
    stages.push_back({{"name", "attack_train"}, {"status", "ok"}});
  } catch (const std::exception& e) {
    return fail("attack_train", e.what());
  }

  if (!cfg.challenge_csv.empty()) {
    try {
      cmd_attack_score((fs::path(cfg.output_dir) / "bundle").string(),
                       cfg.challenge_csv,
                       (fs::path(cfg.output_dir) / "scores.csv").string());
      stages.push_back({{"name", "score"}, {"status", "ok"}});
    } catch (const std::exception& e) {
      return fail("score", e.what());
    }
  } else {
    stages.push_back({{"name", "score"}, {"status", "skipped"}});
  }

  nlohmann::json artifacts = nlohmann::json::array();
  for (const char* name :
       {"run_manifest.json", "ablation.csv", "metrics.json", "roc.csv",
        "roc.svg", "scores.csv"}) {
    if (fs::exists(fs::path(cfg.output_dir) / name)) {
      artifacts.push_back(name);
    }
  }
  artifacts.push_back("bundle");
  write_json_file((fs::path(cfg.output_dir) / "manifest.json").string(),
                  {{"version", "manifest-v1"},
                   {"tool_version", kVersion},
                   {"config_hash", config_hash},
                   {"stages", stages},
                   {"artifacts", artifacts}});
  return 0;
}

}  // namespace tabaudit
