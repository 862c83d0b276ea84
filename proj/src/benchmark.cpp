#include "tabaudit/benchmark.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "tabaudit/dataset.hpp"
#include "tabaudit/error.hpp"
#include "tabaudit/rng.hpp"

namespace tabaudit {

namespace {

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

RawTable make_benchmark_table(std::size_t rows, std::uint64_t seed) {
  RawTable table;
  table.header = {"a",      "b",          "ab_sum", "ab_diff",
                  "w",      "w2",         "noise1", "noise2",
                  "a_sign", "b_quartile", "tag",    "w_level"};
  table.rows.reserve(rows);

  Rng rng(seed);
  const char* tags[3] = {"red", "green", "blue"};
  for (std::size_t r = 0; r < rows; ++r) {
    const double u = rng.gaussian();
    const double v = rng.gaussian();
    const double w = rng.gaussian();
    const double ab_sum = u + v + 0.5 * rng.gaussian();
    const double ab_diff = u - v + 0.5 * rng.gaussian();
    const double w2 = 2.0 * w + 0.5 * rng.gaussian();
    const double noise1 = rng.gaussian();
    const double noise2 = rng.gaussian();
    const char* a_sign = u < 0.0 ? "neg" : "pos";
    // Standard normal quartile and tertile cuts.
    const char* b_quartile = v < -0.6745 ? "q1"
                             : v < 0.0   ? "q2"
                             : v < 0.6745 ? "q3"
                                          : "q4";
    const char* tag = tags[rng.uniform_index(3)];
    const char* w_level = w < -0.4307 ? "low" : w < 0.4307 ? "mid" : "high";

    table.rows.push_back({fmt(u), fmt(v), fmt(ab_sum), fmt(ab_diff), fmt(w),
                          fmt(w2), fmt(noise1), fmt(noise2), a_sign,
                          b_quartile, tag, w_level});
  }
  return table;
}

BenchmarkFiles write_benchmark_fixture(const std::string& dir,
                                       const BenchmarkSpec& spec,
                                       const GeneratorSpec& generator,
                                       std::uint64_t master_seed) {
  generator.validate();
  if (spec.aux_rows == 0 || spec.target_members == 0 ||
      spec.target_non_members == 0 || spec.target_synthetic_rows == 0) {
    throw Error("benchmark: all row counts must be positive");
  }
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  const std::size_t total =
      spec.aux_rows + spec.target_members + spec.target_non_members;
  const RawTable all = make_benchmark_table(total, spec.seed);

  auto slice = [&](std::size_t begin, std::size_t count) {
    RawTable part;
    part.header = all.header;
    part.rows.assign(all.rows.begin() + begin,
                     all.rows.begin() + begin + count);
    return part;
  };

  const RawTable aux_raw = slice(0, spec.aux_rows);
  const RawTable member_raw = slice(spec.aux_rows, spec.target_members);
  const RawTable non_member_raw =
      slice(spec.aux_rows + spec.target_members, spec.target_non_members);

  BenchmarkFiles files;
  files.aux_csv = (fs::path(dir) / "aux.csv").string();
  write_csv_file(files.aux_csv, aux_raw);

  // The target generator releases only its synthetic table; the challenge
  // mixes its members with held-out rows.
  const TableSchema schema = infer_schema(aux_raw);
  const Dataset aux = encode_dataset(aux_raw, schema, Provenance::Real);
  const Dataset members = encode_dataset(member_raw, schema, Provenance::Real);
  const PopulationModel population = fit_population_model(aux);
  const LeakyGenerator target(generator, population);
  const Dataset synthetic =
      target.generate(members, spec.target_synthetic_rows,
                      derive_seed(spec.seed, "target"));
  files.target_synthetic_csv =
      (fs::path(dir) / "target_synthetic.csv").string();
  write_csv_file(files.target_synthetic_csv, decode_dataset(synthetic));

  // Challenge: members and non-members shuffled together.
  struct Candidate {
    const std::vector<std::string>* row;
    int label;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(spec.target_members + spec.target_non_members);
  for (const auto& row : member_raw.rows) {
    candidates.push_back({&row, 1});
  }
  for (const auto& row : non_member_raw.rows) {
    candidates.push_back({&row, 0});
  }
  Rng rng(derive_seed(spec.seed, "challenge"));
  for (std::size_t i = candidates.size() - 1; i > 0; --i) {
    const std::size_t j = rng.uniform_index(i + 1);
    std::swap(candidates[i], candidates[j]);
  }

  RawTable challenge;
  challenge.header.push_back("record_id");
  challenge.header.insert(challenge.header.end(), all.header.begin(),
                          all.header.end());
  RawTable labels;
  labels.header = {"record_id", "label"};
  char idbuf[24];
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    std::snprintf(idbuf, sizeof(idbuf), "r%04zu", i);
    std::vector<std::string> row{idbuf};
    row.insert(row.end(), candidates[i].row->begin(),
               candidates[i].row->end());
    challenge.rows.push_back(std::move(row));
    labels.rows.push_back({idbuf, std::to_string(candidates[i].label)});
  }
  files.challenge_csv = (fs::path(dir) / "challenge.csv").string();
  files.challenge_labels_csv =
      (fs::path(dir) / "challenge_labels.csv").string();
  write_csv_file(files.challenge_csv, challenge);
  write_csv_file(files.challenge_labels_csv, labels);

  // Ready-to-run config; paths are relative to the fixture directory.
  nlohmann::json config{
      {"version", "config-v1"},
      {"paths",
       {{"aux_csv", "aux.csv"},
        {"target_synthetic_csv", "target_synthetic.csv"},
        {"challenge_csv", "challenge.csv"},
        {"output_dir", "out"}}},
      {"plan",
       {{"shadows", 8},
        {"train_shadows", 6},
        {"eval_shadows", 2},
        {"synthetic_rows", spec.target_synthetic_rows}}},
      {"generator",
       {{"type", "leaky"},
        {"leakage", generator.leakage},
        {"noise_scale", generator.noise_scale},
        {"flip_prob", generator.flip_prob}}},
      {"feature_sets", {"actual+prediction+error+error_ratio+accuracy"}},
      {"classifiers",
       {{"gbdt",
         {{"n_rounds", 100},
          {"max_depth", 4},
          {"learning_rate", 0.1},
          {"min_samples_leaf", 5}}}}},
      {"predictor",
       {{"n_rounds", 100},
        {"max_depth", 6},
        {"learning_rate", 0.1},
        {"min_samples_leaf", 2}}},
      {"min_predictor_rows", 100},
      {"error_ratio", {{"eps", 1e-8}, {"cap", 1e6}}},
      {"master_seed", master_seed},
      {"fpr_cap", 0.10},
      {"threads", 0}};
  files.config_json = (fs::path(dir) / "config.json").string();
  std::ofstream out(files.config_json);
  if (!out) {
    throw Error("cannot write config file '" + files.config_json + "'");
  }
  out << config.dump(2) << '\n';
  return files;
}

}  // namespace tabaudit
