#include "tabaudit/shadow.hpp"

#include <numeric>
#include <string>

#include "tabaudit/error.hpp"
#include "tabaudit/parallel.hpp"
#include "tabaudit/rng.hpp"

namespace tabaudit {

void ShadowRunPlan::validate() const {
  if (shadow_count == 0 || train_count == 0 || eval_count == 0) {
    throw Error("shadow plan: counts must be positive");
  }
  if (train_count + eval_count != shadow_count) {
    throw Error("shadow plan: train_count + eval_count must equal "
                "shadow_count");
  }
}

std::vector<ShadowSplit> partition_shadow_splits(const Dataset& aux,
                                                 std::size_t shadow_count,
                                                 std::uint64_t master_seed,
                                                 std::size_t min_split_size) {
  if (shadow_count == 0) {
    throw Error("partition: shadow count must be positive");
  }
  const std::size_t n = aux.row_count();
  const std::size_t pieces = 2 * shadow_count;
  if (n < pieces * min_split_size) {
    throw Error("partition: insufficient rows (" + std::to_string(n) +
                " < " + std::to_string(pieces * min_split_size) + " = 2*" +
                std::to_string(shadow_count) + "*" +
                std::to_string(min_split_size) + ")");
  }
  const std::size_t split_size = n / pieces;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(master_seed, "partition"));
  // Fisher-Yates; remainder rows past 2M*split_size are dropped.
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = rng.uniform_index(i + 1);
    std::swap(order[i], order[j]);
  }

  auto take = [&](std::size_t piece) {
    Dataset part(aux.schema(), aux.provenance());
    part.reserve(split_size);
    for (std::size_t k = 0; k < split_size; ++k) {
      part.append_row(aux.row(order[piece * split_size + k]));
    }
    return part;
  };

  std::vector<ShadowSplit> splits;
  splits.reserve(shadow_count);
  for (std::size_t i = 0; i < shadow_count; ++i) {
    ShadowSplit split{i, take(2 * i), take(2 * i + 1), std::nullopt};
    splits.push_back(std::move(split));
  }
  return splits;
}

void run_shadows(std::vector<ShadowSplit>& splits,
                 const SyntheticGenerator& generator,
                 const ShadowRunPlan& plan) {
  plan.validate();
  if (splits.size() != plan.shadow_count) {
    throw Error("run_shadows: split count does not match the plan");
  }
  parallel_for(splits.size(), [&](std::size_t i) {
    ShadowSplit& split = splits[i];
    const std::size_t n = plan.synthetic_rows > 0
                              ? plan.synthetic_rows
                              : split.members.row_count();
    try {
      split.synthetic = generator.generate(
          split.members, n, derive_seed(plan.master_seed, "shadow", i));
    } catch (const std::exception& e) {
      throw Error("shadow " + std::to_string(i) + ": " + e.what());
    }
  });
}

std::vector<LabeledRecord> label_records(
    const std::vector<ShadowSplit>& splits) {
  std::vector<LabeledRecord> out;
  for (const ShadowSplit& split : splits) {
    if (split.members.empty() || split.non_members.empty()) {
      throw Error("label_records: shadow " + std::to_string(split.index) +
                  " has an empty member or non-member set");
    }
    if (split.members.row_count() != split.non_members.row_count()) {
      throw Error("label_records: shadow " + std::to_string(split.index) +
                  " is not balanced");
    }
    for (std::size_t r = 0; r < split.members.row_count(); ++r) {
      out.push_back({split.index, r, true});
    }
    for (std::size_t r = 0; r < split.non_members.row_count(); ++r) {
      out.push_back({split.index, r, false});
    }
  }
  return out;
}

}  // namespace tabaudit
