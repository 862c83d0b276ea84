#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tabaudit/dataset.hpp"
#include "tabaudit/generator.hpp"

namespace tabaudit {

// One shadow instance: a disjoint member/non-member pair of the auxiliary
// data, plus the synthetic table generated from the members.
struct ShadowSplit {
  std::size_t index = 0;
  Dataset members;
  Dataset non_members;
  std::optional<Dataset> synthetic;
};

struct ShadowRunPlan {
  std::size_t shadow_count = 0;   // M
  std::size_t train_count = 0;    // shadows used to train the attack
  std::size_t eval_count = 0;     // shadows held out for evaluation
  std::size_t synthetic_rows = 0; // 0 means |members|
  std::uint64_t master_seed = 42;

  void validate() const;
};

inline constexpr std::size_t kDefaultMinSplitSize = 50;

// Shuffles the auxiliary rows with derive_seed(master_seed, "partition"),
// cuts them into 2M equal disjoint splits (remainder dropped) and pairs
// split 2i as members with split 2i+1 as non-members of shadow i.
std::vector<ShadowSplit> partition_shadow_splits(
    const Dataset& aux, std::size_t shadow_count, std::uint64_t master_seed,
    std::size_t min_split_size = kDefaultMinSplitSize);

// Fills each split's synthetic table from its members only, with seed
// derive_seed(master_seed, "shadow", i). Shadows run in parallel but results
// land in index order; non-members never reach the generator.
void run_shadows(std::vector<ShadowSplit>& splits,
                 const SyntheticGenerator& generator,
                 const ShadowRunPlan& plan);

struct LabeledRecord {
  std::size_t shadow_index;
  std::size_t row;      // row within members or non_members
  bool member;
};

// Flattens the splits into (record, shadow, label) tuples: members first,
// then non-members, per shadow; exactly half of each shadow's records are
// members.
std::vector<LabeledRecord> label_records(
    const std::vector<ShadowSplit>& splits);

}  // namespace tabaudit
