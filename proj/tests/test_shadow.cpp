#include <doctest.h>

#include <algorithm>
#include <set>

#include "tabaudit/error.hpp"
#include "tabaudit/rng.hpp"
#include "tabaudit/shadow.hpp"
#include "testutil.hpp"

using namespace tabaudit;

namespace {

// Auxiliary table with a unique id column so record identity is traceable
// through partitioning and generation.
Dataset make_aux(std::size_t rows) {
  RawTable raw;
  raw.header = {"id", "v", "g"};
  for (std::size_t i = 0; i < rows; ++i) {
    raw.rows.push_back({std::to_string(i), std::to_string(i % 17),
                        (i % 3 == 0) ? "a" : "b"});
  }
  auto schema = infer_schema(raw);
  schema.key = "id";
  return encode_dataset(raw, schema, Provenance::Real);
}

std::set<double> ids_of(const Dataset& data) {
  std::set<double> ids;
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    ids.insert(data.value(r, 0));
  }
  return ids;
}

ShadowRunPlan plan_for(std::size_t m, std::size_t n_synth = 0,
                       std::uint64_t seed = 42) {
  ShadowRunPlan plan;
  plan.shadow_count = m;
  plan.train_count = m - 1;
  plan.eval_count = 1;
  plan.synthetic_rows = n_synth;
  plan.master_seed = seed;
  return plan;
}

}  // namespace

TEST_CASE("partition produces equal disjoint splits") {
  const auto aux = make_aux(100);
  const auto splits = partition_shadow_splits(aux, 2, 42, 25);
  REQUIRE(splits.size() == 2);
  std::set<double> seen;
  for (const auto& split : splits) {
    CHECK(split.members.row_count() == 25);
    CHECK(split.non_members.row_count() == 25);
    for (const auto& part : {split.members, split.non_members}) {
      for (double id : ids_of(part)) {
        CHECK(seen.insert(id).second);  // no identity appears twice
      }
    }
  }
  CHECK(seen.size() == 100);
}

TEST_CASE("remainder rows are dropped") {
  const auto aux = make_aux(101);
  const auto splits = partition_shadow_splits(aux, 2, 42, 25);
  std::size_t used = 0;
  for (const auto& split : splits) {
    used += split.members.row_count() + split.non_members.row_count();
    CHECK(split.members.row_count() == 25);
  }
  CHECK(used == 100);
}

TEST_CASE("insufficient rows are rejected") {
  const auto aux = make_aux(80);
  CHECK_THROWS_WITH_AS(partition_shadow_splits(aux, 2, 42, 50),
                       doctest::Contains("insufficient rows"), Error);
}

TEST_CASE("partition is deterministic in the master seed") {
  const auto aux = make_aux(120);
  const auto a = partition_shadow_splits(aux, 2, 7, 25);
  const auto b = partition_shadow_splits(aux, 2, 7, 25);
  const auto c = partition_shadow_splits(aux, 2, 8, 25);
  CHECK(ids_of(a[0].members) == ids_of(b[0].members));
  CHECK(ids_of(a[1].non_members) == ids_of(b[1].non_members));
  CHECK(ids_of(a[0].members) != ids_of(c[0].members));
}

TEST_CASE("run_shadows fills synthetics from members only") {
  const auto aux = make_aux(240);
  auto splits = partition_shadow_splits(aux, 3, 42, 40);
  const auto plan = plan_for(3, 10);
  const LeakyGenerator gen({1.0, 0.0, 0.0}, fit_population_model(aux));
  run_shadows(splits, gen, plan);

  REQUIRE(splits.size() == 3);
  for (const auto& split : splits) {
    REQUIRE(split.synthetic.has_value());
    CHECK(split.synthetic->row_count() == 10);
    // Pure copies: every synthetic id is a member id, never a non-member id.
    const auto member_ids = ids_of(split.members);
    const auto non_member_ids = ids_of(split.non_members);
    for (double id : ids_of(*split.synthetic)) {
      CHECK(member_ids.count(id) == 1);
      CHECK(non_member_ids.count(id) == 0);
    }
  }
}

TEST_CASE("shadow seeds depend only on master seed and index") {
  const auto aux = make_aux(240);
  const auto plan = plan_for(3, 12, 42);
  const LeakyGenerator gen({0.8, 0.2, 0.1}, fit_population_model(aux));

  auto splits_a = partition_shadow_splits(aux, 3, plan.master_seed, 40);
  auto splits_b = partition_shadow_splits(aux, 3, plan.master_seed, 40);
  run_shadows(splits_a, gen, plan);
  run_shadows(splits_b, gen, plan);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& sa = *splits_a[i].synthetic;
    const auto& sb = *splits_b[i].synthetic;
    REQUIRE(sa.row_count() == sb.row_count());
    for (std::size_t r = 0; r < sa.row_count(); ++r) {
      const auto ra = sa.row(r);
      const auto rb = sb.row(r);
      CHECK(std::equal(ra.begin(), ra.end(), rb.begin()));
    }
  }

  // Generating shadow 2 alone, with its derived seed, matches the batch run.
  const auto direct = gen.generate(splits_a[2].members, 12,
                                   derive_seed(42, "shadow", 2));
  const auto& batch = *splits_a[2].synthetic;
  for (std::size_t r = 0; r < batch.row_count(); ++r) {
    const auto rd = direct.row(r);
    const auto rb = batch.row(r);
    CHECK(std::equal(rd.begin(), rd.end(), rb.begin()));
  }
}

TEST_CASE("plan validation names the broken invariant") {
  ShadowRunPlan plan;
  plan.shadow_count = 5;
  plan.train_count = 3;
  plan.eval_count = 1;
  CHECK_THROWS_WITH_AS(plan.validate(),
                       doctest::Contains("train_count + eval_count"), Error);
}

TEST_CASE("label_records balances classes per shadow") {
  const auto aux = make_aux(200);
  const auto splits = partition_shadow_splits(aux, 2, 42, 25);
  const auto labeled = label_records(splits);
  REQUIRE(labeled.size() == 200);
  for (std::size_t shadow = 0; shadow < 2; ++shadow) {
    std::size_t members = 0;
    std::size_t total = 0;
    for (const auto& record : labeled) {
      if (record.shadow_index == shadow) {
        ++total;
        members += record.member ? 1 : 0;
      }
    }
    CHECK(total == 100);
    CHECK(members == 50);  // labels per shadow sum to |members|
  }

  SUBCASE("empty non-members violate the invariant") {
    auto broken = splits;
    broken[0].non_members =
        Dataset(broken[0].non_members.schema(), Provenance::Real);
    CHECK_THROWS_AS(label_records(broken), Error);
  }
}
