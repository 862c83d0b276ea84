#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "tabaudit/csv.hpp"
#include "tabaudit/dataset.hpp"
#include "tabaudit/error.hpp"
#include "tabaudit/schema.hpp"
#include "testutil.hpp"

using namespace tabaudit;
using testutil::one_column;
using testutil::raw_table;

TEST_CASE("parse_numeric accepts decimals and rejects the rest") {
  CHECK(parse_numeric("2.50") == 2.5);
  CHECK(parse_numeric("-3") == -3.0);
  CHECK(parse_numeric("1e3") == 1000.0);
  CHECK(parse_numeric("30") == 30.0);
  CHECK_FALSE(parse_numeric(""));
  CHECK_FALSE(parse_numeric("x"));
  CHECK_FALSE(parse_numeric("1.2.3"));
  CHECK_FALSE(parse_numeric("nan"));
  CHECK_FALSE(parse_numeric("inf"));
  CHECK_FALSE(parse_numeric(" 1"));
  CHECK_FALSE(parse_numeric("1 "));
  // Integers stay exact up to 2^53; beyond that they are rejected.
  CHECK(parse_numeric("9007199254740992") == 9007199254740992.0);
  CHECK_FALSE(parse_numeric("9007199254740993"));
  CHECK_FALSE(parse_numeric("123456789012345678901234567890"));
}

TEST_CASE("infer_schema classifies columns") {
  SUBCASE("all-numeric cells give a numeric column") {
    const auto schema = infer_schema(one_column("v", {"1.5", "2", "30"}));
    CHECK(schema.columns[0].kind == ColumnKind::Numeric);
  }
  SUBCASE("strings give sorted distinct categories") {
    const auto schema = infer_schema(one_column("v", {"b", "a", "b"}));
    CHECK(schema.columns[0].kind == ColumnKind::Categorical);
    CHECK(schema.columns[0].categories ==
          std::vector<std::string>{"a", "b"});
  }
  SUBCASE("mixed content forces categorical") {
    const auto schema = infer_schema(one_column("v", {"1", "2", "x"}));
    CHECK(schema.columns[0].kind == ColumnKind::Categorical);
    CHECK(schema.columns[0].categories ==
          std::vector<std::string>{"1", "2", "x"});
  }
  SUBCASE("empty cells in a categorical column become <NA>") {
    const auto schema = infer_schema(one_column("v", {"b", "", "a"}));
    CHECK(schema.columns[0].categories ==
          std::vector<std::string>{"<NA>", "a", "b"});
  }
  SUBCASE("empty cell in a numeric column is an error") {
    CHECK_THROWS_WITH_AS(infer_schema(one_column("v", {"1", "", "3"})),
                         doctest::Contains("empty cell"), Error);
  }
  SUBCASE("duplicate header names are an error") {
    CHECK_THROWS_WITH_AS(
        infer_schema(raw_table({"a", "a"}, {{"1", "2"}})),
        doctest::Contains("duplicate header"), Error);
  }
  SUBCASE("empty table is an error") {
    CHECK_THROWS_AS(infer_schema(raw_table({"a"}, {})), Error);
  }
}

TEST_CASE("infer_schema is insensitive to row order") {
  auto raw = raw_table({"n", "c"}, {{"1", "x"},
                                    {"2.5", "y"},
                                    {"7", "x"},
                                    {"-3", ""},
                                    {"0", "z"}});
  const auto schema = infer_schema(raw);
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(raw.rows.begin(), raw.rows.end(), rng);
    CHECK(infer_schema(raw) == schema);
  }
}

TEST_CASE("encode_dataset maps cells per schema") {
  const auto raw = raw_table({"n", "c"}, {{"2.50", "b"}, {"1", "a"}});
  const auto schema = infer_schema(raw);
  const auto data = encode_dataset(raw, schema, Provenance::Real);
  CHECK(data.value(0, 0) == 2.5);
  CHECK(data.category(0, 1) == 1);  // "b" in ["a","b"]
  CHECK(data.category(1, 1) == 0);

  SUBCASE("unseen category") {
    const auto bad = raw_table({"n", "c"}, {{"1", "z"}});
    CHECK_THROWS_WITH_AS(encode_dataset(bad, schema, Provenance::Real),
                         doctest::Contains("unseen category"), Error);
  }
  SUBCASE("unparsable numeric cell") {
    const auto bad = raw_table({"n", "c"}, {{"what", "a"}});
    CHECK_THROWS_WITH_AS(encode_dataset(bad, schema, Provenance::Real),
                         doctest::Contains("unparsable numeric"), Error);
  }
  SUBCASE("integer beyond the exact range is rejected at encode time") {
    const auto bad = raw_table({"n", "c"}, {{"9007199254740993", "a"}});
    CHECK_THROWS_AS(encode_dataset(bad, schema, Provenance::Real), Error);
  }
  SUBCASE("categories may not grow at encode time") {
    auto narrow = schema;
    narrow.columns[1].categories = {"a"};
    CHECK_THROWS_AS(encode_dataset(raw, narrow, Provenance::Real), Error);
  }
}

TEST_CASE("encode then decode reproduces the table") {
  // Property over random tables without missing values: categorical cells
  // round-trip textually, numeric cells round-trip by value.
  std::mt19937 rng(42);
  const std::vector<std::string> cats = {"ant", "bee", "cow", "dog"};
  for (int trial = 0; trial < 25; ++trial) {
    RawTable raw;
    raw.header = {"num", "cat"};
    const int rows = 1 + static_cast<int>(rng() % 40);
    for (int r = 0; r < rows; ++r) {
      const double v =
          static_cast<double>(static_cast<int>(rng() % 2000) - 1000) / 8.0;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%g", v);
      raw.rows.push_back({buf, cats[rng() % cats.size()]});
    }
    const auto schema = infer_schema(raw);
    const auto data = encode_dataset(raw, schema, Provenance::Real);
    const auto decoded = decode_dataset(data);
    CHECK(decoded.header == raw.header);
    REQUIRE(decoded.rows.size() == raw.rows.size());
    for (std::size_t r = 0; r < raw.rows.size(); ++r) {
      CHECK(decoded.rows[r][1] == raw.rows[r][1]);
      CHECK(parse_numeric(decoded.rows[r][0]) ==
            parse_numeric(raw.rows[r][0]));
    }
    // A second encode of the decoded table is cell-identical.
    const auto again = encode_dataset(decoded, schema, Provenance::Real);
    for (std::size_t r = 0; r < raw.rows.size(); ++r) {
      CHECK(again.value(r, 0) == data.value(r, 0));
      CHECK(again.value(r, 1) == data.value(r, 1));
    }
  }
}

TEST_CASE("dataset validates cells on append") {
  TableSchema schema;
  schema.columns = {{"n", ColumnKind::Numeric, {}},
                    {"c", ColumnKind::Categorical, {"a", "b"}}};
  Dataset data(schema, Provenance::Real);
  const double nan = std::nan("");
  CHECK_THROWS_AS(data.append_row(std::vector<double>{nan, 0.0}), Error);
  CHECK_THROWS_AS(data.append_row(std::vector<double>{1.0, 2.0}), Error);
  CHECK_THROWS_AS(data.append_row(std::vector<double>{1.0, 0.5}), Error);
  CHECK_THROWS_AS(data.append_row(std::vector<double>{1.0}), Error);
  data.append_row(std::vector<double>{1.0, 1.0});
  CHECK(data.row_count() == 1);
}

TEST_CASE("denormalize joins child rows with parent attributes") {
  const auto parent_raw =
      raw_table({"id", "region"}, {{"1", "N"}, {"2", "S"}});
  const auto child_raw = raw_table(
      {"aid", "cust", "bal"}, {{"7", "1", "50"}, {"8", "2", "60"}});
  auto parent_schema = infer_schema(parent_raw);
  parent_schema.key = "id";
  auto child_schema = infer_schema(child_raw);
  child_schema.key = "aid";
  child_schema.foreign_keys = {{"cust", "parent", "id"}};
  const auto parent = encode_dataset(parent_raw, parent_schema,
                                     Provenance::Real);
  const auto child = encode_dataset(child_raw, child_schema,
                                    Provenance::Real);

  const auto joined = denormalize(parent, child, child_schema.foreign_keys[0]);
  REQUIRE(joined.row_count() == child.row_count());
  REQUIRE(joined.schema().columns.size() == 4);
  CHECK(joined.schema().columns[3].name == "parent.region");
  CHECK(joined.value(0, 0) == 7.0);
  CHECK(joined.value(0, 1) == 1.0);
  CHECK(joined.value(0, 2) == 50.0);
  const auto& region = joined.schema().columns[3];
  CHECK(region.categories[joined.category(0, 3)] == "N");
  CHECK(region.categories[joined.category(1, 3)] == "S");

  // Key and foreign-key columns stay out of the feature set.
  const auto features = joined.schema().feature_columns();
  CHECK(features == std::vector<std::size_t>{2, 3});

  SUBCASE("dangling foreign key") {
    const auto bad_raw = raw_table({"aid", "cust", "bal"}, {{"9", "9", "1"}});
    const auto bad = encode_dataset(bad_raw, child_schema, Provenance::Real);
    CHECK_THROWS_WITH_AS(
        denormalize(parent, bad, child_schema.foreign_keys[0]),
        doctest::Contains("dangling foreign key"), Error);
  }
  SUBCASE("duplicate parent keys") {
    const auto dup_raw =
        raw_table({"id", "region"}, {{"1", "N"}, {"1", "S"}});
    const auto dup = encode_dataset(dup_raw, parent_schema, Provenance::Real);
    CHECK_THROWS_WITH_AS(
        denormalize(dup, child, child_schema.foreign_keys[0]),
        doctest::Contains("duplicate parent keys"), Error);
  }
}

TEST_CASE("csv reader handles RFC 4180 forms") {
  SUBCASE("quoted fields with commas, quotes and newlines") {
    std::istringstream in(
        "a,b\r\n\"1,5\",\"say \"\"hi\"\"\"\n\"two\nlines\",plain\n");
    const auto table = read_csv(in);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0][0] == "1,5");
    CHECK(table.rows[0][1] == "say \"hi\"");
    CHECK(table.rows[1][0] == "two\nlines");
  }
  SUBCASE("missing trailing newline") {
    std::istringstream in("a,b\n1,2");
    const auto table = read_csv(in);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0][1] == "2");
  }
  SUBCASE("field count mismatch") {
    std::istringstream in("a,b\n1\n");
    CHECK_THROWS_WITH_AS(read_csv(in), doctest::Contains("expected 2"),
                         Error);
  }
  SUBCASE("stray quote") {
    std::istringstream in("a\nx\"y\n");
    CHECK_THROWS_AS(read_csv(in), Error);
  }
  SUBCASE("writer quotes only when needed and round-trips") {
    const auto table = raw_table(
        {"x", "y"}, {{"a,b", "plain"}, {"with \"q\"", "nl\nend"}});
    std::ostringstream out;
    write_csv(out, table);
    std::istringstream in(out.str());
    const auto back = read_csv(in);
    CHECK(back.header == table.header);
    CHECK(back.rows == table.rows);
  }
}

TEST_CASE("schema json round-trips") {
  TableSchema schema;
  schema.columns = {{"id", ColumnKind::Numeric, {}},
                    {"grp", ColumnKind::Categorical, {"x", "y"}},
                    {"fkc", ColumnKind::Numeric, {}}};
  schema.key = "id";
  schema.foreign_keys = {{"fkc", "accounts", "id"}};
  const auto j = schema_to_json(schema);
  CHECK(j.at("version") == "schema-v1");
  CHECK(schema_from_json(j) == schema);

  testutil::TempDir dir("schema");
  save_schema(schema, dir.file("schema.json"));
  CHECK(load_schema(dir.file("schema.json")) == schema);

  SUBCASE("version check") {
    auto bad = j;
    bad["version"] = "schema-v2";
    CHECK_THROWS_AS(schema_from_json(bad), Error);
  }
  SUBCASE("unsorted categories rejected") {
    auto bad = j;
    bad["columns"][1]["categories"] = {"y", "x"};
    CHECK_THROWS_AS(schema_from_json(bad), Error);
  }
}

TEST_CASE("schema exclusion rules") {
  TableSchema schema;
  schema.columns = {{"id", ColumnKind::Numeric, {}},
                    {"a", ColumnKind::Numeric, {}},
                    {"fkc", ColumnKind::Numeric, {}}};
  schema.key = "id";
  schema.foreign_keys = {{"fkc", "p", "id"}};
  CHECK(schema.excluded_from_features(0));
  CHECK_FALSE(schema.excluded_from_features(1));
  CHECK(schema.excluded_from_features(2));
  CHECK(schema.feature_columns() == std::vector<std::size_t>{1});
}
