#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "tabaudit/csv.hpp"
#include "tabaudit/dataset.hpp"

namespace testutil {

inline tabaudit::RawTable raw_table(
    std::vector<std::string> header,
    std::vector<std::vector<std::string>> rows) {
  tabaudit::RawTable t;
  t.header = std::move(header);
  t.rows = std::move(rows);
  return t;
}

// Single-column table, the shape most schema-inference cases need.
inline tabaudit::RawTable one_column(const std::string& name,
                                     std::vector<std::string> cells) {
  tabaudit::RawTable t;
  t.header = {name};
  for (auto& cell : cells) {
    t.rows.push_back({std::move(cell)});
  }
  return t;
}

// Scratch directory under the build tree, wiped on construction.
class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() /
              ("tabaudit_test_" + name)) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }

  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace testutil
