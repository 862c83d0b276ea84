#pragma once

#include <stdexcept>
#include <string>

namespace tabaudit {

// Single failure type for the whole toolkit. Messages carry enough context
// (column names, row numbers, shadow indices) to act on without a debugger.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tabaudit
