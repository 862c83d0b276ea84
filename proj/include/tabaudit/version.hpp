#pragma once

namespace tabaudit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tabaudit
