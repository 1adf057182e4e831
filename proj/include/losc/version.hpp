#pragma once

namespace losc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace losc
