#pragma once

#include <cstdint>

namespace losc::seeds {

// Stream identifiers for derive_seed(master, stream, index).
inline constexpr std::uint64_t kEnv = 1;
inline constexpr std::uint64_t kAction = 2;
inline constexpr std::uint64_t kInit = 3;
inline constexpr std::uint64_t kBench = 4;

}  // namespace losc::seeds
