#pragma once

namespace sparsereg {
inline constexpr const char* kToolName = "sparsereg";
inline constexpr const char* kToolVersion = "0.1.0";
}  // namespace sparsereg
