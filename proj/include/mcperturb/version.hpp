#pragma once

namespace mcperturb {

inline constexpr const char* kToolName = "mcperturb";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace mcperturb
