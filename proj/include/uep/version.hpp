#pragma once

namespace uep {

inline constexpr const char* kToolName = "uepsim";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace uep
