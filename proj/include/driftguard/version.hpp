#pragma once

namespace driftguard {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace driftguard
