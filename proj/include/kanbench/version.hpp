#pragma once

namespace kanbench {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace kanbench
