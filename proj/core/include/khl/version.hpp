#pragma once

namespace khl {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace khl
