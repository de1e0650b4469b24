#pragma once

namespace ebmz {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ebmz
