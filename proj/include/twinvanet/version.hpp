#pragma once

namespace twinvanet {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace twinvanet
