#pragma once

namespace spde {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spde
