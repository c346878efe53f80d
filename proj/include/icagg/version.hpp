#pragma once

namespace icagg {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace icagg
