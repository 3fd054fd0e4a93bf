#pragma once

namespace glasslab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace glasslab
