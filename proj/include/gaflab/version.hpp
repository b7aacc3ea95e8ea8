#pragma once

namespace gaflab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gaflab
