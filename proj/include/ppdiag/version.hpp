#pragma once

namespace ppdiag {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ppdiag
