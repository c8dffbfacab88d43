#pragma once

namespace dnlw {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dnlw
