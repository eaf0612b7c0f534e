#pragma once

namespace opse {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace opse
