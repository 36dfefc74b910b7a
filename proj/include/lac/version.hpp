#pragma once

namespace lac {

inline constexpr const char* kVersion = "0.1.0";

} // namespace lac
