#pragma once

namespace dgpr {

inline constexpr const char* version_string = "0.3.0";
inline constexpr int format_version = 1;

}  // namespace dgpr
