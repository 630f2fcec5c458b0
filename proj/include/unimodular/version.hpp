#pragma once

namespace unimodular {

inline constexpr const char* library_version = "1.0.0";
inline constexpr int json_schema_version = 1;

}  // namespace unimodular
