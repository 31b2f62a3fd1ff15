#pragma once

namespace databand {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace databand
