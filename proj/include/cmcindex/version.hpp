#pragma once

namespace cmc {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace cmc
