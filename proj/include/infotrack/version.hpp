#pragma once

namespace infotrack {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace infotrack
