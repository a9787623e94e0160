#pragma once

namespace nrsense {
inline constexpr const char* kVersion = "0.1.0";
} // namespace nrsense
