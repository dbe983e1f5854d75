#pragma once

namespace hknoise {

inline constexpr const char* kVersion = "0.1.0";

} // namespace hknoise
