#pragma once

namespace codedq {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace codedq
