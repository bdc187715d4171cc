#pragma once

namespace sr {

inline constexpr char kToolName[] = "sr-arith";
inline constexpr char kVersion[] = "0.1.0";

}  // namespace sr
