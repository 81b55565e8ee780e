#pragma once

namespace concfn {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace concfn
