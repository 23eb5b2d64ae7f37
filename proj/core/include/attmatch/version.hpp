#pragma once

namespace attmatch {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace attmatch
