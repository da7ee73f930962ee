#pragma once

namespace abelfe {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace abelfe
