#pragma once

namespace pma {

inline constexpr const char* kToolkitVersion = "1.0.0";

}  // namespace pma
