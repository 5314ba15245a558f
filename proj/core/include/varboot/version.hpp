#pragma once

namespace varboot {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace varboot
