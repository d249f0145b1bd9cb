#pragma once

namespace sasdp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sasdp
