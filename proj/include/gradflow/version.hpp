#pragma once

namespace gradflow {
inline constexpr const char* kVersion = "0.1.0";
}
