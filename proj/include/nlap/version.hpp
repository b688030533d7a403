#pragma once

namespace nlap {
inline constexpr const char* kVersion = "0.1.0";
}
