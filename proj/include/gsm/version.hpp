#pragma once

namespace gsm {
inline constexpr const char* kVersion = "0.1.0";
}
