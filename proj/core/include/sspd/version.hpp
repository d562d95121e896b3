#pragma once

namespace sspd {
inline constexpr const char* kVersion = "1.0.0";
}
