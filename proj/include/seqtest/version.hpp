#pragma once

namespace seqtest {
inline constexpr const char* kVersion = "0.1.0";
}
