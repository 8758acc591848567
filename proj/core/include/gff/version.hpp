#pragma once

namespace gff {

inline constexpr const char* k_version = "0.1.0";

}  // namespace gff
