#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace irslos {

// Round-trip exact decimal form (17 significant digits).
std::string fmt_double(double v);

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace irslos
