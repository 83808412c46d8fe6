#pragma once

#include <cstdint>
#include <string>

namespace ir2c {

// Signed 128-bit scalar used for all integer magnitudes. Every value of the
// ten supported C integer types fits with room to spare, so arithmetic on
// magnitudes is exact except for multiplication and shifts, which go through
// overflow-checked helpers below.
using Int128 = __int128;
using UInt128 = unsigned __int128;

std::string int128_to_string(Int128 v);

// Parses a decimal string (optionally signed). Returns false on syntax error
// or if the value does not fit in Int128.
bool int128_from_string(const std::string& text, Int128& out);

// true if a * b overflows Int128; otherwise stores the exact product.
inline bool mul_overflow(Int128 a, Int128 b, Int128& out) {
    return __builtin_mul_overflow(a, b, &out);
}

}  // namespace ir2c
