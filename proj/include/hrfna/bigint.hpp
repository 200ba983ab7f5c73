#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace hrfna {

using BigInt = boost::multiprecision::cpp_int;
__extension__ using u128 = unsigned __int128;

/// Round-half-to-even of n / 2^shift for signed n.
BigInt shift_right_half_even(const BigInt& n, unsigned shift);

/// log2(max(1, |n|)) in double precision.
double log2_magnitude(const BigInt& n);

/// n as a double, correctly rounded to nearest for |n| < 2^1024.
double to_double(const BigInt& n);

/// Lowercase hex of |n| with a leading '-' for negative n; "0" for zero.
std::string to_hex(const BigInt& n);

inline BigInt from_u128(u128 v) {
  BigInt r = static_cast<std::uint64_t>(v >> 64);
  r <<= 64;
  r += static_cast<std::uint64_t>(v);
  return r;
}

/// Low 128 bits of a nonnegative n.
inline u128 to_u128(const BigInt& n) {
  return static_cast<u128>(static_cast<std::uint64_t>(n >> 64)) << 64 |
         static_cast<std::uint64_t>(n & BigInt(0xFFFFFFFFFFFFFFFFull));
}

}  // namespace hrfna
