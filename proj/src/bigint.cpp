#include "hrfna/bigint.hpp"

#include <algorithm>
#include <cmath>

namespace hrfna {

BigInt shift_right_half_even(const BigInt& n, unsigned shift) {
  if (shift == 0 || n == 0) return n;
  const bool negative = n < 0;
  const BigInt mag = negative ? BigInt(-n) : n;
  // |n| < 2^(shift-1) is below one half and rounds to zero.
  if (boost::multiprecision::msb(mag) + 1 < shift) return 0;
  BigInt q = mag >> shift;
  const BigInt rem = mag - (q << shift);
  const BigInt half = BigInt(1) << (shift - 1);
  if (rem > half || (rem == half && (q & 1) != 0)) ++q;
  return negative ? BigInt(-q) : q;
}

double log2_magnitude(const BigInt& n) {
  const BigInt mag = boost::multiprecision::abs(n);
  if (mag <= 1) return 0.0;
  const unsigned bits = boost::multiprecision::msb(mag) + 1;
  if (bits <= 53) return std::log2(static_cast<double>(mag.convert_to<std::uint64_t>()));
  // Keep the top 53 bits; the dropped tail changes log2 by < 2^-52.
  const unsigned drop = bits - 53;
  const auto top = static_cast<std::uint64_t>(mag >> drop);
  return std::log2(static_cast<double>(top)) + static_cast<double>(drop);
}

double to_double(const BigInt& n) {
  const bool negative = n < 0;
  const BigInt mag = negative ? BigInt(-n) : n;
  if (mag == 0) return 0.0;
  const unsigned bits = boost::multiprecision::msb(mag) + 1;
  double r = 0.0;
  if (bits <= 53) {
    r = static_cast<double>(mag.convert_to<std::uint64_t>());
  } else {
    const unsigned drop = bits - 53;
    const BigInt rounded = shift_right_half_even(mag, drop);
    r = std::ldexp(static_cast<double>(rounded.convert_to<std::uint64_t>()),
                   static_cast<int>(drop));
  }
  return negative ? -r : r;
}

std::string to_hex(const BigInt& n) {
  static constexpr char digits[] = "0123456789abcdef";
  if (n == 0) return "0";
  BigInt mag = boost::multiprecision::abs(n);
  std::string out;
  while (mag != 0) {
    out.push_back(digits[static_cast<unsigned>(mag & 0xF)]);
    mag >>= 4;
  }
  if (n < 0) out.push_back('-');
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace hrfna
