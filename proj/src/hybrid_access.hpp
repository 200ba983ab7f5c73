#pragma once

#include "hrfna/hybrid.hpp"

namespace hrfna {

// Library-internal construction without reconstruction; callers guarantee
// that sign and magnitude match the mantissa.
struct HybridAccess {
  static HybridNum make(ResidueVector mantissa, std::int64_t exponent, int sign, double mag,
                        AddPath path = AddPath::none) {
    return HybridNum(std::move(mantissa), exponent, sign, mag, path);
  }

  static HybridNum with_path(const HybridNum& h, AddPath path) {
    HybridNum out = h;
    out.provenance_ = path;
    return out;
  }
};

inline int sign_of(const BigInt& n) { return n > 0 ? 1 : (n < 0 ? -1 : 0); }

}  // namespace hrfna
