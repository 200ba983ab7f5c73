#include "hrfna/hybrid.hpp"

#include "hrfna/error.hpp"
#include "hrfna/normalization.hpp"
#include "hybrid_access.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

namespace hrfna {

namespace {

std::int64_t checked_exponent_sum(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OutOfRange("exponent overflow");
  return r;
}

// log2(2^a + 2^b) for magnitudes of two nonzero same-sign addends.
double log_sum(double a, double b) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log2(1.0 + std::exp2(lo - hi));
}

// Throws when |n| does not fit the symmetric range, i.e. the residue result
// has wrapped modulo M.
void require_in_range(const BigInt& n, const ModulusSet& ms, const char* what) {
  if (2 * boost::multiprecision::abs(n) >= ms.composite())
    throw InternalError(std::string(what) + " wrapped modulo M; operand bounds misconfigured");
}

struct Addend {
  ResidueVector mantissa;
  int sign;
  double mag;
};

}  // namespace

BigInt threshold_int(const HybridConfig& cfg, const ModulusSet& ms) {
  if (cfg.alpha.den == 0) throw InvariantViolation("alpha-range", "alpha denominator is zero");
  return ms.composite() * cfg.alpha.num / cfg.alpha.den;
}

void validate(const HybridConfig& cfg, const ModulusSet& ms) {
  const auto& a = cfg.alpha;
  if (a.den == 0 || a.num == 0 || a.num >= a.den)
    throw InvariantViolation("alpha-range", "alpha must lie strictly between 0 and 1");
  const int b = cfg.operand_bound_bits;
  if (b < 2 || b > 512) throw InvariantViolation("operand-bound", "b out of supported range");
  if (2 * (BigInt(1) << (2 * b)) >= ms.composite())
    throw InvariantViolation("operand-bound", "2^(2b) must be below M/2");
  const BigInt tau = threshold_int(cfg, ms);
  if (tau > (BigInt(1) << b))
    throw InvariantViolation("threshold-within-bound", "tau_int must not exceed 2^b");
  const int k = cfg.scale_shift_k;
  if (k < 1 || k >= b) throw InvariantViolation("shift-below-bound", "k must satisfy 1 <= k < b");
  if (tau < (BigInt(1) << k))
    throw InvariantViolation("threshold-above-shift", "tau_int must be at least 2^k");
}

HybridNum::HybridNum(ResidueVector mantissa, std::int64_t exponent)
    : mantissa_(std::move(mantissa)), exponent_(exponent) {
  const BigInt n = signed_value(mantissa_, mantissa_.set());
  sign_ = sign_of(n);
  mag_log2_ = log2_magnitude(n);
}

BigInt signed_value(const ResidueVector& rv, const ModulusSet& ms) {
  BigInt n = crt_reconstruct(rv, ms);
  if (2 * n >= ms.composite()) n -= ms.composite();
  return n;
}

HybridNum from_parts(const BigInt& mantissa, std::int64_t exponent, const ModulusSet& ms) {
  return HybridAccess::make(encode_signed(mantissa, ms), exponent, sign_of(mantissa),
                            log2_magnitude(mantissa));
}

HybridNum from_real(double x, const ModulusSet& ms, const HybridConfig& cfg) {
  if (!std::isfinite(x)) throw OutOfRange("cannot encode a non-finite value");
  if (x == 0.0) return from_parts(0, 0, ms);
  const int b = cfg.operand_bound_bits;
  int e = 0;
  std::frexp(x, &e);  // |x| in [2^(e-1), 2^e)
  std::int64_t f = static_cast<std::int64_t>(e) - (b - 1);
  // Scaling by a power of two is exact unless it leaves the normal range,
  // which cannot happen: the result has magnitude ~2^(b-1).
  const double scaled = std::nearbyint(std::ldexp(x, static_cast<int>(-f)));
  BigInt n(scaled);
  if (boost::multiprecision::abs(n) == (BigInt(1) << (b - 1))) {
    // Rounded up out of the window; the value is a power of two.
    n /= 2;
    ++f;
  }
  return from_parts(n, f, ms);
}

double to_real(const HybridNum& h) {
  if (h.sign() == 0) return 0.0;
  const double n = to_double(signed_value(h.mantissa(), h.set()));
  const std::int64_t f = std::clamp<std::int64_t>(h.exponent(), INT_MIN, INT_MAX);
  return std::ldexp(n, static_cast<int>(f));
}

OpOutcome hrfna_mul_traced(const HybridNum& x, const HybridNum& y, const ModulusSet& ms,
                           const HybridConfig& cfg) {
  const int sign = x.sign() * y.sign();
  const double mag = sign == 0 ? 0.0 : x.mag_log2() + y.mag_log2();
  const std::int64_t exponent = checked_exponent_sum(x.exponent(), y.exponent());
  ResidueVector product = mod_mul(x.mantissa(), y.mantissa(), ms);

  const double range_log2 = log2_magnitude(ms.composite()) - 1.0;
  if (cfg.audit || (sign != 0 && mag >= range_log2 - 2.0)) {
    const BigInt exact = signed_value(x.mantissa(), ms) * signed_value(y.mantissa(), ms);
    require_in_range(exact, ms, "product");
    if (signed_value(product, ms) != exact) throw InternalError("residue product mismatch");
  }

  OpOutcome out{HybridAccess::make(std::move(product), exponent, sign, mag), {}, AddPath::none};
  out.value = settle(std::move(out.value), ms, cfg, out.events);
  return out;
}

OpOutcome hrfna_add_traced(const HybridNum& x, const HybridNum& y, const ModulusSet& ms,
                           const HybridConfig& cfg) {
  if (!(x.set() == ms) || !(y.set() == ms)) throw MismatchedSet();
  if (y.sign() == 0) return {x, {}, AddPath::none};
  if (x.sign() == 0) return {y, {}, AddPath::none};

  // L carries the larger exponent. For equal exponents the choice does not
  // affect the result: no scaling or shifting happens.
  const bool x_larger = x.exponent() >= y.exponent();
  const HybridNum& large = x_larger ? x : y;
  const HybridNum& small = x_larger ? y : x;
  const std::int64_t delta = large.exponent() - small.exponent();
  const double scaled_mag =
      delta == 0 ? std::max(x.mag_log2(), y.mag_log2()) : large.mag_log2() + static_cast<double>(delta);
  const double half_tau_log2 = log2_magnitude(threshold_int(cfg, ms)) - 1.0;

  Addend a{large.mantissa(), large.sign(), large.mag_log2()};
  Addend b{small.mantissa(), small.sign(), small.mag_log2()};
  std::int64_t exponent = 0;
  AddPath path;
  if (scaled_mag < half_tau_log2) {
    path = AddPath::exact_align;
    exponent = small.exponent();
    if (delta > 0) {
      a.mantissa = mod_mul(a.mantissa, encode_residues(BigInt(1) << delta, ms), ms);
      a.mag += static_cast<double>(delta);
    }
  } else {
    path = AddPath::lossy_align;
    exponent = large.exponent();
    const auto shift = static_cast<unsigned>(std::min<std::int64_t>(delta, 1 << 30));
    const BigInt shifted = shift_right_half_even(signed_value(b.mantissa, ms), shift);
    b = Addend{encode_signed(shifted, ms), sign_of(shifted), log2_magnitude(shifted)};
  }

  ResidueVector sum = mod_add(a.mantissa, b.mantissa, ms);
  int sign = 0;
  double mag = 0.0;
  if (b.sign == 0) {
    sign = a.sign;
    mag = a.mag;
  } else if (a.sign == b.sign) {
    sign = a.sign;
    mag = log_sum(a.mag, b.mag);
    if (mag >= log2_magnitude(ms.composite()) - 3.0) {
      require_in_range(signed_value(a.mantissa, ms) + signed_value(b.mantissa, ms), ms, "sum");
    }
  } else {
    // Cancellation: the estimate cannot be derived from the addends.
    const BigInt n = signed_value(sum, ms);
    sign = sign_of(n);
    mag = log2_magnitude(n);
  }

  OpOutcome out{HybridAccess::make(std::move(sum), exponent, sign, mag, path), {}, path};
  if (cfg.audit) {
    const BigInt exact = signed_value(a.mantissa, ms) + signed_value(b.mantissa, ms);
    require_in_range(exact, ms, "sum");
  }
  out.value = HybridAccess::with_path(settle(std::move(out.value), ms, cfg, out.events), path);
  return out;
}

std::optional<std::strong_ordering> hybrid_compare_fast(const HybridNum& x, const HybridNum& y) {
  if (x.sign() != y.sign()) return x.sign() <=> y.sign();
  if (x.sign() == 0) return std::strong_ordering::equal;
  // Each estimate is within 1.0 of the truth, so windows further apart than
  // 2.0 are disjoint.
  const double wx = x.mag_log2() + static_cast<double>(x.exponent());
  const double wy = y.mag_log2() + static_cast<double>(y.exponent());
  if (std::abs(wx - wy) <= 2.0) return std::nullopt;
  const bool x_bigger = wx > wy;
  if (x.sign() > 0) return x_bigger ? std::strong_ordering::greater : std::strong_ordering::less;
  return x_bigger ? std::strong_ordering::less : std::strong_ordering::greater;
}

std::strong_ordering hybrid_compare_exact(const HybridNum& x, const HybridNum& y,
                                          const ModulusSet& ms) {
  const BigInt nx = signed_value(x.mantissa(), ms);
  const BigInt ny = signed_value(y.mantissa(), ms);
  const int sx = sign_of(nx), sy = sign_of(ny);
  if (sx != sy || sx == 0) return sx <=> sy;
  // Same nonzero sign. 1 <= |N| < M, so exponent gaps wider than log2(M)
  // decide the magnitude order on their own.
  const std::int64_t gap = x.exponent() - y.exponent();
  const auto range_bits = static_cast<std::int64_t>(boost::multiprecision::msb(ms.composite()) + 1);
  std::strong_ordering mag_order = std::strong_ordering::equal;
  if (gap > range_bits) {
    mag_order = std::strong_ordering::greater;
  } else if (-gap > range_bits) {
    mag_order = std::strong_ordering::less;
  } else {
    BigInt ax = boost::multiprecision::abs(nx), ay = boost::multiprecision::abs(ny);
    if (gap > 0) ax <<= static_cast<unsigned>(gap);
    if (gap < 0) ay <<= static_cast<unsigned>(-gap);
    mag_order = ax < ay ? std::strong_ordering::less
                : (ax > ay ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
  if (sx > 0) return mag_order;
  return 0 <=> mag_order;
}

std::strong_ordering hybrid_compare(const HybridNum& x, const HybridNum& y, const ModulusSet& ms) {
  if (auto fast = hybrid_compare_fast(x, y)) return *fast;
  return hybrid_compare_exact(x, y, ms);
}

}  // namespace hrfna
