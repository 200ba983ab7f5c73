#pragma once

// Hybrid residue/floating numbers: value = N * 2^f where the integer N lives in
// the residue domain and f is an unbounded signed exponent.
//
// Signed mantissas use the symmetric convention: a residue vector that
// reconstructs to n >= M/2 denotes n - M.
//
// Every HybridNum carries an exact sign and a log2 magnitude estimate next to
// its residues. The estimate drives threshold detection without a CRT
// reconstruction; it stays within 1.0 of log2(max(1, |N|)).

#include "hrfna/bigint.hpp"
#include "hrfna/rns.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

namespace hrfna {

struct Rational {
  std::uint64_t num = 1;
  std::uint64_t den = 1;
  friend bool operator==(const Rational&, const Rational&) = default;
};

struct HybridConfig {
  /// Safety factor; the normalization threshold is tau = floor(alpha * M).
  Rational alpha{1, 1u << 19};
  /// Normalization divides the mantissa by 2^k and adds k to the exponent.
  int scale_shift_k = 9;
  /// Operands are kept with |N| < 2^b.
  int operand_bound_bits = 17;
  /// Reconstruct on every threshold check and assert the estimator agrees.
  bool audit = false;

  friend bool operator==(const HybridConfig&, const HybridConfig&) = default;
};

/// tau_int = floor(alpha * M).
BigInt threshold_int(const HybridConfig& cfg, const ModulusSet& ms);

/// Throws InvariantViolation naming the first failed invariant:
/// alpha-range, operand-bound (2^(2b) < M/2), threshold-within-bound
/// (tau_int <= 2^b), shift-below-bound (1 <= k < b), threshold-above-shift
/// (tau_int >= 2^k).
void validate(const HybridConfig& cfg, const ModulusSet& ms);

/// Which alignment an addition used.
enum class AddPath : std::uint8_t { none, exact_align, lossy_align };

class HybridNum {
 public:
  /// Builds a number from raw parts; sign and magnitude are derived by exact
  /// reconstruction.
  HybridNum(ResidueVector mantissa, std::int64_t exponent);

  const ResidueVector& mantissa() const noexcept { return mantissa_; }
  std::int64_t exponent() const noexcept { return exponent_; }
  double mag_log2() const noexcept { return mag_log2_; }
  /// -1, 0 or +1.
  int sign() const noexcept { return sign_; }
  const ModulusSet& set() const noexcept { return mantissa_.set(); }
  AddPath provenance() const noexcept { return provenance_; }

  friend bool operator==(const HybridNum&, const HybridNum&) = default;

 private:
  HybridNum(ResidueVector mantissa, std::int64_t exponent, int sign, double mag, AddPath path)
      : mantissa_(std::move(mantissa)),
        exponent_(exponent),
        mag_log2_(mag),
        sign_(sign),
        provenance_(path) {}

  friend struct HybridAccess;

  ResidueVector mantissa_;
  std::int64_t exponent_;
  double mag_log2_;
  int sign_;
  AddPath provenance_ = AddPath::none;
};

/// Structured record of one normalization pass.
struct NormEvent {
  BigInt input;
  BigInt output;
  int shift;
  std::int64_t exponent_before;
  std::int64_t exponent_after;
};

struct OpOutcome {
  HybridNum value;
  std::vector<NormEvent> events;
  AddPath path = AddPath::none;
};

/// Symmetric decode of a residue vector.
BigInt signed_value(const ResidueVector& rv, const ModulusSet& ms);

/// Chooses f so that N = round_half_even(x / 2^f) lies in
/// [2^(b-2), 2^(b-1)); x = 0 maps to N = 0, f = 0. Throws OutOfRange for
/// non-finite x.
HybridNum from_real(double x, const ModulusSet& ms, const HybridConfig& cfg);

/// A number with the given signed mantissa and exponent.
HybridNum from_parts(const BigInt& mantissa, std::int64_t exponent, const ModulusSet& ms);

/// signed(N) * 2^f in double precision.
double to_real(const HybridNum& h);

OpOutcome hrfna_mul_traced(const HybridNum& x, const HybridNum& y, const ModulusSet& ms,
                           const HybridConfig& cfg);
OpOutcome hrfna_add_traced(const HybridNum& x, const HybridNum& y, const ModulusSet& ms,
                           const HybridConfig& cfg);

inline HybridNum hrfna_mul(const HybridNum& x, const HybridNum& y, const ModulusSet& ms,
                           const HybridConfig& cfg) {
  return hrfna_mul_traced(x, y, ms, cfg).value;
}

inline HybridNum hrfna_add(const HybridNum& x, const HybridNum& y, const ModulusSet& ms,
                           const HybridConfig& cfg) {
  return hrfna_add_traced(x, y, ms, cfg).value;
}

/// Decides from signs and magnitude windows alone; nullopt when the windows
/// overlap.
std::optional<std::strong_ordering> hybrid_compare_fast(const HybridNum& x, const HybridNum& y);

/// Exact comparison of N_x * 2^f_x against N_y * 2^f_y in integers.
std::strong_ordering hybrid_compare_exact(const HybridNum& x, const HybridNum& y,
                                          const ModulusSet& ms);

std::strong_ordering hybrid_compare(const HybridNum& x, const HybridNum& y, const ModulusSet& ms);

}  // namespace hrfna
