#pragma once

// Exact residue-number-system arithmetic over a pairwise-coprime modulus set.
//
// A ModulusSet is an immutable, cheaply copyable handle; ResidueVectors keep a
// copy of the set they were produced under. Two sets are the same set iff
// their moduli lists are equal.

#include "hrfna/bigint.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace hrfna {

struct CrtWeight {
  BigInt partial;        // M_i = M / m_i
  std::uint32_t inverse; // y_i = M_i^{-1} mod m_i
};

class ModulusSet {
 public:
  /// Validates and precomputes CRT constants. Throws ModulusTooSmall or
  /// NotCoprime.
  explicit ModulusSet(std::vector<std::uint32_t> moduli);

  /// The set {4093, 4095, 4091}.
  static ModulusSet default_set();

  std::size_t size() const noexcept { return data_->moduli.size(); }
  std::uint32_t modulus(std::size_t i) const { return data_->moduli[i]; }
  std::span<const std::uint32_t> moduli() const noexcept { return data_->moduli; }
  const BigInt& composite() const noexcept { return data_->composite; }
  std::span<const CrtWeight> crt_weights() const noexcept { return data_->weights; }

  /// Composite as a 128-bit value when it is small enough for the fast CRT
  /// accumulator (M < 2^120).
  std::optional<u128> composite_u128() const noexcept { return data_->composite_small; }

  /// Composite as 64-bit, when M < 2^64.
  std::optional<std::uint64_t> composite_u64() const noexcept;

  /// M_i as 128-bit; only meaningful when composite_u128() is engaged.
  u128 partial_u128(std::size_t i) const { return data_->partial_small[i]; }

  friend bool operator==(const ModulusSet& a, const ModulusSet& b) {
    return a.data_ == b.data_ || a.data_->moduli == b.data_->moduli;
  }

 private:
  struct Data {
    std::vector<std::uint32_t> moduli;
    BigInt composite;
    std::vector<CrtWeight> weights;
    std::optional<u128> composite_small;
    std::vector<u128> partial_small;
  };
  std::shared_ptr<const Data> data_;
};

/// Throwing factory matching make_modulus_set(moduli).
inline ModulusSet make_modulus_set(std::vector<std::uint32_t> moduli) {
  return ModulusSet(std::move(moduli));
}

/// Modular inverse of a mod m via extended Euclid; requires gcd(a, m) = 1.
std::uint32_t mod_inverse(std::uint64_t a, std::uint32_t m);

class ResidueVector {
 public:
  /// Checks length and 0 <= r_i < m_i; throws OutOfRange otherwise.
  ResidueVector(std::vector<std::uint32_t> residues, ModulusSet set);

  std::size_t size() const noexcept { return residues_.size(); }
  std::uint32_t operator[](std::size_t i) const { return residues_[i]; }
  std::span<const std::uint32_t> residues() const noexcept { return residues_; }
  const ModulusSet& set() const noexcept { return set_; }

  bool is_zero() const noexcept;

  friend bool operator==(const ResidueVector& a, const ResidueVector& b) {
    return a.residues_ == b.residues_ && a.set_ == b.set_;
  }

 private:
  struct Unchecked {};
  ResidueVector(Unchecked, std::vector<std::uint32_t> residues, ModulusSet set)
      : residues_(std::move(residues)), set_(std::move(set)) {}

  friend ResidueVector encode_residues(const BigInt&, const ModulusSet&);
  friend ResidueVector encode_residues(std::uint64_t, const ModulusSet&);
  friend ResidueVector encode_signed(const BigInt&, const ModulusSet&);
  friend ResidueVector encode_signed(std::int64_t, const ModulusSet&);
  friend ResidueVector mod_mul(const ResidueVector&, const ResidueVector&, const ModulusSet&);
  friend ResidueVector mod_add(const ResidueVector&, const ResidueVector&, const ModulusSet&);
  friend ResidueVector mod_sub(const ResidueVector&, const ResidueVector&, const ModulusSet&);

  std::vector<std::uint32_t> residues_;
  ModulusSet set_;
};

/// Residues of 0 <= n < M. Throws OutOfRange otherwise.
ResidueVector encode_residues(const BigInt& n, const ModulusSet& ms);
ResidueVector encode_residues(std::uint64_t n, const ModulusSet& ms);

/// Residues of a signed n under the symmetric convention (n < 0 stored as
/// M + n). Requires -M/2 <= n < M/2; throws OutOfRange otherwise.
ResidueVector encode_signed(const BigInt& n, const ModulusSet& ms);
ResidueVector encode_signed(std::int64_t n, const ModulusSet& ms);

/// The unique n in [0, M) with n mod m_i = r_i. Throws MismatchedSet.
BigInt crt_reconstruct(const ResidueVector& rv, const ModulusSet& ms);

ResidueVector mod_mul(const ResidueVector& a, const ResidueVector& b, const ModulusSet& ms);
ResidueVector mod_add(const ResidueVector& a, const ResidueVector& b, const ModulusSet& ms);
ResidueVector mod_sub(const ResidueVector& a, const ResidueVector& b, const ModulusSet& ms);

}  // namespace hrfna
