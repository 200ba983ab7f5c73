#include "hrfna/rns.hpp"

#include "hrfna/error.hpp"

#include <limits>
#include <numeric>
#include <string>
#include <tuple>
#include <utility>

namespace hrfna {

namespace {

constexpr u128 kFastCompositeLimit = u128{1} << 120;

void require_same(const ResidueVector& rv, const ModulusSet& ms) {
  if (!(rv.set() == ms)) throw MismatchedSet();
}

}  // namespace

std::uint32_t mod_inverse(std::uint64_t a, std::uint32_t m) {
  // Extended Euclid on (a mod m, m), tracking only the coefficient of a.
  std::int64_t old_r = static_cast<std::int64_t>(a % m), r = m;
  std::int64_t old_s = 1, s = 0;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    std::tie(old_r, r) = std::pair{r, old_r - q * r};
    std::tie(old_s, s) = std::pair{s, old_s - q * s};
  }
  if (old_r != 1) throw InternalError("mod_inverse: operand not invertible");
  std::int64_t inv = old_s % static_cast<std::int64_t>(m);
  if (inv < 0) inv += m;
  const auto result = static_cast<std::uint32_t>(inv);
  if ((static_cast<u128>(a % m) * result) % m != 1 % m)
    throw InternalError("mod_inverse: post-check failed");
  return result;
}

ModulusSet::ModulusSet(std::vector<std::uint32_t> moduli) {
  if (moduli.empty()) throw ModulusTooSmall("modulus list is empty");
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    if (moduli[i] < 2)
      throw ModulusTooSmall("modulus at position " + std::to_string(i) + " is below 2");
    if (moduli[i] >= (1u << 16))
      throw OutOfRange("modulus at position " + std::to_string(i) + " exceeds 16 bits");
  }
  for (std::size_t i = 0; i < moduli.size(); ++i)
    for (std::size_t j = i + 1; j < moduli.size(); ++j)
      if (std::gcd(moduli[i], moduli[j]) != 1) throw NotCoprime(i, j);

  auto data = std::make_shared<Data>();
  data->composite = 1;
  for (auto m : moduli) data->composite *= m;
  for (auto m : moduli) {
    BigInt partial = data->composite / m;
    const auto partial_mod = static_cast<std::uint64_t>(partial % m);
    const std::uint32_t inverse = mod_inverse(partial_mod, m);
    if ((partial * inverse) % m != 1) throw InternalError("CRT weight post-check failed");
    data->weights.push_back({std::move(partial), inverse});
  }
  if (data->composite < from_u128(kFastCompositeLimit)) {
    data->composite_small = to_u128(data->composite);
    for (const auto& w : data->weights) data->partial_small.push_back(to_u128(w.partial));
  }
  data->moduli = std::move(moduli);
  data_ = std::move(data);
}

ModulusSet ModulusSet::default_set() {
  static const ModulusSet set({4093, 4095, 4091});
  return set;
}

std::optional<std::uint64_t> ModulusSet::composite_u64() const noexcept {
  if (data_->composite_small && *data_->composite_small >> 64 == 0)
    return static_cast<std::uint64_t>(*data_->composite_small);
  return std::nullopt;
}

ResidueVector::ResidueVector(std::vector<std::uint32_t> residues, ModulusSet set)
    : residues_(std::move(residues)), set_(std::move(set)) {
  if (residues_.size() != set_.size()) throw OutOfRange("residue count does not match modulus count");
  for (std::size_t i = 0; i < residues_.size(); ++i)
    if (residues_[i] >= set_.modulus(i))
      throw OutOfRange("residue " + std::to_string(i) + " not below its modulus");
}

bool ResidueVector::is_zero() const noexcept {
  for (auto r : residues_)
    if (r != 0) return false;
  return true;
}

ResidueVector encode_residues(std::uint64_t n, const ModulusSet& ms) {
  if (auto m = ms.composite_u64(); m && n >= *m) throw OutOfRange("value not below the composite modulus");
  std::vector<std::uint32_t> r(ms.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = static_cast<std::uint32_t>(n % ms.modulus(i));
  return ResidueVector(ResidueVector::Unchecked{}, std::move(r), ms);
}

ResidueVector encode_residues(const BigInt& n, const ModulusSet& ms) {
  if (n < 0 || n >= ms.composite()) throw OutOfRange("value outside [0, M)");
  if (n <= std::numeric_limits<std::uint64_t>::max())
    return encode_residues(n.convert_to<std::uint64_t>(), ms);
  std::vector<std::uint32_t> r(ms.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = static_cast<std::uint32_t>(n % ms.modulus(i));
  return ResidueVector(ResidueVector::Unchecked{}, std::move(r), ms);
}

ResidueVector encode_signed(std::int64_t n, const ModulusSet& ms) {
  if (auto m = ms.composite_u64()) {
    // |n| must stay within the symmetric range.
    const u128 mag = n < 0 ? static_cast<u128>(0) - static_cast<u128>(n) : static_cast<u128>(n);
    if (n >= 0 ? 2 * mag >= *m : 2 * mag > *m) throw OutOfRange("value outside the symmetric range");
  }
  std::vector<std::uint32_t> r(ms.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto m = static_cast<std::int64_t>(ms.modulus(i));
    std::int64_t v = n % m;
    if (v < 0) v += m;
    r[i] = static_cast<std::uint32_t>(v);
  }
  return ResidueVector(ResidueVector::Unchecked{}, std::move(r), ms);
}

ResidueVector encode_signed(const BigInt& n, const ModulusSet& ms) {
  const BigInt twice = 2 * n;
  if (twice >= ms.composite() || twice < -ms.composite())
    throw OutOfRange("value outside the symmetric range");
  if (n >= std::numeric_limits<std::int64_t>::min() && n <= std::numeric_limits<std::int64_t>::max())
    return encode_signed(n.convert_to<std::int64_t>(), ms);
  std::vector<std::uint32_t> r(ms.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    BigInt v = n % ms.modulus(i);
    if (v < 0) v += ms.modulus(i);
    r[i] = v.convert_to<std::uint32_t>();
  }
  return ResidueVector(ResidueVector::Unchecked{}, std::move(r), ms);
}

BigInt crt_reconstruct(const ResidueVector& rv, const ModulusSet& ms) {
  require_same(rv, ms);
  const auto weights = ms.crt_weights();
  if (auto composite = ms.composite_u128()) {
    // (r_i * y_i mod m_i) * M_i < M, so the sum stays below k * M < 2^127.
    u128 acc = 0;
    for (std::size_t i = 0; i < rv.size(); ++i) {
      const std::uint64_t t = static_cast<std::uint64_t>(rv[i]) * weights[i].inverse % ms.modulus(i);
      acc += t * ms.partial_u128(i);
    }
    return from_u128(acc % *composite);
  }
  BigInt acc = 0;
  for (std::size_t i = 0; i < rv.size(); ++i)
    acc += BigInt(rv[i]) * weights[i].partial * weights[i].inverse;
  return acc % ms.composite();
}

ResidueVector mod_mul(const ResidueVector& a, const ResidueVector& b, const ModulusSet& ms) {
  require_same(a, ms);
  require_same(b, ms);
  std::vector<std::uint32_t> r(ms.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = static_cast<std::uint32_t>(a[i] * b[i] % ms.modulus(i));
  return ResidueVector(ResidueVector::Unchecked{}, std::move(r), ms);
}

ResidueVector mod_add(const ResidueVector& a, const ResidueVector& b, const ModulusSet& ms) {
  require_same(a, ms);
  require_same(b, ms);
  std::vector<std::uint32_t> r(ms.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const std::uint32_t s = a[i] + b[i];
    r[i] = s >= ms.modulus(i) ? s - ms.modulus(i) : s;
  }
  return ResidueVector(ResidueVector::Unchecked{}, std::move(r), ms);
}

ResidueVector mod_sub(const ResidueVector& a, const ResidueVector& b, const ModulusSet& ms) {
  require_same(a, ms);
  require_same(b, ms);
  std::vector<std::uint32_t> r(ms.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = a[i] >= b[i] ? a[i] - b[i] : a[i] + ms.modulus(i) - b[i];
  return ResidueVector(ResidueVector::Unchecked{}, std::move(r), ms);
}

}  // namespace hrfna
