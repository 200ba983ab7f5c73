#include "hrfna/error.hpp"
#include "hrfna/kernels.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hrfna;
using namespace hrfna::kernels;

namespace {

const ModulusSet kDefault = ModulusSet::default_set();

std::vector<std::uint64_t> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::vector<std::uint64_t> v(n);
  for (auto& x : v) x = g() % 68568575985ull;
  return v;
}

}  // namespace

TEST(Kernels, EncodeMatchesScalarAndRoundTrips) {
  const auto values = random_values(5000, 1);
  const auto batch = serial::encode(values, kDefault);
  for (std::size_t j = 0; j < values.size(); j += 97)
    EXPECT_EQ(batch.element(j), encode_residues(values[j], kDefault));
  EXPECT_EQ(serial::reconstruct(batch), values);
}

TEST(Kernels, ParallelMatchesSerial) {
  const auto a = random_values(20000, 2);
  const auto b = random_values(20000, 3);
  const auto sa = serial::encode(a, kDefault), sb = serial::encode(b, kDefault);
  const auto pa = parallel::encode(a, kDefault), pb = parallel::encode(b, kDefault);
  EXPECT_EQ(sa, pa);
  EXPECT_EQ(serial::mod_mul(sa, sb), parallel::mod_mul(pa, pb));
  EXPECT_EQ(serial::mod_add(sa, sb), parallel::mod_add(pa, pb));
  EXPECT_EQ(serial::mod_sub(sa, sb), parallel::mod_sub(pa, pb));
  EXPECT_EQ(serial::reconstruct(serial::mod_mul(sa, sb)), parallel::reconstruct(parallel::mod_mul(pa, pb)));
}

TEST(Kernels, BatchOpsAreHomomorphic) {
  const auto a = random_values(3000, 4);
  const auto b = random_values(3000, 5);
  const auto prod = serial::reconstruct(serial::mod_mul(serial::encode(a, kDefault), serial::encode(b, kDefault)));
  const auto sum = serial::reconstruct(serial::mod_add(serial::encode(a, kDefault), serial::encode(b, kDefault)));
  const auto diff = serial::reconstruct(serial::mod_sub(serial::encode(a, kDefault), serial::encode(b, kDefault)));
  const unsigned __int128 m = 68568575985ull;
  for (std::size_t j = 0; j < a.size(); ++j) {
    EXPECT_EQ(prod[j], static_cast<std::uint64_t>(static_cast<unsigned __int128>(a[j]) * b[j] % m));
    EXPECT_EQ(sum[j], static_cast<std::uint64_t>((static_cast<unsigned __int128>(a[j]) + b[j]) % m));
    EXPECT_EQ(diff[j], static_cast<std::uint64_t>((static_cast<unsigned __int128>(a[j]) + m - b[j]) % m));
  }
}

TEST(Kernels, HybridMulParallelMatchesSerialAndScalar) {
  std::mt19937_64 g(6);
  std::vector<HybridNum> x, y;
  for (int i = 0; i < 4000; ++i) {
    x.push_back(from_real(std::ldexp(static_cast<double>(g() >> 11), -53) * 4 - 2, kDefault, {}));
    y.push_back(from_real(std::ldexp(static_cast<double>(g() >> 11), -53) * 4 - 2, kDefault, {}));
  }
  const auto s = serial::hybrid_mul(x, y, kDefault, {});
  const auto p = parallel::hybrid_mul(x, y, kDefault, {});
  EXPECT_EQ(s, p);
  for (std::size_t i = 0; i < x.size(); i += 37) EXPECT_EQ(s[i], hrfna_mul(x[i], y[i], kDefault, {}));
}

TEST(Kernels, Errors) {
  const ModulusSet wide({65521, 65519, 65497, 65479, 65449});
  const std::vector<std::uint64_t> v{1, 2, 3};
  EXPECT_THROW(serial::encode(v, wide), OutOfRange);
  EXPECT_THROW(parallel::encode(std::vector<std::uint64_t>{68568575985ull}, kDefault), OutOfRange);
  const auto a = serial::encode(v, kDefault);
  const auto b = serial::encode(std::vector<std::uint64_t>{1, 2}, kDefault);
  EXPECT_THROW(serial::mod_add(a, b), LengthMismatch);
  EXPECT_THROW(parallel::mod_add(a, serial::encode(v, ModulusSet({3, 5, 7}))), MismatchedSet);
  std::vector<HybridNum> one{from_real(1.0, kDefault, {})};
  EXPECT_THROW(parallel::hybrid_mul(one, {}, kDefault, {}), LengthMismatch);
  EXPECT_GE(parallel::max_threads(), 1);
}
