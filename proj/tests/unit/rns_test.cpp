#include "hrfna/error.hpp"
#include "hrfna/rns.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

using namespace hrfna;

namespace {

ModulusSet small() { return ModulusSet({3, 5, 7}); }

ResidueVector rv(std::vector<std::uint32_t> r, const ModulusSet& ms) {
  return ResidueVector(std::move(r), ms);
}

std::vector<std::uint32_t> res(const ResidueVector& v) {
  return {v.residues().begin(), v.residues().end()};
}

}  // namespace

TEST(ModulusSet, DefaultCompositeMatchesOracleProduct) {
  const ModulusSet ms = ModulusSet::default_set();
  EXPECT_EQ(ms.composite(), BigInt(68568575985ull));
  EXPECT_EQ(oracle::to_mpz(ms.composite()), oracle::product({4093, 4095, 4091}));
  ASSERT_TRUE(ms.composite_u64());
  EXPECT_EQ(*ms.composite_u64(), 68568575985ull);
}

TEST(ModulusSet, SmallSetWeights) {
  const ModulusSet ms = small();
  EXPECT_EQ(ms.composite(), 105);
  const auto w = ms.crt_weights();
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[0].partial, 35);
  EXPECT_EQ(w[0].inverse, 2u);
  EXPECT_EQ(w[1].partial, 21);
  EXPECT_EQ(w[1].inverse, 1u);
  EXPECT_EQ(w[2].partial, 15);
  EXPECT_EQ(w[2].inverse, 1u);
}

TEST(ModulusSet, WeightsInvertPartials) {
  for (const auto& moduli : std::vector<std::vector<std::uint32_t>>{
           {4093, 4095, 4091}, {3, 5, 7}, {65521, 65519, 65497, 65479, 65449, 65447, 65437}}) {
    const ModulusSet ms(moduli);
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const auto& w = ms.crt_weights()[i];
      EXPECT_EQ(w.partial * ms.modulus(i), ms.composite());
      EXPECT_EQ((w.partial * w.inverse) % ms.modulus(i), 1);
    }
  }
}

TEST(ModulusSet, RejectsSharedFactor) {
  try {
    ModulusSet({4, 6});
    FAIL() << "expected NotCoprime";
  } catch (const NotCoprime& e) {
    EXPECT_EQ(e.first(), 0u);
    EXPECT_EQ(e.second(), 1u);
    EXPECT_EQ(e.kind(), "NotCoprime");
  }
  try {
    ModulusSet({7, 9, 11, 15});
    FAIL() << "expected NotCoprime";
  } catch (const NotCoprime& e) {
    EXPECT_EQ(e.first(), 1u);
    EXPECT_EQ(e.second(), 3u);
  }
}

TEST(ModulusSet, RejectsSmallAndWideModuli) {
  EXPECT_THROW(ModulusSet({}), ModulusTooSmall);
  EXPECT_THROW(ModulusSet({1, 3}), ModulusTooSmall);
  EXPECT_THROW(ModulusSet({0}), ModulusTooSmall);
  EXPECT_THROW(ModulusSet({65536, 3}), OutOfRange);
  EXPECT_NO_THROW(ModulusSet({65535, 2}));
}

TEST(ModulusSet, IdentityIsModuliList) {
  EXPECT_TRUE(ModulusSet({3, 5, 7}) == ModulusSet({3, 5, 7}));
  EXPECT_FALSE(ModulusSet({3, 5, 7}) == ModulusSet({5, 3, 7}));
}

TEST(ModInverse, MatchesBruteForce) {
  for (std::uint32_t m : {2u, 3u, 7u, 10u, 97u, 4095u}) {
    for (std::uint64_t a = 1; a < 3 * m; ++a) {
      if (std::gcd(a, std::uint64_t{m}) != 1) continue;
      const std::uint32_t inv = mod_inverse(a, m);
      EXPECT_LT(inv, m);
      EXPECT_EQ(a % m * inv % m, 1u % m) << a << " mod " << m;
    }
  }
}

TEST(Encode, SmallSetExamples) {
  const ModulusSet ms = small();
  EXPECT_EQ(res(encode_residues(std::uint64_t{0}, ms)), (std::vector<std::uint32_t>{0, 0, 0}));
  EXPECT_EQ(res(encode_residues(std::uint64_t{23}, ms)), (std::vector<std::uint32_t>{2, 3, 2}));
  EXPECT_THROW(encode_residues(std::uint64_t{105}, ms), OutOfRange);
  EXPECT_THROW(encode_residues(BigInt(-1), ms), OutOfRange);
}

TEST(Encode, SignedSymmetricRange) {
  const ModulusSet ms = small();
  EXPECT_EQ(res(encode_signed(std::int64_t{-1}, ms)), (std::vector<std::uint32_t>{2, 4, 6}));
  EXPECT_NO_THROW(encode_signed(std::int64_t{52}, ms));
  EXPECT_NO_THROW(encode_signed(std::int64_t{-52}, ms));
  EXPECT_THROW(encode_signed(std::int64_t{53}, ms), OutOfRange);
  EXPECT_THROW(encode_signed(std::int64_t{-53}, ms), OutOfRange);
}

TEST(ResidueVector, ChecksChannels) {
  const ModulusSet ms = small();
  EXPECT_THROW(rv({3, 0, 0}, ms), OutOfRange);
  EXPECT_THROW(rv({0, 0}, ms), OutOfRange);
  EXPECT_TRUE(rv({0, 0, 0}, ms).is_zero());
}

TEST(Reconstruct, SmallSetExamples) {
  const ModulusSet ms = small();
  EXPECT_EQ(crt_reconstruct(rv({0, 0, 0}, ms), ms), 0);
  EXPECT_EQ(crt_reconstruct(rv({2, 3, 2}, ms), ms), 23);
  EXPECT_EQ(crt_reconstruct(rv({1, 1, 1}, ms), ms), 1);
}

TEST(Reconstruct, BijectiveOnSmallSet) {
  const ModulusSet ms = small();
  std::set<std::vector<std::uint32_t>> seen;
  for (std::uint64_t n = 0; n < 105; ++n) {
    const ResidueVector v = encode_residues(n, ms);
    EXPECT_TRUE(seen.insert(res(v)).second);
    EXPECT_EQ(crt_reconstruct(v, ms), n);
    EXPECT_EQ(oracle::garner(res(v), {3, 5, 7}), n);
  }
}

TEST(Reconstruct, MismatchedSetThrows) {
  const ModulusSet a = small();
  const ModulusSet b({3, 5, 11});
  EXPECT_THROW(crt_reconstruct(encode_residues(std::uint64_t{4}, a), b), MismatchedSet);
  EXPECT_THROW(mod_mul(encode_residues(std::uint64_t{4}, a), encode_residues(std::uint64_t{4}, b), a),
               MismatchedSet);
}

TEST(Reconstruct, WideSetUsesArbitraryPrecisionPath) {
  // M is about 2^144, beyond the 128-bit accumulator.
  const std::vector<std::uint32_t> moduli{65521, 65519, 65497, 65479, 65449, 65447, 65437, 65423, 65419};
  const ModulusSet ms(moduli);
  EXPECT_FALSE(ms.composite_u128());
  std::mt19937_64 g(11);
  for (int i = 0; i < 2000; ++i) {
    BigInt n = 0;
    for (int w = 0; w < 3; ++w) n = (n << 64) + g();
    n %= ms.composite();
    const ResidueVector v = encode_residues(n, ms);
    EXPECT_EQ(crt_reconstruct(v, ms), n);
    EXPECT_EQ(oracle::to_mpz(crt_reconstruct(v, ms)), oracle::garner(res(v), moduli));
  }
}

TEST(Reconstruct, ChannelOrderDoesNotMatter) {
  const std::vector<std::uint32_t> moduli{4093, 4095, 4091};
  std::vector<std::size_t> perm{0, 1, 2};
  std::mt19937_64 g(5);
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t n = g() % 68568575985ull;
    const BigInt expect = n;
    do {
      std::vector<std::uint32_t> pm;
      for (auto p : perm) pm.push_back(moduli[p]);
      const ModulusSet ms(pm);
      EXPECT_EQ(crt_reconstruct(encode_residues(n, ms), ms), expect);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST(ModOps, SmallSetExamples) {
  const ModulusSet ms = small();
  EXPECT_EQ(res(mod_mul(rv({2, 3, 2}, ms), rv({1, 1, 1}, ms), ms)), (std::vector<std::uint32_t>{2, 3, 2}));
  EXPECT_EQ(res(mod_mul(rv({0, 1, 6}, ms), rv({1, 4, 4}, ms), ms)), (std::vector<std::uint32_t>{0, 4, 3}));
  EXPECT_EQ(crt_reconstruct(rv({0, 4, 3}, ms), ms), 24);
  EXPECT_EQ(res(mod_mul(rv({2, 4, 6}, ms), rv({2, 4, 6}, ms), ms)), (std::vector<std::uint32_t>{1, 1, 1}));
  EXPECT_EQ(res(mod_add(rv({1, 1, 1}, ms), rv({0, 0, 0}, ms), ms)), (std::vector<std::uint32_t>{1, 1, 1}));
  EXPECT_EQ(res(mod_add(rv({2, 3, 2}, ms), rv({2, 3, 2}, ms), ms)), (std::vector<std::uint32_t>{1, 1, 4}));
  EXPECT_EQ(res(mod_sub(rv({0, 0, 0}, ms), rv({1, 1, 1}, ms), ms)), (std::vector<std::uint32_t>{2, 4, 6}));
}

TEST(ModOps, HomomorphicOnDefaultSet) {
  const ModulusSet ms = ModulusSet::default_set();
  const mpz_class big_m = oracle::product({4093, 4095, 4091});
  std::mt19937_64 g(3);
  for (int i = 0; i < 20000; ++i) {
    const std::uint64_t a = g() % 68568575985ull, b = g() % 68568575985ull;
    const ResidueVector ra = encode_residues(a, ms), rb = encode_residues(b, ms);
    const mpz_class ma = static_cast<unsigned long>(a), mb = static_cast<unsigned long>(b);
    mpz_class sub = (ma - mb) % big_m;
    if (sub < 0) sub += big_m;
    EXPECT_EQ(oracle::to_mpz(crt_reconstruct(mod_mul(ra, rb, ms), ms)), mpz_class(ma * mb % big_m));
    EXPECT_EQ(oracle::to_mpz(crt_reconstruct(mod_add(ra, rb, ms), ms)), mpz_class((ma + mb) % big_m));
    EXPECT_EQ(oracle::to_mpz(crt_reconstruct(mod_sub(ra, rb, ms), ms)), sub);
  }
}
