#include "hrfna/error.hpp"
#include "hrfna/pipeline.hpp"
#include "hrfna/workloads.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hrfna;

namespace {

const ModulusSet kDefault = ModulusSet::default_set();
const HybridConfig kCfg{};

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), index};
  return std::mt19937_64(seq);
}

double unit_real(std::mt19937_64& g) { return std::ldexp(static_cast<double>(g() >> 11), -53); }

}  // namespace

TEST(ChainedMac, ZeroStepsIsExact) {
  const DriftReport r = chained_mac(1, 0, kDefault, kCfg);
  EXPECT_EQ(r.rel_error, 0.0);
  EXPECT_EQ(r.norm_events, 0u);
  EXPECT_EQ(r.result_mantissa, "8000");
  EXPECT_EQ(r.result_exponent, -15);
}

TEST(ChainedMac, ExactModesHaveNoDrift) {
  for (MacMode mode : {MacMode::unit_multipliers, MacMode::powers_of_two}) {
    const DriftReport r = chained_mac(3, 10000, kDefault, kCfg, mode);
    EXPECT_EQ(r.rel_error, 0.0) << to_string(mode);
    EXPECT_GT(r.norm_events, 0u);
  }
}

TEST(ChainedMac, MatchesRationalOracle) {
  // Replays the same streams through the hybrid ops and an mpq accumulator.
  const std::uint64_t seed = 99;
  const DriftReport r = chained_mac(seed, 300, kDefault, kCfg);
  auto gm = stream(seed, 0), ga = stream(seed, 1);
  HybridNum acc = from_real(1.0, kDefault, kCfg);
  mpq_class exact = 1;
  for (int i = 0; i < 300; ++i) {
    const HybridNum m = from_real(0.5 + 1.5 * unit_real(gm), kDefault, kCfg);
    const HybridNum a = from_real(-1.0 + 2.0 * unit_real(ga), kDefault, kCfg);
    acc = hrfna_add(hrfna_mul(acc, m, kDefault, kCfg), a, kDefault, kCfg);
    exact = exact * oracle::value(m) + oracle::value(a);
  }
  EXPECT_EQ(r.result_mantissa, to_hex(signed_value(acc.mantissa(), kDefault)));
  EXPECT_EQ(r.result_exponent, acc.exponent());
  const mpq_class rel = abs(oracle::value(acc) - exact) / abs(exact);
  EXPECT_NEAR(r.rel_error, rel.get_d(), 1e-12 + 1e-9 * rel.get_d());
  EXPECT_LE(r.rel_error, r.bound);
}

TEST(ChainedMac, TenThousandStepsWithinBound) {
  for (std::uint64_t seed : {1u, 2u, 7u}) {
    const DriftReport r = chained_mac(seed, 10000, kDefault, kCfg);
    EXPECT_TRUE(r.within_bound) << seed << " rel=" << r.rel_error << " bound=" << r.bound;
    EXPECT_DOUBLE_EQ(r.bound, static_cast<double>(r.norm_events + r.lossy_aligns) * 256.0 / 130784.0);
  }
}

TEST(ChainedMac, Deterministic) {
  const DriftReport a = chained_mac(7, 2000, kDefault, kCfg);
  const DriftReport b = chained_mac(7, 2000, kDefault, kCfg);
  EXPECT_EQ(a.result_mantissa, b.result_mantissa);
  EXPECT_EQ(a.result_exponent, b.result_exponent);
  EXPECT_EQ(a.rel_error, b.rel_error);
  const DriftReport c = chained_mac(8, 2000, kDefault, kCfg);
  EXPECT_NE(a.result_mantissa, c.result_mantissa);
}

TEST(ChainedMac, SweepParallelMatchesSerial) {
  const std::vector<std::uint64_t> seeds{5, 1, 9, 12, 40, 3, 77, 8};
  const auto s = chained_mac_sweep(seeds, 500, kDefault, kCfg, Execution::serial);
  const auto p = chained_mac_sweep(seeds, 500, kDefault, kCfg, Execution::parallel);
  ASSERT_EQ(s.size(), seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    EXPECT_EQ(s[i].seed, seeds[i]);
    EXPECT_EQ(p[i].seed, seeds[i]);
    EXPECT_EQ(s[i].result_mantissa, p[i].result_mantissa);
    EXPECT_EQ(s[i].rel_error, p[i].rel_error);
  }
}

TEST(Normalization, FrequencyPerMultiplyIsBounded) {
  // A product of two operands below 2^b needs at most
  // ceil((2b - log2 tau) / k) passes.
  const double tau = 130784.0;
  const auto limit = static_cast<std::size_t>(std::ceil((2 * 17 - std::log2(tau)) / 9));
  EXPECT_EQ(limit, 2u);
  std::mt19937_64 g(4);
  std::size_t worst = 0;
  for (int i = 0; i < 20000; ++i) {
    const std::int64_t nx = static_cast<std::int64_t>(g() % (1u << 17)) - (1 << 16);
    const std::int64_t ny = static_cast<std::int64_t>(g() % (1u << 17)) - (1 << 16);
    const OpOutcome o = hrfna_mul_traced(from_parts(nx, 0, kDefault), from_parts(ny, 0, kDefault),
                                         kDefault, kCfg);
    worst = std::max(worst, o.events.size());
  }
  EXPECT_LE(worst, limit);
  EXPECT_EQ(worst, limit);
}

TEST(DotProduct, SmallExamples) {
  const std::vector<double> one{1.0}, a{1.0, -1.0}, b{1.0, 1.0};
  EXPECT_EQ(to_real(dot_product(one, one, kDefault, kCfg).value), 1.0);
  const DotReport z = dot_product(a, b, kDefault, kCfg);
  EXPECT_EQ(to_real(z.value), 0.0);
  EXPECT_EQ(z.rel_error, 0.0);
  const std::vector<double> c{0.5, 0.25, 2.0}, d{4.0, -8.0, 0.75};
  EXPECT_EQ(to_real(dot_product(c, d, kDefault, kCfg).value), 1.5);
}

TEST(DotProduct, LengthMismatch) {
  const std::vector<double> a{1.0, 2.0}, b{1.0};
  EXPECT_THROW(dot_product(a, b, kDefault, kCfg), LengthMismatch);
  EXPECT_THROW(dot_product(std::vector<double>{}, std::vector<double>{}, kDefault, kCfg), LengthMismatch);
}

TEST(DotProduct, LengthTwoFiftySixWithinBound) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto [xs, ys] = random_vectors(seed, 256);
    const DotReport d = dot_product(xs, ys, kDefault, kCfg);
    EXPECT_DOUBLE_EQ(d.bound, 256.0 / 16384.0);
    EXPECT_LE(d.rel_error, d.bound) << seed;
    // Rigorous per-rounding bound over the sum of |x_i y_i|.
    EXPECT_LE(d.rel_error, static_cast<double>(d.norm_events + d.lossy_aligns) * 256.0 / 130784.0);
    // Independent check of the reported error.
    mpq_class exact = 0, mag = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const mpq_class t = oracle::value(from_real(xs[i], kDefault, kCfg)) *
                          oracle::value(from_real(ys[i], kDefault, kCfg));
      exact += t;
      mag += abs(t);
    }
    const mpq_class rel = abs(oracle::value(d.value) - exact) / mag;
    EXPECT_NEAR(d.rel_error, rel.get_d(), 1e-12);
  }
}

TEST(DotProduct, ReportCarriesSameValue) {
  const DriftReport r = dot_product_report(3, 64, kDefault, kCfg);
  const auto [xs, ys] = random_vectors(3, 64);
  const DotReport d = dot_product(xs, ys, kDefault, kCfg);
  EXPECT_EQ(r.result_mantissa, to_hex(signed_value(d.value.mantissa(), kDefault)));
  EXPECT_EQ(r.workload, "dot_product");
  EXPECT_EQ(r.steps, 64u);
}

TEST(DotProduct, SameResultThroughPipeline) {
  const auto [xs, ys] = random_vectors(11, 40);
  Program p;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    p.literals.push_back({"x" + std::to_string(i), from_real(xs[i], kDefault, kCfg)});
    p.literals.push_back({"y" + std::to_string(i), from_real(ys[i], kDefault, kCfg)});
  }
  for (std::size_t i = 0; i < xs.size(); ++i)
    p.ops.push_back({OpKind::mul, "x" + std::to_string(i), "y" + std::to_string(i), "p" + std::to_string(i)});
  std::string acc = "p0";
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const std::string out = "s" + std::to_string(i);
    p.ops.push_back({OpKind::add, acc, "p" + std::to_string(i), out});
    acc = out;
  }
  const SimResult r = simulate(p, PipelineConfig{}, kCfg, kDefault);
  EXPECT_EQ(r.results.back(), dot_product(xs, ys, kDefault, kCfg).value);
}
