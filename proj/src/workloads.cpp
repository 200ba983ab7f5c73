#include "hrfna/workloads.hpp"

#include "hrfna/error.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace hrfna {

std::string to_string(MacMode m) {
  switch (m) {
    case MacMode::random: return "random";
    case MacMode::unit_multipliers: return "unit_multipliers";
    case MacMode::powers_of_two: return "powers_of_two";
  }
  return "?";
}

namespace {

// m * 2^e, exact.
struct Dyadic {
  mpz_class m;
  std::int64_t e = 0;
};

Dyadic dyadic_of(const HybridNum& h) {
  return {mpz_class(to_hex(signed_value(h.mantissa(), h.set())), 16), h.exponent()};
}

Dyadic mul(const Dyadic& a, const Dyadic& b) { return {a.m * b.m, a.e + b.e}; }

Dyadic add(const Dyadic& a, const Dyadic& b) {
  if (a.e < b.e) return add(b, a);
  mpz_class scaled;
  mpz_mul_2exp(scaled.get_mpz_t(), a.m.get_mpz_t(), static_cast<mp_bitcnt_t>(a.e - b.e));
  return {scaled + b.m, b.e};
}

Dyadic sub(const Dyadic& a, const Dyadic& b) { return add(a, {-b.m, b.e}); }

// |num / den| via mantissa/exponent splits; finite far outside double range.
double ratio(const Dyadic& num, const Dyadic& den) {
  if (num.m == 0) return 0.0;
  if (den.m == 0) return std::numeric_limits<double>::infinity();
  long en = 0, ed = 0;
  const double dn = std::abs(mpz_get_d_2exp(&en, num.m.get_mpz_t()));
  const double dd = std::abs(mpz_get_d_2exp(&ed, den.m.get_mpz_t()));
  const double shift = static_cast<double>(en + num.e) - static_cast<double>(ed + den.e);
  return dn / dd * std::exp2(shift);
}

// [0, 1) from the top 53 bits of a 64-bit draw.
double unit_real(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), index};
  return std::mt19937_64(seq);
}

double per_event_bound(const ModulusSet& ms, const HybridConfig& cfg) {
  const double tau = to_double(threshold_int(cfg, ms));
  return std::ldexp(1.0, cfg.scale_shift_k - 1) / tau;
}

DriftReport report_header(std::string workload, std::uint64_t seed, std::uint64_t steps,
                          const ModulusSet& ms, const HybridConfig& cfg) {
  DriftReport r;
  r.workload = std::move(workload);
  r.seed = seed;
  r.steps = steps;
  r.moduli.assign(ms.moduli().begin(), ms.moduli().end());
  r.config = cfg;
  return r;
}

}  // namespace

DriftReport chained_mac(std::uint64_t seed, std::uint64_t n_steps, const ModulusSet& ms,
                        const HybridConfig& cfg, MacMode mode) {
  validate(cfg, ms);
  DriftReport r = report_header("chained_mac", seed, n_steps, ms, cfg);
  r.mode = mode;

  std::mt19937_64 mul_stream = stream(seed, 0);
  std::mt19937_64 add_stream = stream(seed, 1);
  HybridNum acc = from_real(1.0, ms, cfg);
  Dyadic exact = dyadic_of(acc);
  const HybridNum zero = from_real(0.0, ms, cfg);

  for (std::uint64_t i = 0; i < n_steps; ++i) {
    double m = 1.0;
    double a = 0.0;
    switch (mode) {
      case MacMode::random:
        m = 0.5 + 1.5 * unit_real(mul_stream);
        a = -1.0 + 2.0 * unit_real(add_stream);
        break;
      case MacMode::unit_multipliers:
        break;
      case MacMode::powers_of_two:
        m = (mul_stream() & 1) ? 1.0 : 0.5;
        break;
    }
    const HybridNum hm = from_real(m, ms, cfg);
    const HybridNum ha = a == 0.0 ? zero : from_real(a, ms, cfg);

    OpOutcome p = hrfna_mul_traced(acc, hm, ms, cfg);
    OpOutcome s = hrfna_add_traced(p.value, ha, ms, cfg);
    r.norm_events += p.events.size() + s.events.size();
    if (s.path == AddPath::lossy_align) ++r.lossy_aligns;
    acc = std::move(s.value);
    exact = add(mul(exact, dyadic_of(hm)), dyadic_of(ha));
  }

  r.rel_error = ratio(sub(dyadic_of(acc), exact), exact);
  r.bound = static_cast<double>(r.norm_events + r.lossy_aligns) * per_event_bound(ms, cfg);
  r.within_bound = r.rel_error <= r.bound;
  r.result_mantissa = to_hex(signed_value(acc.mantissa(), ms));
  r.result_exponent = acc.exponent();
  return r;
}

std::vector<DriftReport> chained_mac_sweep(std::span<const std::uint64_t> seeds,
                                           std::uint64_t n_steps, const ModulusSet& ms,
                                           const HybridConfig& cfg, Execution exec,
                                           MacMode mode) {
  std::vector<std::optional<DriftReport>> slots(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  const auto n = static_cast<std::int64_t>(seeds.size());
  const bool par = exec == Execution::parallel;
#pragma omp parallel for schedule(dynamic, 1) if (par)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      slots[i] = chained_mac(seeds[i], n_steps, ms, cfg, mode);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<DriftReport> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

DotReport dot_product(std::span<const double> xs, std::span<const double> ys,
                      const ModulusSet& ms, const HybridConfig& cfg) {
  if (xs.size() != ys.size()) throw LengthMismatch("dot_product operands differ in length");
  if (xs.empty()) throw LengthMismatch("dot_product needs at least one element");
  validate(cfg, ms);

  std::optional<HybridNum> acc;
  Dyadic exact;
  Dyadic magnitude;
  std::uint64_t norms = 0, lossy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const HybridNum hx = from_real(xs[i], ms, cfg);
    const HybridNum hy = from_real(ys[i], ms, cfg);
    OpOutcome p = hrfna_mul_traced(hx, hy, ms, cfg);
    norms += p.events.size();
    const Dyadic term = mul(dyadic_of(hx), dyadic_of(hy));
    exact = add(exact, term);
    magnitude = add(magnitude, {abs(term.m), term.e});
    if (!acc) {
      acc = std::move(p.value);
      continue;
    }
    OpOutcome s = hrfna_add_traced(*acc, p.value, ms, cfg);
    norms += s.events.size();
    if (s.path == AddPath::lossy_align) ++lossy;
    acc = std::move(s.value);
  }
  const double rel = ratio(sub(dyadic_of(*acc), exact), magnitude);
  const double bound = std::ldexp(static_cast<double>(xs.size()), -(cfg.operand_bound_bits - 3));
  return DotReport{std::move(*acc), rel, bound, norms, lossy};
}

std::pair<std::vector<double>, std::vector<double>> random_vectors(std::uint64_t seed,
                                                                   std::size_t length) {
  std::mt19937_64 gx = stream(seed, 2);
  std::mt19937_64 gy = stream(seed, 3);
  std::vector<double> xs(length), ys(length);
  for (auto& x : xs) x = -1.0 + 2.0 * unit_real(gx);
  for (auto& y : ys) y = -1.0 + 2.0 * unit_real(gy);
  return {std::move(xs), std::move(ys)};
}

DriftReport dot_product_report(std::uint64_t seed, std::size_t length, const ModulusSet& ms,
                               const HybridConfig& cfg) {
  const auto [xs, ys] = random_vectors(seed, length);
  const DotReport d = dot_product(xs, ys, ms, cfg);
  DriftReport r = report_header("dot_product", seed, length, ms, cfg);
  r.norm_events = d.norm_events;
  r.lossy_aligns = d.lossy_aligns;
  r.rel_error = d.rel_error;
  r.bound = d.bound;
  r.within_bound = d.rel_error <= d.bound;
  r.result_mantissa = to_hex(signed_value(d.value.mantissa(), ms));
  r.result_exponent = d.value.exponent();
  return r;
}

}  // namespace hrfna
