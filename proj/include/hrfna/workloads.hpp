#pragma once

// Long-chain numerical experiments measured against an exact dyadic oracle.

#include "hrfna/hybrid.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hrfna {

enum class MacMode : std::uint8_t {
  random,            // multipliers in [0.5, 2), addends in [-1, 1)
  unit_multipliers,  // every multiplier 1.0, addends 0
  powers_of_two,     // multipliers drawn from {0.5, 1.0}, addends 0
};

std::string to_string(MacMode m);

struct DriftReport {
  std::string workload;
  MacMode mode = MacMode::random;
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  std::string prng = "mt19937_64";
  std::vector<std::uint32_t> moduli;
  HybridConfig config;
  std::uint64_t norm_events = 0;
  /// Additions that took the lossy alignment path; each rounds once.
  std::uint64_t lossy_aligns = 0;
  double rel_error = 0.0;
  double bound = 0.0;
  bool within_bound = true;
  /// Final value as signed mantissa (hex) and exponent; may exceed double range.
  std::string result_mantissa = "0";
  std::int64_t result_exponent = 0;
};

/// acc <- acc * m + a for n_steps steps starting from acc = 1.0. Inputs are
/// drawn uniformly, then rounded onto the hybrid grid so the oracle sees the
/// same operands. bound = (norm_events + lossy_aligns) * 2^(k-1) / tau_int.
DriftReport chained_mac(std::uint64_t seed, std::uint64_t n_steps, const ModulusSet& ms,
                        const HybridConfig& cfg, MacMode mode = MacMode::random);

enum class Execution : std::uint8_t { serial, parallel };

/// One chained_mac per seed; reports come back in seed order either way.
std::vector<DriftReport> chained_mac_sweep(std::span<const std::uint64_t> seeds,
                                           std::uint64_t n_steps, const ModulusSet& ms,
                                           const HybridConfig& cfg, Execution exec,
                                           MacMode mode = MacMode::random);

struct DotReport {
  HybridNum value;
  /// |hybrid - exact| / sum |x_i * y_i| over the grid-rounded inputs.
  double rel_error;
  /// 2^-(b-3) * length.
  double bound;
  std::uint64_t norm_events;
  std::uint64_t lossy_aligns;
};

/// Sum of x_i * y_i: products with hrfna_mul, folded left with hrfna_add.
/// Throws LengthMismatch on unequal or empty inputs.
DotReport dot_product(std::span<const double> xs, std::span<const double> ys,
                      const ModulusSet& ms, const HybridConfig& cfg);

/// Two vectors with entries uniform in [-1, 1), from independent streams of
/// the seed.
std::pair<std::vector<double>, std::vector<double>> random_vectors(std::uint64_t seed,
                                                                   std::size_t length);

DriftReport dot_product_report(std::uint64_t seed, std::size_t length, const ModulusSet& ms,
                               const HybridConfig& cfg);

}  // namespace hrfna
