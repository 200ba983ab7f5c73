#pragma once

#include "hrfna/hybrid.hpp"

#include <vector>

namespace hrfna {

enum class DetectMode {
  fast,   // estimator only: mag_log2 >= log2(tau_int) - 1
  exact,  // |signed_value| >= tau_int
};

bool needs_normalization(const HybridNum& h, const ModulusSet& ms, const HybridConfig& cfg,
                         DetectMode mode = DetectMode::fast);

/// One pass: N' = round_half_even(N / 2^k), f' = f + k. Scales even below
/// threshold. Throws DegenerateResult when a nonzero N rounds to zero.
HybridNum normalize(const HybridNum& h, const ModulusSet& ms, const HybridConfig& cfg,
                    NormEvent* event = nullptr);

/// Applies normalize() while the exact magnitude is at or above tau_int,
/// appending one event per pass. The estimator gates each reconstruction;
/// in audit mode every check reconstructs and an estimator miss throws
/// InternalError.
HybridNum settle(HybridNum h, const ModulusSet& ms, const HybridConfig& cfg,
                 std::vector<NormEvent>& events);

}  // namespace hrfna
