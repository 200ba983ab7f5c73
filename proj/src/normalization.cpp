#include "hrfna/normalization.hpp"

#include "hrfna/error.hpp"
#include "hybrid_access.hpp"

#include <cmath>

namespace hrfna {

namespace {

HybridNum normalize_known(const HybridNum& h, const BigInt& n, const ModulusSet& ms,
                          const HybridConfig& cfg, NormEvent* event) {
  const int k = cfg.scale_shift_k;
  if (k < 1) throw InvariantViolation("shift-below-bound", "k must be at least 1");
  BigInt scaled = shift_right_half_even(n, static_cast<unsigned>(k));
  if (scaled == 0 && n != 0)
    throw DegenerateResult("normalization rounded a nonzero mantissa to zero; k too large for tau");
  const std::int64_t exponent = h.exponent() + k;
  if (event) *event = NormEvent{n, scaled, k, h.exponent(), exponent};
  return HybridAccess::make(encode_signed(scaled, ms), exponent, sign_of(scaled),
                            log2_magnitude(scaled));
}

}  // namespace

bool needs_normalization(const HybridNum& h, const ModulusSet& ms, const HybridConfig& cfg,
                         DetectMode mode) {
  const BigInt tau = threshold_int(cfg, ms);
  if (mode == DetectMode::exact) return boost::multiprecision::abs(signed_value(h.mantissa(), ms)) >= tau;
  return h.sign() != 0 && h.mag_log2() >= log2_magnitude(tau) - 1.0;
}

HybridNum normalize(const HybridNum& h, const ModulusSet& ms, const HybridConfig& cfg,
                    NormEvent* event) {
  return normalize_known(h, signed_value(h.mantissa(), ms), ms, cfg, event);
}

HybridNum settle(HybridNum h, const ModulusSet& ms, const HybridConfig& cfg,
                 std::vector<NormEvent>& events) {
  const BigInt tau = threshold_int(cfg, ms);
  if (tau < 1) throw InvariantViolation("threshold-above-shift", "tau_int is zero");
  const double fast_cut = log2_magnitude(tau) - 1.0;
  for (;;) {
    const bool fast = h.sign() != 0 && h.mag_log2() >= fast_cut;
    if (!fast && !cfg.audit) return h;
    const BigInt n = signed_value(h.mantissa(), ms);
    const bool exact = boost::multiprecision::abs(n) >= tau;
    if (cfg.audit) {
      if (exact && !fast) throw InternalError("magnitude estimator missed a threshold crossing");
      if (sign_of(n) != h.sign() || std::abs(h.mag_log2() - log2_magnitude(n)) > 1.0)
        throw InternalError("magnitude estimator outside its error bound");
    }
    if (!exact) return h;
    NormEvent event;
    h = normalize_known(h, n, ms, cfg, &event);
    events.push_back(std::move(event));
  }
}

}  // namespace hrfna
