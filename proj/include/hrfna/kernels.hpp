#pragma once

// Batched residue kernels over structure-of-arrays storage.
//
// Every kernel exists twice with identical signatures: `serial::` is the
// reference implementation, `parallel::` splits the element loop across
// OpenMP threads. Results are identical element for element. Batches require
// a modulus set with M < 2^64.

#include "hrfna/hybrid.hpp"
#include "hrfna/rns.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace hrfna::kernels {

/// Channel-major residues: channel(i)[j] is element j under modulus m_i.
class ResidueBatch {
 public:
  ResidueBatch(const ModulusSet& ms, std::size_t count);

  std::size_t count() const noexcept { return count_; }
  std::size_t channels() const noexcept { return channels_.size(); }
  std::span<std::uint32_t> channel(std::size_t i) { return channels_[i]; }
  std::span<const std::uint32_t> channel(std::size_t i) const { return channels_[i]; }
  const ModulusSet& set() const noexcept { return set_; }

  ResidueVector element(std::size_t j) const;

  friend bool operator==(const ResidueBatch& a, const ResidueBatch& b) {
    return a.set_ == b.set_ && a.channels_ == b.channels_;
  }

 private:
  ModulusSet set_;
  std::size_t count_;
  std::vector<std::vector<std::uint32_t>> channels_;
};

#define HRFNA_KERNEL_DECLS                                                                   \
  ResidueBatch encode(std::span<const std::uint64_t> values, const ModulusSet& ms);           \
  std::vector<std::uint64_t> reconstruct(const ResidueBatch& batch);                          \
  ResidueBatch mod_mul(const ResidueBatch& a, const ResidueBatch& b);                         \
  ResidueBatch mod_add(const ResidueBatch& a, const ResidueBatch& b);                         \
  ResidueBatch mod_sub(const ResidueBatch& a, const ResidueBatch& b);                         \
  std::vector<HybridNum> hybrid_mul(std::span<const HybridNum> x, std::span<const HybridNum> y, \
                                    const ModulusSet& ms, const HybridConfig& cfg);

namespace serial {
HRFNA_KERNEL_DECLS
}  // namespace serial

namespace parallel {
HRFNA_KERNEL_DECLS
/// Threads OpenMP would use for the kernels; 1 when built without OpenMP.
int max_threads();
}  // namespace parallel

#undef HRFNA_KERNEL_DECLS

}  // namespace hrfna::kernels
