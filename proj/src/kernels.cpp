#include "hrfna/kernels.hpp"

#include "hrfna/error.hpp"

#include <optional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hrfna::kernels {

ResidueBatch::ResidueBatch(const ModulusSet& ms, std::size_t count)
    : set_(ms), count_(count), channels_(ms.size(), std::vector<std::uint32_t>(count)) {}

ResidueVector ResidueBatch::element(std::size_t j) const {
  std::vector<std::uint32_t> r(channels_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = channels_[i][j];
  return ResidueVector(std::move(r), set_);
}

namespace {

std::uint64_t require_u64_set(const ModulusSet& ms) {
  const auto m = ms.composite_u64();
  if (!m) throw OutOfRange("batched kernels need a composite modulus below 2^64");
  return *m;
}

void require_same_shape(const ResidueBatch& a, const ResidueBatch& b) {
  if (!(a.set() == b.set())) throw MismatchedSet();
  if (a.count() != b.count()) throw LengthMismatch("batch sizes differ");
}

// Loop bodies shared by both variants. `Par` selects the OpenMP pragma; the
// element order of the results never depends on it.
template <bool Par>
ResidueBatch encode_impl(std::span<const std::uint64_t> values, const ModulusSet& ms) {
  const std::uint64_t m = require_u64_set(ms);
  const auto n = static_cast<std::int64_t>(values.size());
  for (std::int64_t j = 0; j < n; ++j)
    if (values[j] >= m) throw OutOfRange("value not below M");
  ResidueBatch out(ms, values.size());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const std::uint32_t mi = ms.modulus(i);
    std::uint32_t* dst = out.channel(i).data();
#pragma omp parallel for schedule(static) if (Par)
    for (std::int64_t j = 0; j < n; ++j) dst[j] = static_cast<std::uint32_t>(values[j] % mi);
  }
  return out;
}

template <bool Par>
std::vector<std::uint64_t> reconstruct_impl(const ResidueBatch& batch) {
  const ModulusSet& ms = batch.set();
  const u128 m = require_u64_set(ms);
  const std::size_t k = ms.size();
  std::vector<u128> partial(k);
  std::vector<std::uint64_t> inverse(k);
  for (std::size_t i = 0; i < k; ++i) {
    partial[i] = ms.partial_u128(i);
    inverse[i] = ms.crt_weights()[i].inverse;
  }
  const auto n = static_cast<std::int64_t>(batch.count());
  std::vector<std::uint64_t> out(batch.count());
#pragma omp parallel for schedule(static) if (Par)
  for (std::int64_t j = 0; j < n; ++j) {
    u128 acc = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const std::uint64_t t = batch.channel(i)[j] * inverse[i] % ms.modulus(i);
      acc = (acc + partial[i] * t) % m;
    }
    out[j] = static_cast<std::uint64_t>(acc);
  }
  return out;
}

enum class Op { mul, add, sub };

template <bool Par, Op op>
ResidueBatch binary_impl(const ResidueBatch& a, const ResidueBatch& b) {
  require_same_shape(a, b);
  ResidueBatch out(a.set(), a.count());
  const auto n = static_cast<std::int64_t>(a.count());
  for (std::size_t i = 0; i < a.channels(); ++i) {
    const std::uint64_t mi = a.set().modulus(i);
    const std::uint32_t* x = a.channel(i).data();
    const std::uint32_t* y = b.channel(i).data();
    std::uint32_t* z = out.channel(i).data();
#pragma omp parallel for schedule(static) if (Par)
    for (std::int64_t j = 0; j < n; ++j) {
      std::uint64_t r;
      if constexpr (op == Op::mul) r = std::uint64_t{x[j]} * y[j] % mi;
      else if constexpr (op == Op::add) r = (std::uint64_t{x[j]} + y[j]) % mi;
      else r = (std::uint64_t{x[j]} + mi - y[j]) % mi;
      z[j] = static_cast<std::uint32_t>(r);
    }
  }
  return out;
}

template <bool Par>
std::vector<HybridNum> hybrid_mul_impl(std::span<const HybridNum> x, std::span<const HybridNum> y,
                                       const ModulusSet& ms, const HybridConfig& cfg) {
  if (x.size() != y.size()) throw LengthMismatch("operand spans differ in length");
  const auto n = static_cast<std::int64_t>(x.size());
  std::vector<std::optional<HybridNum>> slots(x.size());
  // Exceptions must not escape an OpenMP region; keep the first one by index.
  std::vector<std::exception_ptr> errors(x.size());
#pragma omp parallel for schedule(dynamic, 64) if (Par)
  for (std::int64_t j = 0; j < n; ++j) {
    try {
      slots[j] = hrfna_mul(x[j], y[j], ms, cfg);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<HybridNum> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace

#define HRFNA_KERNEL_DEFS(PAR)                                                                  \
  ResidueBatch encode(std::span<const std::uint64_t> values, const ModulusSet& ms) {            \
    return encode_impl<PAR>(values, ms);                                                        \
  }                                                                                             \
  std::vector<std::uint64_t> reconstruct(const ResidueBatch& batch) {                           \
    return reconstruct_impl<PAR>(batch);                                                        \
  }                                                                                             \
  ResidueBatch mod_mul(const ResidueBatch& a, const ResidueBatch& b) {                          \
    return binary_impl<PAR, Op::mul>(a, b);                                                     \
  }                                                                                             \
  ResidueBatch mod_add(const ResidueBatch& a, const ResidueBatch& b) {                          \
    return binary_impl<PAR, Op::add>(a, b);                                                     \
  }                                                                                             \
  ResidueBatch mod_sub(const ResidueBatch& a, const ResidueBatch& b) {                          \
    return binary_impl<PAR, Op::sub>(a, b);                                                     \
  }                                                                                             \
  std::vector<HybridNum> hybrid_mul(std::span<const HybridNum> x, std::span<const HybridNum> y, \
                                    const ModulusSet& ms, const HybridConfig& cfg) {            \
    return hybrid_mul_impl<PAR>(x, y, ms, cfg);                                                 \
  }

namespace serial {
HRFNA_KERNEL_DEFS(false)
}  // namespace serial

namespace parallel {
HRFNA_KERNEL_DEFS(true)

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}
}  // namespace parallel

}  // namespace hrfna::kernels
