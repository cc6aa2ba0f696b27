// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include <immintrin.h>

#include <array>

#include "revaudit/kernels.hpp"

namespace revaudit::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Sign-bit masks for every 4-bit flip pattern.
struct SignMasks {
  alignas(32) std::array<std::array<std::uint64_t, 4>, 16> lanes{};
  constexpr SignMasks() {
    for (unsigned pattern = 0; pattern < 16; ++pattern)
      for (unsigned lane = 0; lane < 4; ++lane)
        lanes[pattern][lane] = ((pattern >> lane) & 1U) ? 0x8000000000000000ULL : 0ULL;
  }
};
constexpr SignMasks kMasks;

double signed_sum_avx2(const double* values, const std::uint64_t* signs, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const std::uint64_t word = signs[i >> 6] >> (i & 63);
    const auto* m0 = kMasks.lanes[word & 0xF].data();
    const auto* m1 = kMasks.lanes[(word >> 4) & 0xF].data();
    const __m256d v0 = _mm256_loadu_pd(values + i);
    const __m256d v1 = _mm256_loadu_pd(values + i + 4);
    acc0 = _mm256_add_pd(acc0, _mm256_xor_pd(v0, _mm256_castsi256_pd(_mm256_load_si256(reinterpret_cast<const __m256i*>(m0)))));
    acc1 = _mm256_add_pd(acc1, _mm256_xor_pd(v1, _mm256_castsi256_pd(_mm256_load_si256(reinterpret_cast<const __m256i*>(m1)))));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const bool flip = (signs[i >> 6] >> (i & 63)) & 1U;
    acc += flip ? -values[i] : values[i];
  }
  return acc;
}

double gather_sum_avx2(const double* values, const std::uint32_t* index, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(index + i));
    acc = _mm256_add_pd(acc, _mm256_i32gather_pd(values, idx, 8));
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += values[index[i]];
  return total;
}

double weighted_dot3(const double* w, const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
    acc = _mm256_fmadd_pd(wa, _mm256_loadu_pd(b + i), acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += w[i] * a[i] * b[i];
  return total;
}

void weighted_gram_avx2(const double* x, const double* w, const double* y, std::size_t n, std::size_t p,
                        double* gram, double* xty) {
  for (std::size_t j = 0; j < p; ++j) {
    const double* xj = x + j * n;
    for (std::size_t k = 0; k <= j; ++k) {
      const double v = weighted_dot3(w, xj, x + k * n, n);
      gram[j * p + k] = v;
      gram[k * p + j] = v;
    }
    xty[j] = weighted_dot3(w, xj, y, n);
  }
}

constexpr KernelTable kAvx2{Isa::avx2, signed_sum_avx2, gather_sum_avx2, weighted_gram_avx2};

}  // namespace

const KernelTable& avx2_table_unchecked() noexcept { return kAvx2; }

}  // namespace revaudit::kernels
