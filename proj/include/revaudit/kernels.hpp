#pragma once

// Data-parallel inner loops used by the resampling tests and the weighted
// regression. Each kernel has a scalar reference implementation and, on
// x86-64, an AVX2/FMA variant; the variant is chosen once at runtime from
// CPUID and can be forced to scalar with REVAUDIT_SIMD=scalar.
//
// Contract shared by all variants: on integer-valued inputs whose partial
// sums stay below 2^53 the results are bit-identical across variants. On
// general real inputs they agree to rounding (summation order differs).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace revaudit::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;

  // sum_i (bit i of signs set ? -values[i] : values[i]); bit i lives in
  // signs[i / 64] at position i % 64.
  double (*signed_sum)(const double* values, const std::uint64_t* signs, std::size_t n);

  // sum_i values[index[i]].
  double (*gather_sum)(const double* values, const std::uint32_t* index, std::size_t n);

  // Weighted cross products for a column-major design x (n rows, p columns):
  // gram[j*p + k] = sum_i w_i x_ij x_ik (full symmetric matrix) and
  // xty[j] = sum_i w_i x_ij y_i.
  void (*weighted_gram)(const double* x, const double* w, const double* y, std::size_t n, std::size_t p,
                        double* gram, double* xty);
};

const KernelTable& scalar_table() noexcept;
// nullptr when the variant was not compiled in or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table() noexcept;

// The table selected for this process.
const KernelTable& active() noexcept;

// Overrides the selection (tests and benchmarks). Falls back to scalar when
// the requested variant is unavailable; returns the ISA actually in effect.
Isa select(Isa isa) noexcept;

// Convenience wrappers over active().
inline double signed_sum(std::span<const double> values, std::span<const std::uint64_t> signs) {
  return active().signed_sum(values.data(), signs.data(), values.size());
}
inline double gather_sum(std::span<const double> values, std::span<const std::uint32_t> index) {
  return active().gather_sum(values.data(), index.data(), index.size());
}

}  // namespace revaudit::kernels
