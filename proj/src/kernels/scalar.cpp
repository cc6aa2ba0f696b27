#include "revaudit/kernels.hpp"

namespace revaudit::kernels {
namespace {

double signed_sum_scalar(const double* values, const std::uint64_t* signs, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool flip = (signs[i >> 6] >> (i & 63)) & 1U;
    acc += flip ? -values[i] : values[i];
  }
  return acc;
}

double gather_sum_scalar(const double* values, const std::uint32_t* index, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += values[index[i]];
  return acc;
}

void weighted_gram_scalar(const double* x, const double* w, const double* y, std::size_t n, std::size_t p,
                          double* gram, double* xty) {
  for (std::size_t j = 0; j < p; ++j) {
    const double* xj = x + j * n;
    for (std::size_t k = 0; k <= j; ++k) {
      const double* xk = x + k * n;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += w[i] * xj[i] * xk[i];
      gram[j * p + k] = acc;
      gram[k * p + j] = acc;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * xj[i] * y[i];
    xty[j] = acc;
  }
}

constexpr KernelTable kScalar{Isa::scalar, signed_sum_scalar, gather_sum_scalar, weighted_gram_scalar};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace revaudit::kernels
