#include <atomic>
#include <cstdlib>
#include <string_view>

#include "revaudit/kernels.hpp"

namespace revaudit::kernels {

#if defined(REVAUDIT_HAVE_AVX2_TU)
const KernelTable& avx2_table_unchecked() noexcept;
#endif

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

const KernelTable* avx2_table() noexcept {
#if defined(REVAUDIT_HAVE_AVX2_TU)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* initial_table() noexcept {
  const char* env = std::getenv("REVAUDIT_SIMD");
  if (env != nullptr && std::string_view(env) == "scalar") return &scalar_table();
  if (const KernelTable* t = avx2_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

Isa select(Isa isa) noexcept {
  const KernelTable* t = &scalar_table();
  if (isa == Isa::avx2 && avx2_table() != nullptr) t = avx2_table();
  current().store(t, std::memory_order_release);
  return t->isa;
}

}  // namespace revaudit::kernels
