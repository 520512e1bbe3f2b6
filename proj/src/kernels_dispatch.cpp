#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"
#include "sc_obstacle/error.hpp"

namespace sc_obstacle::kernels {

namespace {

constexpr KernelTable kScalar{Backend::Scalar, &detail::rb_sweep_scalar, &detail::ell_apply_scalar,
                              &detail::log_dist2_sum_scalar};

#if defined(SC_OBSTACLE_BUILD_AVX2)
constexpr KernelTable kAvx2{Backend::Avx2, &detail::rb_sweep_avx2, &detail::ell_apply_avx2,
                            &detail::log_dist2_sum_avx2};

bool cpu_has_avx2() noexcept {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable* initial_table() noexcept {
  const KernelTable* best = avx2_table();
  if (const char* env = std::getenv("SC_OBSTACLE_SIMD")) {
    const std::string choice(env);
    if (choice == "scalar") return &kScalar;
  }
  return best != nullptr ? best : &kScalar;
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

const KernelTable* avx2_table() noexcept {
#if defined(SC_OBSTACLE_BUILD_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

void set_backend(Backend backend) {
  if (backend == Backend::Scalar) {
    current().store(&kScalar, std::memory_order_release);
    return;
  }
  const KernelTable* t = avx2_table();
  if (t == nullptr) throw Error(ErrorCode::InvalidInput, "AVX2 kernels unavailable on this CPU/build");
  current().store(t, std::memory_order_release);
}

Backend detected_backend() noexcept {
  return avx2_table() != nullptr ? Backend::Avx2 : Backend::Scalar;
}

std::string_view backend_name(Backend backend) noexcept {
  return backend == Backend::Avx2 ? "avx2" : "scalar";
}

}  // namespace sc_obstacle::kernels
