#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "simd/kernels_internal.hpp"

namespace palis::simd {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "?";
}

bool is_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(__i386__)
      return avx2_kernels() != nullptr && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const Kernels& kernels_for(Isa isa) {
  if (!is_available(isa)) {
    throw std::invalid_argument("instruction set not available: " + std::string(to_string(isa)));
  }
  return isa == Isa::Avx2 ? *avx2_kernels() : scalar_kernels();
}

namespace {

Isa default_isa() {
  if (const char* env = std::getenv("PALIS_SIMD")) {
    const std::string value(env);
    if (value == "scalar") return Isa::Scalar;
    if (value == "avx2" && is_available(Isa::Avx2)) return Isa::Avx2;
  }
  return is_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<const Kernels*>& active_slot() {
  static std::atomic<const Kernels*> slot{&kernels_for(default_isa())};
  return slot;
}

}  // namespace

const Kernels& active() { return *active_slot().load(std::memory_order_acquire); }

void set_active(Isa isa) { active_slot().store(&kernels_for(isa), std::memory_order_release); }

}  // namespace palis::simd
