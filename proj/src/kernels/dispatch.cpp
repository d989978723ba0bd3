#include <atomic>
#include <cstdlib>
#include <string>

#include "microsim/error.hpp"
#include "microsim/kernels.hpp"

namespace microsim::kernels {

namespace {

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa initial_isa() {
  if (const char* env = std::getenv("MICROSIM_KERNEL")) {
    const std::string want = env;
    for (Isa isa : available_isas()) {
      if (isa_name(isa) == want) return isa;
    }
  }
  return available_isas().back();
}

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "scalar";
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out{Isa::scalar};
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (cpu_supports(isa)) out.push_back(isa);
  }
  return out;
}

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!cpu_supports(isa)) {
    throw Error("kernel variant '" + std::string(isa_name(isa)) + "' is not available");
  }
  selected().store(isa, std::memory_order_relaxed);
}

std::size_t nearest_with(Isa isa, double east, double north, std::span<const double> xs,
                         std::span<const double> ys) noexcept {
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2: return nearest_avx2(east, north, xs, ys);
#endif
#if defined(__aarch64__)
    case Isa::neon: return nearest_neon(east, north, xs, ys);
#endif
    default: return nearest_scalar(east, north, xs, ys);
  }
}

std::size_t nearest(double east, double north, std::span<const double> xs,
                    std::span<const double> ys) noexcept {
  return nearest_with(active_isa(), east, north, xs, ys);
}

}  // namespace microsim::kernels
