#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "rigidlab/simd/kernels.hpp"

namespace rigidlab::simd {

namespace {

// -1: no override, otherwise the Isa value.
std::atomic<int> g_override{-1};

Isa from_environment(Isa fallback) {
  const char* env = std::getenv("RIGIDLAB_SIMD");
  if (env == nullptr) return fallback;
  std::string_view v(env);
  if (v == "scalar") return Isa::Scalar;
  if (v == "avx2" && avx2::available()) return Isa::Avx2;
  return fallback;
}

}  // namespace

std::string to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

Isa detected_isa() {
  static const Isa isa = avx2::available() ? Isa::Avx2 : Isa::Scalar;
  return isa;
}

Isa active_isa() {
  int o = g_override.load(std::memory_order_relaxed);
  if (o >= 0) return static_cast<Isa>(o);
  static const Isa env = from_environment(detected_isa());
  return env;
}

void set_isa_override(std::optional<Isa> isa) {
  if (isa && *isa == Isa::Avx2 && !avx2::available())
    throw std::runtime_error("AVX2 requested but not supported by this CPU");
  g_override.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

void shift_histogram(const ShiftKernelArgs& args, std::uint64_t* counts, std::uint64_t* undetermined) {
  if (args.modulus < 2 || args.modulus > kMaxKernelModulus)
    throw std::invalid_argument("shift_histogram: modulus outside [2, 64]");
  if (active_isa() == Isa::Avx2) {
    avx2::shift_histogram(args, counts, undetermined);
  } else {
    scalar::shift_histogram(args, counts, undetermined);
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  return active_isa() == Isa::Avx2 ? avx2::dot(a, b, n) : scalar::dot(a, b, n);
}

}  // namespace rigidlab::simd
