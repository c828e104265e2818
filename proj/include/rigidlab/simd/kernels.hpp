#pragma once

// Inner loops of the fast correlation path. Every kernel has a scalar
// reference in simd::scalar and a vector variant selected at runtime; the
// two must agree exactly (integer kernels) or to rounding (dot).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

namespace rigidlab::simd {

inline constexpr std::uint32_t kMaxKernelModulus = 64;

enum class Isa { Scalar, Avx2 };

std::string to_string(Isa isa);

/// Best ISA supported by this CPU.
Isa detected_isa();
/// ISA used by dispatch: the override if set, else RIGIDLAB_SIMD=scalar|avx2
/// from the environment, else detected_isa().
Isa active_isa();
/// Pins dispatch to one ISA (nullopt clears). Requesting AVX2 on a CPU
/// without it throws std::runtime_error.
void set_isa_override(std::optional<Isa> isa);

/// One class-major slice of an orbit table. For j < n the orbit segment of
/// length `lag` starting at slot j has fiber shift
///   (prefix_hi[j] - prefix_lo[j] + add) mod modulus
/// unless gap[j] < lag, in which case it crosses an undetermined point.
struct ShiftKernelArgs {
  const std::uint8_t* prefix_hi = nullptr;
  const std::uint8_t* prefix_lo = nullptr;
  const std::uint32_t* gap = nullptr;
  std::size_t n = 0;
  std::uint32_t lag = 0;
  std::uint8_t add = 0;
  std::uint32_t modulus = 2;
};

/// Adds the shift histogram of the slice to counts[0..modulus) and the number
/// of undetermined slots to *undetermined. Requires 2 <= modulus <= 64 and
/// prefix values, add < modulus.
void shift_histogram(const ShiftKernelArgs& args, std::uint64_t* counts, std::uint64_t* undetermined);

double dot(const double* a, const double* b, std::size_t n);

namespace scalar {
void shift_histogram(const ShiftKernelArgs& args, std::uint64_t* counts, std::uint64_t* undetermined);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace scalar

namespace avx2 {
bool available();
void shift_histogram(const ShiftKernelArgs& args, std::uint64_t* counts, std::uint64_t* undetermined);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace avx2

}  // namespace rigidlab::simd
