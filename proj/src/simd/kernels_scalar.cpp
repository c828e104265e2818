#include "rigidlab/simd/kernels.hpp"

namespace rigidlab::simd::scalar {

void shift_histogram(const ShiftKernelArgs& a, std::uint64_t* counts, std::uint64_t* undetermined) {
  const std::uint32_t m = a.modulus;
  std::uint64_t und = 0;
  for (std::size_t j = 0; j < a.n; ++j) {
    if (a.gap[j] < a.lag) {
      ++und;
      continue;
    }
    std::uint32_t g = (a.prefix_hi[j] + m - a.prefix_lo[j] + a.add) % m;
    ++counts[g];
  }
  *undetermined += und;
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace rigidlab::simd::scalar
