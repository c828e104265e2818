#include "rigidlab/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define RIGIDLAB_X86 1
#include <immintrin.h>
#endif

#include <bit>

namespace rigidlab::simd::avx2 {

#if RIGIDLAB_X86

bool available() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

__attribute__((target("avx2"))) inline __m256i reduce_once(__m256i g, __m256i vm) {
  // g >= m (unsigned) <=> max(g, m) == g
  __m256i ge = _mm256_cmpeq_epi8(_mm256_max_epu8(g, vm), g);
  return _mm256_sub_epi8(g, _mm256_and_si256(ge, vm));
}

__attribute__((target("avx2"))) inline __m256i gap_below(const std::uint32_t* gap, __m256i biased_lag) {
  const __m256i bias = _mm256_set1_epi32(static_cast<int>(0x80000000u));
  auto lt = [&](const std::uint32_t* p) {
    __m256i v = _mm256_xor_si256(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)), bias);
    return _mm256_cmpgt_epi32(biased_lag, v);
  };
  __m256i m0 = lt(gap);
  __m256i m1 = lt(gap + 8);
  __m256i m2 = lt(gap + 16);
  __m256i m3 = lt(gap + 24);
  __m256i p01 = _mm256_packs_epi32(m0, m1);
  __m256i p23 = _mm256_packs_epi32(m2, m3);
  __m256i bytes = _mm256_packs_epi16(p01, p23);
  return _mm256_permutevar8x32_epi32(bytes, _mm256_setr_epi32(0, 4, 1, 5, 2, 6, 3, 7));
}

}  // namespace

__attribute__((target("avx2,popcnt"))) void shift_histogram(const ShiftKernelArgs& a, std::uint64_t* counts,
                                                             std::uint64_t* undetermined) {
  const std::uint32_t m = a.modulus;
  const __m256i vm = _mm256_set1_epi8(static_cast<char>(m));
  const __m256i vadd = _mm256_set1_epi8(static_cast<char>(a.add));
  const __m256i biased_lag = _mm256_set1_epi32(static_cast<int>(a.lag ^ 0x80000000u));

  std::uint64_t und = 0;
  std::uint64_t valid = 0;
  std::uint64_t local[kMaxKernelModulus] = {};
  std::size_t j = 0;
  for (; j + 32 <= a.n; j += 32) {
    __m256i hi = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a.prefix_hi + j));
    __m256i lo = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a.prefix_lo + j));
    // hi + (m - lo) + add <= 3m - 2 < 256 for m <= 64
    __m256i g = _mm256_add_epi8(_mm256_add_epi8(hi, _mm256_sub_epi8(vm, lo)), vadd);
    g = reduce_once(reduce_once(g, vm), vm);

    __m256i open = gap_below(a.gap + j, biased_lag);
    auto open_bits = static_cast<std::uint32_t>(_mm256_movemask_epi8(open));
    int n_open = std::popcount(open_bits);
    und += static_cast<std::uint64_t>(n_open);
    valid += static_cast<std::uint64_t>(32 - n_open);
    for (std::uint32_t v = 1; v < m; ++v) {
      __m256i eq = _mm256_cmpeq_epi8(g, _mm256_set1_epi8(static_cast<char>(v)));
      auto bits = static_cast<std::uint32_t>(_mm256_movemask_epi8(eq)) & ~open_bits;
      local[v] += static_cast<std::uint64_t>(std::popcount(bits));
    }
  }
  std::uint64_t nonzero = 0;
  for (std::uint32_t v = 1; v < m; ++v) {
    counts[v] += local[v];
    nonzero += local[v];
  }
  counts[0] += valid - nonzero;
  *undetermined += und;

  ShiftKernelArgs rest = a;
  rest.prefix_hi += j;
  rest.prefix_lo += j;
  rest.gap += j;
  rest.n -= j;
  scalar::shift_histogram(rest, counts, undetermined);
}

__attribute__((target("avx2,fma"))) double dot(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
  }
  s0 = _mm256_add_pd(s0, s1);
  __m128d lo = _mm256_castpd256_pd128(s0);
  __m128d hi = _mm256_extractf128_pd(s0, 1);
  lo = _mm_add_pd(lo, hi);
  double s = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

#else

bool available() { return false; }

void shift_histogram(const ShiftKernelArgs& a, std::uint64_t* counts, std::uint64_t* undetermined) {
  scalar::shift_histogram(a, counts, undetermined);
}

double dot(const double* a, const double* b, std::size_t n) { return scalar::dot(a, b, n); }

#endif

}  // namespace rigidlab::simd::avx2
