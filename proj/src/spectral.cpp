#include "rigidlab/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "rigidlab/simd/kernels.hpp"

namespace rigidlab {
namespace {

RationalInterval rho_at(const ShiftHistogram& h, const FiberFunction& f, const DigitSystem& base) {
  const std::uint32_t m = h.modulus;
  Rational lo = 0, hi = 0;
  std::vector<Rational> c(m);
  for (std::uint64_t a = 0; a < h.cells; ++a) {
    const std::uint64_t b = h.target(a);
    for (std::uint32_t g = 0; g < m; ++g) {
      c[g] = 0;
      for (std::uint32_t y = 0; y < m; ++y) c[g] += f.at(a, y) * f.at(b, (y + g) % m);
    }
    Rational det = 0;
    for (std::uint32_t g = 0; g < m; ++g)
      if (h.counts[a * m + g] != 0) det += from_u64(h.counts[a * m + g]) * c[g];
    lo += det;
    hi += det;
    if (h.undetermined[a] != 0) {
      const auto [mn, mx] = std::minmax_element(c.begin(), c.end());
      lo += from_u64(h.undetermined[a]) * *mn;
      hi += from_u64(h.undetermined[a]) * *mx;
    }
  }
  const Rational denom = from_u64(base.modulus()) * from_u64(m);
  return RationalInterval(lo / denom, hi / denom);
}

double up(const Rational& r) {
  const double d = r.get_d();
  return std::nextafter(d, std::numeric_limits<double>::infinity());
}

}  // namespace

CorrelationSeries autocorrelation_series(const AdicSystem& sys, const FiberFunction& f, std::size_t K,
                                         bool subtract_mean, unsigned threads) {
  if (f.fiber != sys.fiber()) throw std::invalid_argument("function fiber does not match the system");
  if (f.cells != sys.base().block_size(f.depth)) throw std::invalid_argument("function cells do not match its depth");
  FiberFunction g = f;
  CorrelationSeries out;
  out.centered = subtract_mean;
  out.mean_removed = 0;
  if (subtract_mean) {
    out.mean_removed = mean(f);
    for (auto& v : g.values) v -= out.mean_removed;
  }
  out.rho.resize(K + 1);
  LagEngine engine(sys, g.depth);

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(K + 1)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k <= K; k = next++) out.rho[k] = rho_at(engine.histogram(k), g, sys.base());
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  return out;
}

SpectralEstimate fejer_density(const CorrelationSeries& s, std::size_t order, std::size_t grid_size) {
  if (order < 1 || order > s.rho.size()) throw std::invalid_argument("Fejer order must lie in [1, K + 1]");
  if (grid_size <= order) throw std::invalid_argument("grid must be finer than the Fejer order");
  const std::size_t n = order;
  const double dn = static_cast<double>(n);

  // a[k] = 2 (1 - k/N) mid(rho(k)) for k >= 1
  std::vector<double> a(n, 0.0);
  double abs_sum = std::abs(s.rho[0].midpoint().get_d());
  Rational slack = s.rho[0].width() / 2;
  for (std::size_t k = 1; k < n; ++k) {
    const Rational w = from_u64(n - k) / from_u64(n);
    a[k] = 2.0 * (1.0 - static_cast<double>(k) / dn) * s.rho[k].midpoint().get_d();
    abs_sum += std::abs(a[k]);
    slack += 2 * w * s.rho[k].width() / 2;
  }

  std::vector<double> cos_table(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i)
    cos_table[i] = std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(grid_size));

  SpectralEstimate est;
  est.order = n;
  est.rho0 = s.rho[0].midpoint().get_d();
  est.slack = up(slack);
  // Each term carries a few ulps from the cosine, the weight and the midpoint;
  // the summation adds at most n more.
  est.rounding = 8.0 * (dn + 4.0) * std::numeric_limits<double>::epsilon() * (abs_sum + 1.0);
  est.theta.resize(grid_size);
  est.density.resize(grid_size);
  std::vector<double> c(n);
  double total = 0;
  for (std::size_t j = 0; j < grid_size; ++j) {
    c[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k) c[k] = cos_table[(k * j) % grid_size];
    est.theta[j] = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(grid_size);
    est.density[j] = est.rho0 + simd::dot(a.data(), c.data(), n);
    total += est.density[j];
  }
  est.grid_mean = total / static_cast<double>(grid_size);
  est.min_density = *std::min_element(est.density.begin(), est.density.end());
  return est;
}

FlatnessResult flatness_test(const SpectralEstimate& est, const CorrelationSeries& s) {
  FlatnessResult r;
  r.slack = est.slack;
  r.rounding = est.rounding;
  for (std::size_t j = 0; j < est.density.size(); ++j) {
    const double dev = std::abs(est.density[j] - est.rho0);
    if (dev > r.deviation) {
      r.deviation = dev;
      r.worst_theta = est.theta[j];
    }
  }
  r.consistent_with_flat = r.deviation <= r.slack + r.rounding;
  Rational sup = 0;
  for (std::size_t k = 1; k < est.order && k < s.rho.size(); ++k) sup = std::max(sup, s.rho[k].magnitude());
  r.sup_magnitude = up(sup);
  r.bound_holds = r.deviation <= static_cast<double>(est.order - 1) * r.sup_magnitude + r.rounding;
  return r;
}

DecayResult decay_test(const CorrelationSeries& s, std::size_t tail_start) {
  if (tail_start >= s.rho.size()) throw std::invalid_argument("tail start beyond the series");
  DecayResult d;
  d.sup = 0;
  d.slack = 0;
  d.certain = 0;
  d.argmax = tail_start;
  for (std::size_t k = tail_start; k < s.rho.size(); ++k) {
    const Rational mag = s.rho[k].magnitude();
    if (mag > d.sup) {
      d.sup = mag;
      d.argmax = k;
    }
    d.slack = std::max(d.slack, s.rho[k].width());
    d.certain = std::max(d.certain, s.rho[k].distance_to(0));
  }
  d.within_slack = d.sup <= d.slack;
  return d;
}

WienerAverage wiener_average(const CorrelationSeries& s, std::size_t K) {
  if (K < 1 || K > s.max_lag()) throw std::invalid_argument("Wiener average needs 1 <= K <= max lag");
  Rational lo = 0, hi = 0;
  for (std::size_t k = 1; k <= K; ++k) {
    const RationalInterval& r = s.rho[k];
    const Rational mag = r.magnitude();
    const Rational near = r.distance_to(0);
    lo += near * near;
    hi += mag * mag;
  }
  WienerAverage w;
  w.value = RationalInterval(lo / from_u64(K), hi / from_u64(K));
  w.slack = w.value.width();
  return w;
}

}  // namespace rigidlab
