#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rigidlab/koopman.hpp"

namespace rigidlab {

/// rho(k) = <f o T^k, f> for k = 0..K. Only k >= 0 is stored; real f gives rho(-k) = rho(k).
struct CorrelationSeries {
  std::vector<RationalInterval> rho;
  /// The constant subtracted from f before correlating (0 when not centered).
  Rational mean_removed;
  bool centered = false;

  std::size_t max_lag() const { return rho.empty() ? 0 : rho.size() - 1; }
};

/// Lags are independent and computed on up to `threads` workers; the result
/// is always in lag order.
CorrelationSeries autocorrelation_series(const AdicSystem& sys, const FiberFunction& f, std::size_t K,
                                         bool subtract_mean, unsigned threads = 1);

/// Fejer sums evaluated in double precision from interval midpoints.
struct SpectralEstimate {
  std::size_t order = 0;
  std::vector<double> theta;
  std::vector<double> density;
  double rho0 = 0;
  /// sum_{|k|<N} (1 - |k|/N) * halfwidth(rho(k)), rounded up: how far the
  /// true Fejer sum can sit from the midpoint sum.
  double slack = 0;
  /// Bound on floating-point error of any density sample.
  double rounding = 0;
  double grid_mean = 0;
  double min_density = 0;
};

/// Requires 1 <= order <= K + 1 and grid_size > order.
SpectralEstimate fejer_density(const CorrelationSeries& s, std::size_t order, std::size_t grid_size = 1024);

struct FlatnessResult {
  /// max_j |sigma(theta_j) - rho(0)|
  double deviation = 0;
  double slack = 0;
  double rounding = 0;
  double worst_theta = 0;
  bool consistent_with_flat = false;
  /// deviation <= (N - 1) * sup_{1<=k<N} |rho(k)| + rounding, the bound every
  /// Fejer sum must satisfy.
  bool bound_holds = false;
  double sup_magnitude = 0;
};

FlatnessResult flatness_test(const SpectralEstimate& est, const CorrelationSeries& s);

struct DecayResult {
  /// sup over k >= tail_start of max(|lo|, |hi|).
  Rational sup;
  /// Largest interval width in the tail.
  Rational slack;
  /// sup over the tail of the distance from rho(k) to 0 (rigorous lower bound).
  Rational certain;
  std::size_t argmax = 0;
  bool within_slack = false;
};

DecayResult decay_test(const CorrelationSeries& s, std::size_t tail_start);

struct WienerAverage {
  /// (1/K) sum_{k=1..K} |rho(k)|^2 as a rigorous interval.
  RationalInterval value;
  Rational slack;
};

/// Lag 0 is excluded so a vanishing tail averages to zero for every K.
WienerAverage wiener_average(const CorrelationSeries& s, std::size_t K);

}  // namespace rigidlab
