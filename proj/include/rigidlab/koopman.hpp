#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rigidlab/cocycles.hpp"
#include "rigidlab/orbit_table.hpp"
#include "rigidlab/rank_one.hpp"

namespace rigidlab {

/// Largest joining matrix (rows = base cells * fiber) built densely.
inline constexpr std::uint64_t kMaxMatrixCells = 1024;

/// An adic base with an optional Z_m extension (cocycle ZERO with m = 1 for
/// the plain odometer). Copies share one lazily built orbit table.
class AdicSystem {
 public:
  explicit AdicSystem(DigitSystem base);
  AdicSystem(DigitSystem base, Cocycle cocycle);

  const DigitSystem& base() const { return ext_.base; }
  const Cocycle& cocycle() const { return ext_.cocycle; }
  const GroupExtension& extension() const { return ext_; }
  std::uint32_t fiber() const { return ext_.fiber(); }
  bool is_extension() const { return ext_.fiber() > 1; }
  /// True when every fiber shift is zero (plain base or cocycle ZERO).
  bool trivial_cocycle() const { return ext_.cocycle.rule() == CocycleRule::Zero; }

  /// Built on first use; throws ResourceError past kMaxOrbitTableSize.
  std::shared_ptr<const OrbitTable> orbit_table() const;

  /// Same system at another working depth.
  AdicSystem with_depth(int depth) const;

 private:
  GroupExtension ext_;
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

struct RankOneSystem {
  RankOneSchedule schedule;
  /// Stage m whose tower resolves all correlations.
  int expansion_stage = 12;
};

using System = std::variant<AdicSystem, RankOneSystem>;

/// Depth-d cell counts of fiber shifts for one lag: counts[a * m + g] is the
/// number of x in cell a with phi_k(x) = g, undetermined[a] the number whose
/// orbit segment crosses an undetermined point. target[a] = (a + k) mod B_d.
struct ShiftHistogram {
  int depth = 0;
  std::uint64_t lag = 0;
  std::uint64_t cells = 1;
  std::uint32_t modulus = 1;
  /// B_N / B_d residues per cell.
  std::uint64_t per_cell = 1;
  std::vector<std::uint64_t> counts;
  std::vector<std::uint64_t> undetermined;

  std::uint64_t target(std::uint64_t a) const { return (a + lag % cells) % cells; }
};

/// Fast path: answers ShiftHistogram queries for any lag at one depth.
class LagEngine {
 public:
  LagEngine(const AdicSystem& sys, int depth);

  const AdicSystem& system() const { return sys_; }
  int depth() const { return depth_; }
  ShiftHistogram histogram(std::uint64_t k) const;

 private:
  AdicSystem sys_;
  std::shared_ptr<const ClassLayout> layout_;
  int depth_;
};

/// A x F: a union of base cylinders times a subset of the fiber Z_m.
struct FiberedCylinder {
  CylinderSet base;
  std::vector<std::uint32_t> fiber;  // sorted, distinct
  std::uint32_t modulus = 1;

  FiberedCylinder(CylinderSet base, std::vector<std::uint32_t> fiber, std::uint32_t modulus);
  /// A x Z_m.
  static FiberedCylinder full(CylinderSet base, std::uint32_t modulus);
  bool fiber_contains(std::uint32_t y) const;
};

Rational measure(const FiberedCylinder& c);

/// Many correlations at one (depth, lag) from a single histogram.
class Correlator {
 public:
  Correlator(const LagEngine& engine, std::uint64_t k);
  Correlator(const AdicSystem& sys, int depth, std::uint64_t k);

  const ShiftHistogram& histogram() const { return hist_; }
  /// mu(T^k A ∩ B). A and B must have depth <= the correlator depth.
  RationalInterval operator()(const FiberedCylinder& a, const FiberedCylinder& b) const;

 private:
  DigitSystem base_;
  ShiftHistogram hist_;
};

/// mu(T^k A ∩ B) on the extension (or base when modulus is 1).
RationalInterval correlation(const AdicSystem& sys, const FiberedCylinder& a,
                             const FiberedCylinder& b, std::uint64_t k);

/// Depth-d joining matrix M[a][b] = mu(C_a ∩ T^k C_b) / mu(C): row a is the
/// target cell, column b the source cell, cells ordered base-major with the
/// fiber index fastest. Entries are stored as integer counts times unit().
/// For towers the cells are the stage-d levels and spacers are left out, so
/// rows may sum to less than one.
class JoiningMatrix {
 public:
  JoiningMatrix(int depth, std::uint64_t lag, std::uint64_t base_cells, std::uint32_t fiber,
                Rational unit);

  int depth() const { return depth_; }
  std::uint64_t lag() const { return lag_; }
  std::uint64_t base_cells() const { return base_cells_; }
  std::uint32_t fiber() const { return fiber_; }
  std::size_t size() const { return size_; }
  const Rational& unit() const { return unit_; }

  RationalInterval entry(std::size_t row, std::size_t col) const;
  std::uint64_t lo_count(std::size_t row, std::size_t col) const { return lo_[row * size_ + col]; }
  std::uint64_t hi_count(std::size_t row, std::size_t col) const { return hi_[row * size_ + col]; }
  void add(std::size_t row, std::size_t col, std::uint64_t lo, std::uint64_t hi);

  RationalInterval row_sum(std::size_t row) const;
  RationalInterval col_sum(std::size_t col) const;
  /// Largest |entry difference| over all entries, measured endpoint-wise.
  Rational max_endpoint_distance(const JoiningMatrix& other) const;

 private:
  std::vector<std::uint64_t> lo_;
  std::vector<std::uint64_t> hi_;
  Rational unit_;
  std::uint64_t lag_;
  std::uint64_t base_cells_;
  std::size_t size_;
  std::uint32_t fiber_;
  int depth_;
};

JoiningMatrix joining_matrix(const LagEngine& engine, std::uint64_t k);
JoiningMatrix joining_matrix(const AdicSystem& sys, int depth, std::uint64_t k);
/// Stage-d tower matrix; requires d < expansion stage and k < h_m.
JoiningMatrix joining_matrix(const RankOneSystem& sys, int depth, std::uint64_t k);
JoiningMatrix joining_matrix(const System& sys, int depth, std::uint64_t k);

/// Largest lag the system can represent: B_N for adic systems, h_m - 1 for towers.
std::uint64_t max_lag(const System& sys);
/// Levels at stage d, or B_d cells times the fiber.
std::uint64_t matrix_cells(const System& sys, int depth);
int max_depth(const System& sys);
std::string describe(const System& sys);

struct WeakLimit {
  /// The final iterate; the best available approximation to the limit.
  JoiningMatrix limit;
  /// Every usable iterate, in sequence order.
  std::vector<JoiningMatrix> iterates;
  /// Max endpoint movement across the last (up to) three iterates.
  Rational movement;
  bool converged = false;
};

/// Iterates the depth-d matrices along the first i_max usable entries of seq
/// (entries beyond max_lag are skipped). Needs at least two usable entries.
WeakLimit weak_limit(const System& sys, int depth, std::span<const std::uint64_t> seq,
                     std::size_t i_max, const Rational& tolerance);

/// Function on the extension that is constant on depth-d fibered cells:
/// values[a * fiber + y].
struct FiberFunction {
  int depth = 0;
  std::uint64_t cells = 1;
  std::uint32_t fiber = 1;
  std::vector<Rational> values;

  const Rational& at(std::uint64_t a, std::uint32_t y) const { return values[a * fiber + y]; }
  /// (-1)^y on X x Z_m, m even.
  static FiberFunction fiber_sign(std::uint32_t modulus);
  static FiberFunction indicator(const DigitSystem& sys, const FiberedCylinder& c);
  /// The same function on depth-`depth` cells.
  FiberFunction lift(const DigitSystem& sys, int depth) const;
};

/// Function on the base constant on depth-d cells.
struct BaseFunction {
  int depth = 0;
  std::vector<Rational> values;
};

/// Fiber average: the component in H_0 (functions independent of y).
BaseFunction project_H0(const FiberFunction& f);
FiberFunction lift_to_extension(const BaseFunction& g, std::uint32_t fiber);
/// f minus its fiber average.
FiberFunction project_H0_perp(const FiberFunction& f);
/// <f, g> in L^2(mu x uniform); f and g must share depth and fiber.
Rational inner_product(const FiberFunction& f, const FiberFunction& g);
Rational mean(const FiberFunction& f);

}  // namespace rigidlab
