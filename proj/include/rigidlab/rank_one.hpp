#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rigidlab/rational.hpp"

namespace rigidlab {

/// Default cap on stage heights built by the tower engine.
inline constexpr std::uint64_t kDefaultMaxTowerHeight = std::uint64_t{1} << 26;

/// One cutting-and-stacking step: cut into `cuts` columns, put spacers[c]
/// spacer levels on top of column c, then stack column c+1 on column c.
struct StageRecipe {
  std::uint32_t cuts = 2;
  std::vector<std::uint64_t> spacers;  // size == cuts

  std::uint64_t spacer_total() const;
};

/// Rank-one construction. recipe(n) turns stage n into stage n+1; the last
/// listed recipe repeats forever.
class RankOneSchedule {
 public:
  RankOneSchedule(std::uint64_t initial_height, std::vector<StageRecipe> recipes);

  /// r = 3, spacers (0, 1, 0), h_1 = 1.
  static RankOneSchedule chacon();
  /// r = 2, no spacers: the dyadic odometer as a rank-one map.
  static RankOneSchedule dyadic();

  std::uint64_t initial_height() const { return initial_height_; }
  const StageRecipe& recipe(int n) const;
  const std::vector<StageRecipe>& recipes() const { return recipes_; }

  /// True when no recipe applied at stage >= n adds spacers; then T maps the
  /// top level of stage n onto its bottom level.
  bool spacer_free_from(int n) const;

  /// Total mass of the limit space, in units where a stage-1 level has width 1.
  Rational limit_mass() const;

 private:
  std::vector<StageRecipe> recipes_;
  std::uint64_t initial_height_;
};

struct TowerStage {
  int stage = 1;
  std::uint64_t height = 0;
  /// w_n with w_1 = 1.
  Rational level_width;
  /// h_n * w_n: the original stage-1 mass plus every spacer added so far.
  Rational total_mass;
  /// embeddings[m - 1] lists the offsets of the stage-m copies inside this
  /// stage, m = 1 .. stage-1; strictly increasing.
  std::vector<std::vector<std::uint64_t>> embeddings;
};

/// Throws ResourceError when h_n would exceed max_height.
TowerStage build_tower(const RankOneSchedule& sched, int n,
                       std::uint64_t max_height = kDefaultMaxTowerHeight);

std::uint64_t tower_height(const RankOneSchedule& sched, int n,
                           std::uint64_t max_height = kDefaultMaxTowerHeight);

/// Offsets of the stage-n copies inside stage m (n <= m).
std::vector<std::uint64_t> stage_offsets(const RankOneSchedule& sched, int n, int m,
                                         std::uint64_t max_height = kDefaultMaxTowerHeight);

struct TowerCorrelation {
  /// Normalized by the limit mass of the schedule.
  RationalInterval value;
  /// In units of stage-1 level width.
  RationalInterval absolute;
  int expansion_stage = 0;
  Rational normalization;
  /// True when the wraparound at the stage-m top was resolved exactly.
  bool wrapped_exactly = false;
};

/// mu(T^k A ∩ B) for unions A, B of stage-n levels, evaluated on the stage-m
/// tower (m > n). Orbits that leave the top of stage m contribute their mass
/// to the interval width. Throws std::invalid_argument when k >= h_m.
TowerCorrelation tower_correlation(const RankOneSchedule& sched, int n,
                                   std::span<const std::uint64_t> levels_a,
                                   std::span<const std::uint64_t> levels_b,
                                   std::uint64_t k, int m);

inline TowerCorrelation tower_correlation(const RankOneSchedule& sched, int n,
                                          std::span<const std::uint64_t> levels, std::uint64_t k,
                                          int m) {
  return tower_correlation(sched, n, levels, levels, k, m);
}

/// For each stage-m level, the stage-d level it copies, or -1 for a spacer
/// added after stage d.
std::vector<std::int64_t> stage_labels(const RankOneSchedule& sched, int d, int m,
                                       std::uint64_t max_height = kDefaultMaxTowerHeight);

}  // namespace rigidlab
