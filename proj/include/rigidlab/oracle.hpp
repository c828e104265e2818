#pragma once

// Brute-force references for the fast path. They step digit vectors one
// point at a time and evaluate cocycle rules from scratch, with no orbit
// tables and no vector kernels, so only small systems are practical.

#include <cstdint>
#include <span>

#include "rigidlab/koopman.hpp"

namespace rigidlab {

/// Oracle work is B_N * k digit steps; larger requests throw ResourceError.
inline constexpr std::uint64_t kMaxOracleSteps = std::uint64_t{1} << 32;

RationalInterval oracle_correlation(const AdicSystem& sys, const FiberedCylinder& a,
                                    const FiberedCylinder& b, std::uint64_t k);

/// <f o T^k, f> for a function constant on fibered cells.
RationalInterval oracle_autocorrelation(const AdicSystem& sys, const FiberFunction& f, std::uint64_t k);

/// Tower correlation from an explicit cut-and-stack list, normalized by the
/// limit mass like tower_correlation.
RationalInterval oracle_tower_correlation(const RankOneSchedule& sched, int n,
                                          std::span<const std::uint64_t> levels_a,
                                          std::span<const std::uint64_t> levels_b, std::uint64_t k,
                                          int m);

}  // namespace rigidlab
