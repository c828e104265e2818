#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rigidlab/rational.hpp"

namespace rigidlab {

/// Largest B_N a DigitSystem may describe. Enumeration-heavy paths enforce
/// their own tighter bounds.
inline constexpr std::uint64_t kMaxDigitModulus = std::uint64_t{1} << 62;

/// Adic base b_1, b_2, ... truncated at a working depth N. The radix pattern
/// repeats cyclically, so {2} is dyadic and {3, 2} is 3,2,3,2,...
///
/// Digit i (1-based) has weight B_{i-1}; residue mod B_d encodes the first d digits.
class DigitSystem {
 public:
  DigitSystem(std::vector<std::uint32_t> radix_pattern, int depth);

  static DigitSystem dyadic(int depth) { return DigitSystem({2}, depth); }

  int depth() const { return depth_; }
  /// b_i for 1 <= i <= depth.
  std::uint32_t radix(int i) const;
  /// B_d = b_1 * ... * b_d for 0 <= d <= depth (B_0 = 1).
  std::uint64_t block_size(int d) const;
  std::uint64_t modulus() const { return blocks_.back(); }
  std::span<const std::uint32_t> radices() const { return radices_; }
  const std::vector<std::uint32_t>& pattern() const { return pattern_; }
  bool is_dyadic() const { return pattern_.size() == 1 && pattern_[0] == 2; }

  /// Same radix pattern at a different working depth.
  DigitSystem with_depth(int depth) const { return DigitSystem(pattern_, depth); }

  friend bool operator==(const DigitSystem& a, const DigitSystem& b) {
    return a.depth_ == b.depth_ && a.radices_ == b.radices_;
  }

 private:
  std::vector<std::uint32_t> pattern_;
  std::vector<std::uint32_t> radices_;
  std::vector<std::uint64_t> blocks_;
  int depth_;
};

/// A point of the adic space known to working depth, stored as its residue mod B_N.
struct Point {
  std::uint64_t residue = 0;
  friend bool operator==(Point, Point) = default;
};

Point point_from_residue(const DigitSystem& sys, std::uint64_t residue);
Point point_from_digits(const DigitSystem& sys, std::span<const std::uint32_t> digits);
std::vector<std::uint32_t> digits_of(const DigitSystem& sys, Point x);

/// T0^k: add k with carry. Throws std::invalid_argument for negative k.
Point odometer_add(const DigitSystem& sys, Point x, std::int64_t k);

struct CarryLength {
  int length = 0;
  /// False exactly when all N digits are maximal (the carry runs past depth).
  bool determined = true;
};

CarryLength carry_length(const DigitSystem& sys, Point x);

/// Union of depth-d cylinders, stored as sorted distinct residues mod B_d.
class CylinderSet {
 public:
  CylinderSet(const DigitSystem& sys, int depth, std::vector<std::uint64_t> residues);

  /// Cylinder fixed by digit constraints (1-based position, digit value).
  static CylinderSet from_constraints(const DigitSystem& sys,
                                      std::span<const std::pair<int, std::uint32_t>> constraints);
  static CylinderSet whole(const DigitSystem& sys, int depth);

  int depth() const { return depth_; }
  /// B_d, the number of depth-d cells.
  std::uint64_t cells() const { return cells_; }
  const std::vector<std::uint64_t>& residues() const { return residues_; }
  bool empty() const { return residues_.empty(); }
  bool contains(std::uint64_t residue_mod_cells) const;

  /// The same set expressed with depth-`depth` cells (depth >= this->depth()).
  CylinderSet lift(const DigitSystem& sys, int depth) const;

 private:
  std::vector<std::uint64_t> residues_;
  std::uint64_t cells_;
  int depth_;
};

/// |subset| / B_d, exactly.
Rational cylinder_measure(const CylinderSet& c);

}  // namespace rigidlab
