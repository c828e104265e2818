#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "rigidlab/cocycles.hpp"

namespace rigidlab {

/// Largest B_N for which the fast path builds per-residue tables.
inline constexpr std::uint64_t kMaxOrbitTableSize = std::uint64_t{1} << 28;
/// Fiber moduli handled by the vector kernels.
inline constexpr std::uint32_t kMaxFiberModulus = 64;

/// Per-residue prefix data of a cocycle over [0, B_N):
///   prefix[x] = sum of phi(j) over determined j < x, mod m
///   gap[x]    = cyclic distance from x to the next undetermined residue
/// so the orbit segment [x, x+k) is determined iff gap[x] >= k, and then
/// phi_k(x) = prefix[x+k] - prefix[x] (+ full-period wraps of total()).
class OrbitTable {
 public:
  static constexpr std::uint32_t kNoGap = 0xffffffffu;

  explicit OrbitTable(const GroupExtension& ext);

  std::uint64_t size() const { return prefix_.size(); }
  std::uint32_t modulus() const { return modulus_; }
  std::uint8_t total() const { return total_; }
  bool has_undetermined() const { return undetermined_ > 0; }
  std::uint64_t undetermined_count() const { return undetermined_; }
  std::span<const std::uint8_t> prefix() const { return prefix_; }
  std::span<const std::uint32_t> gap() const { return gap_; }

 private:
  std::vector<std::uint8_t> prefix_;
  std::vector<std::uint32_t> gap_;
  std::uint64_t undetermined_ = 0;
  std::uint32_t modulus_;
  std::uint8_t total_ = 0;
};

/// OrbitTable regrouped class-major for a resolution depth d: slot
/// a * n + j holds residue x = a + j * B_d (n = B_N / B_d), so every lag
/// becomes a contiguous shifted difference inside one class.
class ClassLayout {
 public:
  ClassLayout(std::shared_ptr<const OrbitTable> table, std::uint64_t classes);

  std::uint64_t classes() const { return classes_; }
  std::uint64_t per_class() const { return per_class_; }
  const std::uint8_t* prefix(std::uint64_t a) const { return prefix_ + a * per_class_; }
  const std::uint32_t* gap(std::uint64_t a) const { return gap_ + a * per_class_; }
  const OrbitTable& table() const { return *table_; }

 private:
  std::shared_ptr<const OrbitTable> table_;
  std::vector<std::uint8_t> prefix_store_;
  std::vector<std::uint32_t> gap_store_;
  const std::uint8_t* prefix_;
  const std::uint32_t* gap_;
  std::uint64_t classes_;
  std::uint64_t per_class_;
};

}  // namespace rigidlab
