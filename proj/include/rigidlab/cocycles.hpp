#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rigidlab/systems.hpp"

namespace rigidlab {

enum class CocycleRule { Zero, Morse, RudinShapiro, Table };

/// phi = (carry_coeff * t + constant + sum_i digit_weights[i] * window[i]) mod m,
/// used by table cocycles for carry lengths t >= t_max.
struct AffineTail {
  std::uint32_t carry_coeff = 0;
  std::uint32_t constant = 0;
  std::vector<std::uint32_t> digit_weights;
};

/// Explicit cocycle: phi(t, window) looked up for t < t_max, affine rule above.
/// The window is the digits x_{t+1} .. x_{t+lookahead} starting at the first
/// non-maximal digit.
struct CocycleTable {
  std::uint32_t modulus = 2;
  int lookahead = 0;
  int t_max = 0;
  std::map<std::pair<int, std::vector<std::uint32_t>>, std::uint32_t> entries;
  AffineTail tail;
};

/// Z_m-valued function of the carry pattern of a point: its carry length t
/// plus a bounded window of digits above the carry block.
class Cocycle {
 public:
  static Cocycle zero(std::uint32_t modulus = 2);
  /// phi = (1 + t) mod 2; Birkhoff sums give the binary digit-sum parity.
  static Cocycle morse();
  /// phi = (x_{t+2} + max(t - 1, 0)) mod 2; Birkhoff sums give the parity of
  /// the number of "11" blocks.
  static Cocycle rudin_shapiro();
  static Cocycle from_table(CocycleTable table);

  /// Plain-text table format; see README. Throws ConfigError listing every
  /// malformed line.
  static Cocycle parse_table(std::string_view text);
  static Cocycle load_table(const std::filesystem::path& path);

  CocycleRule rule() const { return rule_; }
  std::uint32_t modulus() const { return modulus_; }
  int lookahead() const { return lookahead_; }
  std::string name() const;
  const CocycleTable* table() const { return table_.get(); }

  /// phi for a point whose carry length t is determined and whose window
  /// x_{t+1} .. x_{t+lookahead} is known. Throws ConfigError when a table
  /// has no entry for the input.
  std::uint32_t value(int carry, std::span<const std::uint32_t> window) const;

 private:
  Cocycle(CocycleRule rule, std::uint32_t modulus, int lookahead,
          std::shared_ptr<const CocycleTable> table);

  CocycleRule rule_;
  std::uint32_t modulus_;
  int lookahead_;
  std::shared_ptr<const CocycleTable> table_;
};

/// phi(x) in Z_m, or nothing when the carry (or the window) runs past depth N.
struct CocycleValue {
  std::optional<std::uint32_t> value;

  bool determined() const { return value.has_value(); }
  static CocycleValue undetermined() { return {}; }
  friend bool operator==(const CocycleValue&, const CocycleValue&) = default;
};

/// T(x, y) = (T0 x, y + phi(x)) on X x Z_m with uniform fiber measure.
struct GroupExtension {
  DigitSystem base;
  Cocycle cocycle;

  std::uint32_t fiber() const { return cocycle.modulus(); }
};

CocycleValue eval_cocycle(const Cocycle& c, const DigitSystem& sys, Point x);

/// phi_k(x) = sum_{j<k} phi(T0^j x); UNDETERMINED if any orbit point is.
/// Throws std::invalid_argument for negative k.
CocycleValue cocycle_sum(const Cocycle& c, const DigitSystem& sys, Point x, std::int64_t k);

enum class SequenceOracle { MorseDigitSum, RudinShapiro11Count };

std::uint32_t sequence_oracle_value(SequenceOracle oracle, std::uint64_t n);
std::string to_string(SequenceOracle oracle);

struct CocycleVerification {
  enum class Status { Success, Mismatch, Inconclusive };
  Status status = Status::Success;
  std::uint64_t checked = 0;
  /// First failing (Mismatch) or first undetermined (Inconclusive) k.
  std::uint64_t first_k = 0;
  std::uint32_t expected = 0;
  std::uint32_t actual = 0;
};

std::string to_string(CocycleVerification::Status s);

/// Checks cocycle_sum(c, 0, k) == oracle(k) - oracle(0) mod 2 for k < k_max on
/// the dyadic base at the given depth.
CocycleVerification verify_cocycle_against_sequence(const Cocycle& c, const DigitSystem& sys,
                                                    SequenceOracle oracle, std::uint64_t k_max);
/// Same, at a dyadic depth large enough to determine every sum.
CocycleVerification verify_cocycle_against_sequence(const Cocycle& c, SequenceOracle oracle,
                                                    std::uint64_t k_max);

}  // namespace rigidlab
