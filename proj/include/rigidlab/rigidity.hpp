#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rigidlab/koopman.hpp"

namespace rigidlab {

/// Default weak-limit tolerance, 2^-10.
Rational default_tolerance();

/// Largest beta with M - beta*I entrywise >= 0: the minimum diagonal entry.
RationalInterval alpha_from_matrix(const JoiningMatrix& m);

/// Exact check that M - beta*I >= 0 entrywise and that no larger beta works,
/// on both endpoint matrices of M (beta = alpha_from_matrix(M)).
bool decomposition_witness(const JoiningMatrix& m);

enum class SequenceRule { TowerHeights, ShiftedTowerHeights, Explicit };

std::string to_string(SequenceRule r);

class CandidateSequence {
 public:
  /// B_n (adic) or h_n (rank-one) for n = 1..count, each plus shift, capped
  /// at the largest representable lag.
  static CandidateSequence tower_heights(const System& sys, std::size_t count, std::uint64_t shift = 0);
  /// Throws std::invalid_argument unless values are strictly increasing and positive.
  static CandidateSequence explicit_list(std::vector<std::uint64_t> values, std::string label = "explicit");

  const std::string& label() const { return label_; }
  SequenceRule rule() const { return rule_; }
  std::uint64_t shift() const { return shift_; }
  std::span<const std::uint64_t> values() const { return values_; }

 private:
  CandidateSequence(std::string label, SequenceRule rule, std::uint64_t shift, std::vector<std::uint64_t> v);

  std::string label_;
  SequenceRule rule_;
  std::uint64_t shift_;
  std::vector<std::uint64_t> values_;
};

enum class RigidityMethod { SetBased, Operator };

std::string to_string(RigidityMethod m);

struct IterateBeta {
  std::uint64_t lag = 0;
  RationalInterval beta;
};

struct DepthEstimate {
  int depth = 0;
  /// Hull over the last (up to) three iterates.
  RationalInterval beta;
  std::vector<IterateBeta> iterates;
  Rational movement;
  bool converged = false;
};

struct RigidityEstimate {
  RigidityMethod method = RigidityMethod::Operator;
  std::string sequence;
  std::vector<DepthEstimate> depths;
  /// Lower endpoints of beta_d never increase with d.
  bool monotone = true;
  bool converged = false;
  /// Set only when every depth converged.
  std::optional<RationalInterval> alpha;
};

/// Operator method: beta_d = min diagonal of the depth-d weak limit.
RigidityEstimate rigidity_along(const System& sys, const CandidateSequence& seq, int d_min, int d_max,
                                std::size_t i_max, const Rational& tolerance = default_tolerance());

/// Set method: inf over single (fibered) cells A of depth d_min..d_max of
/// mu(T^k A ∩ A) / mu(A), tail-evaluated like rigidity_along.
RigidityEstimate set_based_alpha(const System& sys, const CandidateSequence& seq, int d_min, int d_max,
                                 std::size_t i_max, const Rational& tolerance = default_tolerance());

enum class Verdict { Pass, Fail, HypothesisFail, Inconclusive, Skipped, Info };

std::string to_string(Verdict v);

struct ResidualRow {
  std::uint64_t lag = 0;
  /// lo: rigorous lower bound of the sup-norm residual; hi: rigorous upper bound.
  RationalInterval residual;
};

struct TheoremCheck {
  int depth = 0;
  std::vector<ResidualRow> rows;
  /// Upper bounds strictly decrease along the sequence.
  bool strictly_decreasing = false;
  bool base_converged = false;
  Verdict verdict = Verdict::Inconclusive;
};

/// Residual || M_ext(k_i) - M_base(k_i) (x) Pi_m ||_inf along the sequence.
/// PASS when the final upper bound is <= tol; HYPOTHESIS_FAIL when the last
/// three lower bounds all exceed tol; SKIPPED when the base limit does not converge.
TheoremCheck theorem_check(const AdicSystem& ext, const CandidateSequence& seq, int depth, std::size_t i_max,
                           const Rational& tolerance);

/// PASS iff |mid(ext) - mid(base)/2| <= tol + (w_ext + w_base/2) / 2.
Verdict halving_check(const std::optional<RationalInterval>& alpha_base,
                      const std::optional<RationalInterval>& alpha_ext, const Rational& tolerance);

}  // namespace rigidlab
