#include "rigidlab/rigidity.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "rigidlab/errors.hpp"

namespace rigidlab {

Rational default_tolerance() { return pow2(-10); }

RationalInterval alpha_from_matrix(const JoiningMatrix& m) {
  std::uint64_t lo = m.lo_count(0, 0), hi = m.hi_count(0, 0);
  for (std::size_t a = 1; a < m.size(); ++a) {
    lo = std::min(lo, m.lo_count(a, a));
    hi = std::min(hi, m.hi_count(a, a));
  }
  return RationalInterval(from_u64(lo) * m.unit(), from_u64(hi) * m.unit());
}

bool decomposition_witness(const JoiningMatrix& m) {
  // Counts are nonnegative, so M - beta*I >= 0 reduces to the diagonal; the
  // minimum diagonal entry is tight because beta' > beta makes it negative.
  for (int side = 0; side < 2; ++side) {
    auto at = [&](std::size_t r, std::size_t c) { return side == 0 ? m.lo_count(r, c) : m.hi_count(r, c); };
    std::uint64_t beta = at(0, 0);
    for (std::size_t a = 1; a < m.size(); ++a) beta = std::min(beta, at(a, a));
    bool tight = false;
    for (std::size_t r = 0; r < m.size(); ++r) {
      for (std::size_t c = 0; c < m.size(); ++c) {
        const std::uint64_t v = at(r, c);
        if (r == c) {
          if (v < beta) return false;
          if (v == beta) tight = true;
        }
      }
    }
    if (!tight) return false;
  }
  return true;
}

std::string to_string(SequenceRule r) {
  switch (r) {
    case SequenceRule::TowerHeights: return "tower-heights";
    case SequenceRule::ShiftedTowerHeights: return "shifted-tower-heights";
    case SequenceRule::Explicit: return "explicit";
  }
  return "?";
}

CandidateSequence::CandidateSequence(std::string label, SequenceRule rule, std::uint64_t shift,
                                     std::vector<std::uint64_t> v)
    : label_(std::move(label)), rule_(rule), shift_(shift), values_(std::move(v)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] == 0) throw std::invalid_argument("sequence entries must be positive");
    if (i > 0 && values_[i] <= values_[i - 1]) throw std::invalid_argument("sequence must be strictly increasing");
  }
}

CandidateSequence CandidateSequence::tower_heights(const System& sys, std::size_t count, std::uint64_t shift) {
  const std::uint64_t limit = max_lag(sys);
  std::vector<std::uint64_t> v;
  if (auto* a = std::get_if<AdicSystem>(&sys)) {
    for (int n = 1; n <= a->base().depth() && v.size() < count; ++n) {
      const std::uint64_t k = a->base().block_size(n) + shift;
      if (k > limit) break;
      v.push_back(k);
    }
  } else {
    const auto& r = std::get<RankOneSystem>(sys);
    for (int n = 1; n < r.expansion_stage && v.size() < count; ++n) {
      const std::uint64_t k = tower_height(r.schedule, n) + shift;
      if (k > limit) break;
      v.push_back(k);
    }
  }
  std::string label = shift == 0 ? "tower-heights" : "tower-heights+" + std::to_string(shift);
  return CandidateSequence(label, shift == 0 ? SequenceRule::TowerHeights : SequenceRule::ShiftedTowerHeights,
                           shift, std::move(v));
}

CandidateSequence CandidateSequence::explicit_list(std::vector<std::uint64_t> values, std::string label) {
  if (values.empty()) throw std::invalid_argument("explicit sequence is empty");
  return CandidateSequence(std::move(label), SequenceRule::Explicit, 0, std::move(values));
}

std::string to_string(RigidityMethod m) { return m == RigidityMethod::SetBased ? "SET_BASED" : "OPERATOR"; }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::HypothesisFail: return "HYPOTHESIS_FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
    case Verdict::Skipped: return "SKIPPED";
    case Verdict::Info: return "INFO";
  }
  return "?";
}

namespace {

std::size_t tail_start(std::size_t n) { return n >= 3 ? n - 3 : 0; }

void finish(RigidityEstimate& est) {
  est.converged = !est.depths.empty();
  est.monotone = true;
  for (std::size_t i = 0; i < est.depths.size(); ++i) {
    est.converged = est.converged && est.depths[i].converged;
    if (i > 0 && est.depths[i].beta.lo > est.depths[i - 1].beta.lo) est.monotone = false;
  }
  if (!est.converged) return;
  Rational lo = est.depths.front().beta.lo;
  for (const auto& d : est.depths) lo = std::min(lo, d.beta.lo);
  Rational hi = est.depths.back().beta.hi;
  if (est.method == RigidityMethod::SetBased)
    for (const auto& d : est.depths) hi = std::min(hi, d.beta.hi);
  est.alpha = RationalInterval(lo, std::max(lo, hi));
}

std::vector<std::uint64_t> usable_lags(const System& sys, const CandidateSequence& seq, std::size_t i_max) {
  const std::uint64_t limit = max_lag(sys);
  std::vector<std::uint64_t> lags;
  for (auto k : seq.values()) {
    if (lags.size() >= i_max) break;
    if (k <= limit) lags.push_back(k);
  }
  if (lags.size() < 2)
    throw std::invalid_argument("sequence '" + seq.label() + "' has fewer than two entries within the representable range");
  return lags;
}

void check_depths(const System& sys, int d_min, int d_max) {
  if (d_min < 0 || d_max < d_min || d_max > max_depth(sys))
    throw std::invalid_argument("depth range " + std::to_string(d_min) + ".." + std::to_string(d_max) +
                                " outside [0, " + std::to_string(max_depth(sys)) + "]");
  if (std::holds_alternative<RankOneSystem>(sys) && d_min < 1)
    throw std::invalid_argument("tower depths start at stage 1");
}

}  // namespace

RigidityEstimate rigidity_along(const System& sys, const CandidateSequence& seq, int d_min, int d_max,
                                std::size_t i_max, const Rational& tolerance) {
  check_depths(sys, d_min, d_max);
  RigidityEstimate est;
  est.method = RigidityMethod::Operator;
  est.sequence = seq.label();
  for (int d = d_min; d <= d_max; ++d) {
    WeakLimit wl = weak_limit(sys, d, seq.values(), i_max, tolerance);
    DepthEstimate de;
    de.depth = d;
    for (const auto& m : wl.iterates) de.iterates.push_back({m.lag(), alpha_from_matrix(m)});
    const std::size_t first = tail_start(de.iterates.size());
    de.beta = de.iterates[first].beta;
    for (std::size_t i = first + 1; i < de.iterates.size(); ++i) de.beta = hull(de.beta, de.iterates[i].beta);
    de.movement = wl.movement;
    de.converged = wl.converged;
    est.depths.push_back(std::move(de));
  }
  finish(est);
  return est;
}

RigidityEstimate set_based_alpha(const System& sys, const CandidateSequence& seq, int d_min, int d_max,
                                 std::size_t i_max, const Rational& tolerance) {
  check_depths(sys, d_min, d_max);
  const auto lags = usable_lags(sys, seq, i_max);
  RigidityEstimate est;
  est.method = RigidityMethod::SetBased;
  est.sequence = seq.label();

  for (int d = d_min; d <= d_max; ++d) {
    // returns[i][c] = (lo, hi) count of mass in cell c that comes back to c after lag i
    std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> returns;
    Rational unit;
    if (auto* a = std::get_if<AdicSystem>(&sys)) {
      if (a->base().block_size(d) > (std::uint64_t{1} << 22) / a->fiber())
        throw ResourceError("set-based family at depth " + std::to_string(d) + " is too large");
      LagEngine engine(*a, d);
      const std::uint32_t m = a->fiber();
      for (auto k : lags) {
        const ShiftHistogram h = engine.histogram(k);
        unit = Rational(1) / from_u64(h.per_cell);
        std::vector<std::pair<std::uint64_t, std::uint64_t>> row(h.cells * m);
        for (std::uint64_t c = 0; c < h.cells; ++c) {
          if (h.target(c) != c) continue;  // every orbit leaves the cell
          const std::uint64_t stay = h.counts[c * m];
          const std::uint64_t open = h.undetermined[c];
          for (std::uint32_t y = 0; y < m; ++y) row[c * m + y] = {stay + (m == 1 ? open : 0), stay + open};
        }
        returns.push_back(std::move(row));
      }
    } else {
      const auto& r = std::get<RankOneSystem>(sys);
      for (auto k : lags) {
        // A single level returns to itself only through its diagonal entry.
        const JoiningMatrix mtx = joining_matrix(r, d, k);
        unit = mtx.unit();
        std::vector<std::pair<std::uint64_t, std::uint64_t>> row(mtx.size());
        for (std::size_t c = 0; c < mtx.size(); ++c) row[c] = {mtx.lo_count(c, c), mtx.hi_count(c, c)};
        returns.push_back(std::move(row));
      }
    }

    DepthEstimate de;
    de.depth = d;
    const std::size_t cells = returns.front().size();
    for (std::size_t i = 0; i < lags.size(); ++i) {
      std::uint64_t lo = returns[i][0].first, hi = returns[i][0].second;
      for (std::size_t c = 1; c < cells; ++c) {
        lo = std::min(lo, returns[i][c].first);
        hi = std::min(hi, returns[i][c].second);
      }
      de.iterates.push_back({lags[i], RationalInterval(from_u64(lo) * unit, from_u64(hi) * unit)});
    }
    const std::size_t first = tail_start(lags.size());
    std::uint64_t beta_lo = UINT64_MAX, beta_hi = UINT64_MAX, move = 0;
    for (std::size_t c = 0; c < cells; ++c) {
      std::uint64_t lo = returns[first][c].first, hi = returns[first][c].second;
      for (std::size_t i = first + 1; i < lags.size(); ++i) {
        lo = std::min(lo, returns[i][c].first);
        hi = std::max(hi, returns[i][c].second);
        auto diff = [](std::uint64_t x, std::uint64_t y) { return x > y ? x - y : y - x; };
        move = std::max({move, diff(returns[i][c].first, returns[i - 1][c].first),
                         diff(returns[i][c].second, returns[i - 1][c].second)});
      }
      beta_lo = std::min(beta_lo, lo);
      beta_hi = std::min(beta_hi, hi);
    }
    de.beta = RationalInterval(from_u64(beta_lo) * unit, from_u64(beta_hi) * unit);
    de.movement = from_u64(move) * unit;
    de.converged = de.movement <= tolerance;
    est.depths.push_back(std::move(de));
  }
  finish(est);
  return est;
}

TheoremCheck theorem_check(const AdicSystem& ext, const CandidateSequence& seq, int depth, std::size_t i_max,
                           const Rational& tolerance) {
  const System ext_sys = ext;
  const System base_sys = AdicSystem(ext.base());
  const auto lags = usable_lags(ext_sys, seq, i_max);
  const std::uint32_t m = ext.fiber();

  TheoremCheck out;
  out.depth = depth;
  out.base_converged = weak_limit(base_sys, depth, lags, lags.size(), tolerance).converged;

  LagEngine ext_engine(ext, depth);
  LagEngine base_engine(std::get<AdicSystem>(base_sys), depth);
  for (auto k : lags) {
    const JoiningMatrix me = joining_matrix(ext_engine, k);
    const JoiningMatrix mb = joining_matrix(base_engine, k);
    Rational lo = 0, hi = 0;
    for (std::size_t r = 0; r < me.size(); ++r) {
      for (std::size_t c = 0; c < me.size(); ++c) {
        const Rational target = mb.entry(r / m, c / m).lo / m;
        const RationalInterval e = me.entry(r, c);
        lo = std::max(lo, e.distance_to(target));
        hi = std::max(hi, e.max_distance_to(target));
      }
    }
    out.rows.push_back({k, RationalInterval(lo, hi)});
  }

  out.strictly_decreasing = out.rows.size() >= 2;
  for (std::size_t i = 1; i < out.rows.size(); ++i)
    if (!(out.rows[i].residual.hi < out.rows[i - 1].residual.hi)) out.strictly_decreasing = false;

  if (!out.base_converged) {
    out.verdict = Verdict::Skipped;
    return out;
  }
  if (out.rows.back().residual.hi <= tolerance) {
    out.verdict = Verdict::Pass;
    return out;
  }
  bool away = true;
  for (std::size_t i = tail_start(out.rows.size()); i < out.rows.size(); ++i)
    away = away && out.rows[i].residual.lo > tolerance;
  out.verdict = away ? Verdict::HypothesisFail : Verdict::Inconclusive;
  return out;
}

Verdict halving_check(const std::optional<RationalInterval>& alpha_base,
                      const std::optional<RationalInterval>& alpha_ext, const Rational& tolerance) {
  if (!alpha_base || !alpha_ext) return Verdict::Skipped;
  const Rational gap = abs(Rational(alpha_ext->midpoint() - alpha_base->midpoint() / 2));
  const Rational slack = tolerance + (alpha_ext->width() + alpha_base->width() / 2) / 2;
  return gap <= slack ? Verdict::Pass : Verdict::Fail;
}

}  // namespace rigidlab
