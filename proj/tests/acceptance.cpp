// Acceptance run: one PASS/FAIL line per criterion.
// Exit status is 0 unless a check throws; pass --strict to also fail on FAIL lines.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rigidlab/oracle.hpp"
#include "rigidlab/rigidity.hpp"
#include "rigidlab/spectral.hpp"

using namespace rigidlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o = body();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) {
    o.pass = false;
    o.detail += " [over time budget " + std::to_string(static_cast<int>(budget_s)) + "s]";
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %-28s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", id, title, secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string dec(const Rational& r) { return to_decimal(r, 6); }

std::string iv(const RationalInterval& v) { return "[" + dec(v.lo) + ", " + dec(v.hi) + "]"; }

// Every depth-d cell returns to itself with all of its mass under T^{B_n}, d <= n <= N.
bool cells_fixed(const AdicSystem& sys, int d, std::uint64_t k) {
  LagEngine engine(sys, d);
  const ShiftHistogram h = engine.histogram(k);
  for (std::uint64_t c = 0; c < h.cells; ++c)
    if (h.target(c) != c || h.counts[c] != h.per_cell || h.undetermined[c] != 0) return false;
  return true;
}

Outcome adic_one_rigid(const std::vector<std::uint32_t>& pattern, int n_max) {
  const AdicSystem sys(DigitSystem(pattern, n_max));
  const auto& base = sys.base();
  std::mt19937_64 rng(1);
  std::uint64_t checked = 0;
  for (int d = 0; d <= n_max && base.block_size(d) <= (std::uint64_t{1} << 20); ++d) {
    for (int n = d; n <= n_max; ++n) {
      const std::uint64_t k = base.block_size(n) % base.modulus();  // T^{B_N} is the identity
      if (!cells_fixed(sys, d, k)) return {false, "cell drift at d=" + std::to_string(d) + " n=" + std::to_string(n)};
      ++checked;
      if (d <= 8) {
        // unions of cells through the public correlation path
        std::vector<std::uint64_t> cells;
        for (std::uint64_t a = 0; a < base.block_size(d); ++a)
          if (rng() % 2) cells.push_back(a);
        const auto A = FiberedCylinder::full(CylinderSet(base, d, cells), 1);
        if (correlation(sys, A, A, k) != RationalInterval::point(measure(A)))
          return {false, "union mismatch at d=" + std::to_string(d) + " n=" + std::to_string(n)};
      }
    }
  }
  int d_max = 0;
  while (d_max < n_max && base.block_size(d_max + 1) <= kMaxMatrixCells) ++d_max;
  const System s = sys;
  const auto est = rigidity_along(s, CandidateSequence::tower_heights(s, n_max), 1, d_max, n_max);
  if (!est.alpha || *est.alpha != RationalInterval::point(Rational(1)))
    return {false, "alpha " + (est.alpha ? iv(*est.alpha) : std::string("not converged"))};
  return {true, std::to_string(checked) + " (d,n) pairs, alpha = 1 exactly (depths 1.." + std::to_string(d_max) + ")"};
}

Outcome criterion1() {
  const auto a = adic_one_rigid({2}, 20);
  const auto b = adic_one_rigid({3, 2}, 20);
  return {a.pass && b.pass, "dyadic: " + a.detail + "; (3,2): " + b.detail};
}

Outcome criterion2() {
  const auto m = verify_cocycle_against_sequence(Cocycle::morse(), SequenceOracle::MorseDigitSum, 65536);
  const auto r = verify_cocycle_against_sequence(Cocycle::rudin_shapiro(), SequenceOracle::RudinShapiro11Count, 65536);
  const bool ok = m.status == CocycleVerification::Status::Success && m.checked == 65536 &&
                  r.status == CocycleVerification::Status::Success && r.checked == 65536;
  return {ok, "MORSE " + to_string(m.status) + " " + std::to_string(m.checked) + ", RUDIN_SHAPIRO " +
                  to_string(r.status) + " " + std::to_string(r.checked)};
}

Outcome criterion3() {
  const AdicSystem sys(DigitSystem::dyadic(20), Cocycle::morse());
  const auto s = autocorrelation_series(sys, FiberFunction::fiber_sign(2), 1, false);
  const auto& r = s.rho[1];
  return {r.contains(make_rational(-1, 3)) && r.width() <= pow2(-17),
          "rho(1) = " + to_string(r) + ", width " + to_fraction(r.width())};
}

Outcome criterion4() {
  const auto fsign = FiberFunction::fiber_sign(2);
  const AdicSystem rs(DigitSystem::dyadic(24), Cocycle::rudin_shapiro());
  const auto s = autocorrelation_series(rs, fsign, 64, false, 4);
  bool zeros = true;
  for (std::size_t k = 1; k <= 64; ++k) zeros = zeros && s.rho[k].contains(Rational(0));
  const auto est = fejer_density(s, 64, 1024);
  const auto flat = flatness_test(est, s);
  const auto decay = decay_test(s, 16);

  const AdicSystem morse(DigitSystem::dyadic(24), Cocycle::morse());
  const auto sm = autocorrelation_series(morse, fsign, 64, false, 4);
  const auto mflat = flatness_test(fejer_density(sm, 64, 1024), sm);

  char buf[256];
  std::snprintf(buf, sizeof buf, "RS deviation %.3g <= slack %.3g, tail sup %s <= %s; Morse deviation %.3g",
                flat.deviation, flat.slack + flat.rounding, dec(decay.sup).c_str(), dec(decay.slack).c_str(),
                mflat.deviation);
  const bool ok = zeros && flat.consistent_with_flat && decay.within_slack && mflat.deviation >= 0.25;
  return {ok, std::string(zeros ? "" : "some rho(k) excludes 0; ") + buf};
}

Outcome criterion5() {
  const DigitSystem base = DigitSystem::dyadic(24);
  std::vector<std::uint64_t> lags;
  for (int n = 8; n <= 16; ++n) lags.push_back(std::uint64_t{1} << n);
  const auto seq = CandidateSequence::explicit_list(lags, "2^n");
  const Rational threshold = make_rational(1, 50);

  const auto rs = theorem_check(AdicSystem(base, Cocycle::rudin_shapiro()), seq, 4, lags.size(), threshold);
  const auto morse = theorem_check(AdicSystem(base, Cocycle::morse()), seq, 4, lags.size(), threshold);
  const auto zero = theorem_check(AdicSystem(base, Cocycle::zero(2)), seq, 4, lags.size(), threshold);

  const Rational& rs_final = rs.rows.back().residual.hi;
  bool morse_ok = true;
  for (std::size_t i = morse.rows.size() - 3; i < morse.rows.size(); ++i)
    morse_ok = morse_ok && morse.rows[i].residual.max_distance_to(make_rational(1, 6)) <= make_rational(1, 20);
  bool zero_ok = true;
  for (const auto& row : zero.rows) zero_ok = zero_ok && row.residual == RationalInterval::point(make_rational(1, 2));

  std::string detail = "RS residual " + iv(rs.rows.front().residual) + " -> " + iv(rs.rows.back().residual) +
                       (rs.strictly_decreasing ? " strictly decreasing" : " NOT strictly decreasing") +
                       ", final <= 0.02: " + (rs_final <= threshold ? "yes" : "no") + "; Morse " +
                       iv(morse.rows.back().residual) + "; ZERO " + iv(zero.rows.back().residual);
  return {rs.strictly_decreasing && rs_final <= threshold && morse_ok && zero_ok, detail};
}

Outcome criterion6() {
  const DigitSystem base = DigitSystem::dyadic(22);
  const System b = AdicSystem(base);
  const System e = AdicSystem(base, Cocycle::rudin_shapiro());
  const auto seq = CandidateSequence::tower_heights(b, 10);
  const auto ab = rigidity_along(b, seq, 1, 4, 10);
  const auto ae = rigidity_along(e, seq, 1, 4, 10);
  const Verdict v = halving_check(ab.alpha, ae.alpha, make_rational(1, 100));
  const bool ok = v == Verdict::Pass && ab.alpha && *ab.alpha == RationalInterval::point(Rational(1)) && ae.alpha &&
                  ae.alpha->max_distance_to(make_rational(1, 2)) <= make_rational(1, 100);
  return {ok, "alpha_base " + (ab.alpha ? to_string(*ab.alpha) : "n/c") + ", alpha_ext " +
                  (ae.alpha ? to_string(*ae.alpha) : "n/c") + ", halving " + to_string(v)};
}

Outcome criterion7() {
  std::mt19937_64 rng(7);
  static const std::vector<std::vector<std::uint32_t>> patterns = {{2}, {3}, {3, 2}, {2, 3}, {2, 2, 3}};
  int agree = 0, monotone = 0, compared = 0;
  std::string first_bad;
  for (int trial = 0; trial < 50; ++trial) {
    const auto& pat = patterns[rng() % patterns.size()];
    const int n = 10 + static_cast<int>(rng() % 7);
    DigitSystem base(pat, n);
    System sys = AdicSystem(base);
    switch (rng() % 4) {
      case 1: if (base.is_dyadic()) sys = AdicSystem(base, Cocycle::morse()); break;
      case 2: if (base.is_dyadic()) sys = AdicSystem(base, Cocycle::rudin_shapiro()); break;
      case 3: sys = AdicSystem(base, Cocycle::zero(2)); break;
      default: break;
    }
    const std::size_t count = static_cast<std::size_t>(n);
    CandidateSequence seq = CandidateSequence::tower_heights(sys, count);
    switch (rng() % 3) {
      case 1: seq = CandidateSequence::tower_heights(sys, count, 1 + rng() % 3); break;
      case 2: {
        std::vector<std::uint64_t> v;
        for (int i = 2; i <= n; ++i) v.push_back(base.block_size(i) * (1 + rng() % 2) % base.modulus() + 1);
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        seq = CandidateSequence::explicit_list(v);
        break;
      }
      default: break;
    }
    int d_max = 1 + static_cast<int>(rng() % 8);
    while (matrix_cells(sys, d_max) > kMaxMatrixCells) --d_max;
    const std::size_t i_max = 4 + rng() % 8;
    const auto op = rigidity_along(sys, seq, 0, d_max, i_max);
    const auto st = set_based_alpha(sys, seq, 0, d_max, i_max);
    bool ok = true;
    for (std::size_t i = 0; i < op.depths.size(); ++i) {
      const auto& x = op.depths[i].beta;
      const auto& y = st.depths[i].beta;
      ++compared;
      if (abs(Rational(x.midpoint() - y.midpoint())) > x.width() + y.width()) ok = false;
    }
    agree += ok;
    monotone += op.monotone && st.monotone;
    if ((!ok || !op.monotone || !st.monotone) && first_bad.empty())
      first_bad = " first failure: trial " + std::to_string(trial) + " " + describe(sys) + " " + seq.label();
  }
  return {agree == 50 && monotone == 50, std::to_string(agree) + "/50 agree (" + std::to_string(compared) +
                                             " depth estimates), " + std::to_string(monotone) + "/50 monotone" +
                                             first_bad};
}

Outcome criterion8() {
  std::mt19937_64 rng(8);
  static const std::vector<std::vector<std::uint32_t>> patterns = {{2}, {3}, {3, 2}, {2, 3}, {2, 2, 3}, {5}};
  int equal = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto& pat = patterns[rng() % patterns.size()];
    int n = 2 + static_cast<int>(rng() % 11);
    while (DigitSystem(pat, n).modulus() > 4096) --n;
    const DigitSystem base(pat, n);
    AdicSystem sys(base);
    switch (rng() % 5) {
      case 1: if (base.is_dyadic()) sys = AdicSystem(base, Cocycle::morse()); break;
      case 2: if (base.is_dyadic() && n > 2) sys = AdicSystem(base, Cocycle::rudin_shapiro()); break;
      case 3: sys = AdicSystem(base, Cocycle::zero(1 + static_cast<std::uint32_t>(rng() % 4))); break;
      default: break;
    }
    auto random_set = [&](int d) {
      std::vector<std::uint64_t> cells;
      for (std::uint64_t a = 0; a < base.block_size(d); ++a)
        if (rng() % 2) cells.push_back(a);
      std::vector<std::uint32_t> fiber;
      for (std::uint32_t y = 0; y < sys.fiber(); ++y)
        if (rng() % 2) fiber.push_back(y);
      return FiberedCylinder(CylinderSet(base, d, cells), fiber, sys.fiber());
    };
    const auto A = random_set(static_cast<int>(rng() % std::min(n + 1, 5)));
    const auto B = random_set(static_cast<int>(rng() % std::min(n + 1, 5)));
    const std::uint64_t k = rng() % 65;
    equal += correlation(sys, A, B, k) == oracle_correlation(sys, A, B, k);
  }
  return {equal == 1000, std::to_string(equal) + "/1000 exact interval matches"};
}

Outcome criterion9() {
  const AdicSystem dy(DigitSystem::dyadic(16));
  FiberFunction f;
  f.depth = 1;
  f.cells = 2;
  f.values = {make_rational(1, 2), make_rational(-1, 2)};
  const auto s = autocorrelation_series(dy, f, 64, false);
  bool exact = true;
  for (std::size_t K = 1; K <= 64; ++K) exact = exact && wiener_average(s, K).value == RationalInterval::point(make_rational(1, 16));

  const AdicSystem rs(DigitSystem::dyadic(20), Cocycle::rudin_shapiro());
  const auto sr = autocorrelation_series(rs, FiberFunction::fiber_sign(2), 64, false, 4);
  const auto w = wiener_average(sr, 64);
  return {exact && w.value.hi <= w.slack,
          std::string("dyadic 1/16 for K=1..64: ") + (exact ? "yes" : "no") + "; RS " + iv(w.value) + " <= slack " +
              dec(w.slack)};
}

// Regression constant: Chacon mu(T^{h_n} L ∩ L), L the stage-1 level, at n = 6 on stage 9.
Outcome criterion10() {
  std::mt19937_64 rng(10);
  int same = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const std::uint64_t hn = std::uint64_t{1} << (n - 1);
    std::vector<std::uint64_t> a, b;
    for (std::uint64_t l = 0; l < hn; ++l) {
      if (rng() % 2) a.push_back(l);
      if (rng() % 2) b.push_back(l);
    }
    const int m = n + 1 + static_cast<int>(rng() % 5);
    const std::uint64_t k = rng() % (std::uint64_t{1} << (m - 1));
    const auto tower = tower_correlation(RankOneSchedule::dyadic(), n, a, b, k, m);
    const AdicSystem adic(DigitSystem::dyadic(m - 1));
    const auto fa = FiberedCylinder::full(CylinderSet(adic.base(), n - 1, a), 1);
    const auto fb = FiberedCylinder::full(CylinderSet(adic.base(), n - 1, b), 1);
    same += tower.value == correlation(adic, fa, fb, k);
  }

  const auto chacon = RankOneSchedule::chacon();
  const std::uint64_t level[] = {0};
  bool nested = true, narrow = true;
  std::string trail;
  for (int n = 2; n <= 6; ++n) {
    const std::uint64_t k = tower_height(chacon, n);
    RationalInterval prev;
    for (int m = n + 1; m <= n + 4; ++m) {
      const auto c = tower_correlation(chacon, 1, level, k, m);
      if (m > n + 1 && !prev.contains(c.value)) nested = false;
      if (c.value.width() > from_u64(k) / from_u64(tower_height(chacon, m))) narrow = false;
      prev = c.value;
    }
    trail += " n=" + std::to_string(n) + ":" + iv(prev);
  }
  const auto pinned = tower_correlation(chacon, 1, level, tower_height(chacon, 6), 9).value;
  const RationalInterval expected(make_rational(9464, 19683), make_rational(9950, 19683));
  const bool pin_ok = pinned == expected;
  return {same == 200 && nested && narrow && pin_ok,
          std::to_string(same) + "/200 dyadic tower=residue, nested " + (nested ? "yes" : "no") + ", width ok " +
              (narrow ? "yes" : "no") + ", pinned " + to_string(pinned) + (pin_ok ? "" : " (expected " + to_string(expected) + ")") +
              ";" + trail};
}

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
  try {
    criterion(1, "adic 1-rigidity", 5, criterion1);
    criterion(2, "cocycle oracles", 10, criterion2);
    criterion(3, "Morse rho(1)", 5, criterion3);
    criterion(4, "Lebesgue flatness", 60, criterion4);
    criterion(5, "extension residual", 0, criterion5);
    criterion(6, "halving", 0, criterion6);
    criterion(7, "operator/set agreement", 0, criterion7);
    criterion(8, "oracle equivalence", 120, criterion8);
    criterion(9, "Wiener average", 0, criterion9);
    criterion(10, "rank-one sanity", 0, criterion10);
  } catch (const std::exception& e) {
    std::printf("ERROR %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed\n", failures);
  return strict && failures > 0 ? 1 : 0;
}
