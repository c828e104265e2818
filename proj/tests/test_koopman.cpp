#include <doctest.h>

#include <random>

#include "rigidlab/errors.hpp"
#include "rigidlab/koopman.hpp"
#include "rigidlab/oracle.hpp"

using namespace rigidlab;

namespace {

FiberedCylinder base_cyl(const DigitSystem& s, int d, std::vector<std::uint64_t> cells) {
  return FiberedCylinder::full(CylinderSet(s, d, std::move(cells)), 1);
}

bool is_permutation_matrix(const JoiningMatrix& m, std::size_t shift) {
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m.size(); ++c)
      if (m.entry(r, c) != RationalInterval::point(Rational(r == (c + shift) % m.size() ? 1 : 0))) return false;
  return true;
}

AdicSystem random_system(std::mt19937_64& rng, int max_depth) {
  static const std::vector<std::vector<std::uint32_t>> patterns = {{2}, {3, 2}, {3}, {2, 2, 3}};
  const auto& pat = patterns[rng() % patterns.size()];
  const int n = 3 + static_cast<int>(rng() % (max_depth - 2));
  DigitSystem base(pat, n);
  switch (rng() % 4) {
    case 0: return AdicSystem(base);
    case 1: return AdicSystem(base, Cocycle::morse());
    case 2: return AdicSystem(base, Cocycle::rudin_shapiro());
    default: return AdicSystem(base, Cocycle::zero(3));
  }
}

FiberedCylinder random_cyl(std::mt19937_64& rng, const AdicSystem& sys, int d) {
  std::vector<std::uint64_t> cells;
  for (std::uint64_t a = 0; a < sys.base().block_size(d); ++a)
    if (rng() % 2) cells.push_back(a);
  std::vector<std::uint32_t> fiber;
  for (std::uint32_t y = 0; y < sys.fiber(); ++y)
    if (rng() % 2) fiber.push_back(y);
  return FiberedCylinder(CylinderSet(sys.base(), d, cells), fiber, sys.fiber());
}

}  // namespace

TEST_SUITE("koopman") {
  TEST_CASE("dyadic correlations") {
    const AdicSystem sys(DigitSystem::dyadic(10));
    const auto a = base_cyl(sys.base(), 1, {0});
    CHECK(correlation(sys, a, a, 1) == RationalInterval::point(Rational(0)));
    CHECK(correlation(sys, a, a, 2) == RationalInterval::point(make_rational(1, 2)));
    const auto b = base_cyl(sys.base(), 2, {0});
    CHECK(correlation(sys, b, b, 4) == RationalInterval::point(make_rational(1, 4)));
    CHECK(oracle_correlation(sys, a, a, 1) == RationalInterval::point(Rational(0)));
    CHECK(oracle_correlation(sys, a, a, 2) == RationalInterval::point(make_rational(1, 2)));
  }

  TEST_CASE("Morse cell correlation matches brute force") {
    const AdicSystem sys(DigitSystem::dyadic(10), Cocycle::morse());
    const FiberedCylinder a(CylinderSet(sys.base(), 1, {0}), {0}, 2);
    const auto fast = correlation(sys, a, a, 1);
    CHECK(fast == oracle_correlation(sys, a, a, 1));
    CHECK(fast == RationalInterval::point(Rational(0)));  // x_1 = 0 moves to x_1 = 1
  }

  TEST_CASE("RS cell return approaches mu(A)/2") {
    const AdicSystem sys(DigitSystem::dyadic(18), Cocycle::rudin_shapiro());
    const FiberedCylinder a(CylinderSet(sys.base(), 1, {0}), {0}, 2);
    for (int n = 2; n <= 8; ++n) {
      const auto v = correlation(sys, a, a, std::uint64_t{1} << n);
      CHECK(v.contains(make_rational(1, 8)));
      CHECK(v.width() <= pow2(n + 2 - 18));
    }
  }

  TEST_CASE("oracle equivalence on random inputs") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 150; ++trial) {
      const AdicSystem sys = random_system(rng, 9);
      const int da = static_cast<int>(rng() % 4), db = static_cast<int>(rng() % 4);
      const auto a = random_cyl(rng, sys, std::min(da, sys.base().depth()));
      const auto b = random_cyl(rng, sys, std::min(db, sys.base().depth()));
      const std::uint64_t k = rng() % 65;
      CHECK(correlation(sys, a, b, k) == oracle_correlation(sys, a, b, k));
    }
  }

  TEST_CASE("joining matrix examples") {
    const AdicSystem dy(DigitSystem::dyadic(6));
    CHECK(is_permutation_matrix(joining_matrix(dy, 1, 1), 1));
    CHECK(is_permutation_matrix(joining_matrix(dy, 1, 2), 0));
    CHECK(is_permutation_matrix(joining_matrix(AdicSystem(DigitSystem({3}, 4)), 1, 1), 1));
    CHECK_THROWS_AS(joining_matrix(AdicSystem(DigitSystem::dyadic(14)), 11, 1), ResourceError);
  }

  TEST_CASE("joining matrix sums enclose one") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 40; ++trial) {
      const AdicSystem sys = random_system(rng, 10);
      const int d = static_cast<int>(rng() % std::min(4, sys.base().depth() + 1));
      const auto m = joining_matrix(sys, d, rng() % 300);
      for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(m.row_sum(i).contains(Rational(1)));
        CHECK(m.col_sum(i).contains(Rational(1)));
      }
    }
  }

  TEST_CASE("refinement consistency") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 30; ++trial) {
      const AdicSystem sys = random_system(rng, 10);
      const int d = static_cast<int>(rng() % 3);
      if (d + 1 > sys.base().depth()) continue;
      const std::uint64_t k = rng() % 200;
      const auto coarse = joining_matrix(sys, d, k);
      const auto fine = joining_matrix(sys, d + 1, k);
      const std::uint32_t m = sys.fiber();
      const std::uint64_t bd = sys.base().block_size(d);
      const Rational scale = from_u64(bd) / from_u64(sys.base().block_size(d + 1));
      for (std::size_t r = 0; r < coarse.size(); ++r) {
        for (std::size_t c = 0; c < coarse.size(); ++c) {
          RationalInterval s(Rational(0), Rational(0));
          for (std::size_t fr = 0; fr < fine.size(); ++fr) {
            if ((fr / m) % bd != r / m || fr % m != r % m) continue;
            for (std::size_t fc = 0; fc < fine.size(); ++fc) {
              if ((fc / m) % bd != c / m || fc % m != c % m) continue;
              s += fine.entry(fr, fc);
            }
          }
          CHECK(s * scale == coarse.entry(r, c));
        }
      }
    }
  }

  TEST_CASE("transpose is the inverse power on the base") {
    const AdicSystem sys(DigitSystem({3, 2}, 6));
    for (int d = 1; d <= 3; ++d) {
      const std::uint64_t bd = sys.base().block_size(d);
      for (std::uint64_t k = 1; k < 20; ++k) {
        const auto fwd = joining_matrix(sys, d, k);
        const auto back = joining_matrix(sys, d, bd * (k / bd + 1) - k);
        for (std::size_t r = 0; r < fwd.size(); ++r)
          for (std::size_t c = 0; c < fwd.size(); ++c) CHECK(fwd.entry(r, c) == back.entry(c, r));
      }
    }
  }

  TEST_CASE("matrix entries are cell correlations") {
    const AdicSystem sys(DigitSystem::dyadic(9), Cocycle::rudin_shapiro());
    const auto m = joining_matrix(sys, 2, 7);
    for (std::size_t r = 0; r < m.size(); ++r) {
      for (std::size_t c = 0; c < m.size(); ++c) {
        const FiberedCylinder src(CylinderSet(sys.base(), 2, {c / 2}), {static_cast<std::uint32_t>(c % 2)}, 2);
        const FiberedCylinder dst(CylinderSet(sys.base(), 2, {r / 2}), {static_cast<std::uint32_t>(r % 2)}, 2);
        CHECK(m.entry(r, c) == oracle_correlation(sys, src, dst, 7) * Rational(8));
      }
    }
  }

  TEST_CASE("weak limits of the dyadic odometer") {
    const System sys = AdicSystem(DigitSystem::dyadic(12));
    std::vector<std::uint64_t> pow, shifted;
    for (int n = 1; n <= 10; ++n) {
      pow.push_back(std::uint64_t{1} << n);
      shifted.push_back((std::uint64_t{1} << n) + 1);
    }
    auto wl = weak_limit(sys, 2, pow, 10, pow2(-10));
    CHECK(wl.converged);
    CHECK(wl.movement == 0);
    CHECK(is_permutation_matrix(wl.limit, 0));
    auto ws = weak_limit(sys, 2, shifted, 10, pow2(-10));
    CHECK(ws.converged);
    CHECK(is_permutation_matrix(ws.limit, 1));
    const std::uint64_t big[] = {1u << 13, 1u << 14};
    CHECK_THROWS_AS(weak_limit(sys, 2, big, 5, pow2(-10)), std::invalid_argument);
  }

  TEST_CASE("RS extension limit is I (x) Pi_2") {
    const System sys = AdicSystem(DigitSystem::dyadic(20), Cocycle::rudin_shapiro());
    std::vector<std::uint64_t> pow;
    for (int n = 1; n <= 9; ++n) pow.push_back(std::uint64_t{1} << n);
    auto wl = weak_limit(sys, 2, pow, 9, pow2(-10));
    CHECK(wl.converged);
    for (std::size_t r = 0; r < 8; ++r)
      for (std::size_t c = 0; c < 8; ++c) {
        const auto e = wl.limit.entry(r, c);
        if (r / 2 == c / 2) {
          CHECK(e.contains(make_rational(1, 2)));
          CHECK(e.width() <= pow2(-10));
        } else {
          CHECK(e == RationalInterval::point(Rational(0)));
        }
      }
  }

  TEST_CASE("tower matrices use levels only") {
    const RankOneSystem chacon{RankOneSchedule::chacon(), 6};
    const auto m = joining_matrix(chacon, 2, 4);
    CHECK(m.size() == 4);
    for (std::size_t r = 0; r < m.size(); ++r) CHECK(m.row_sum(r).lo <= 1);
    const RankOneSystem dyadic{RankOneSchedule::dyadic(), 6};
    CHECK(is_permutation_matrix(joining_matrix(dyadic, 3, 1), 1));
  }

  TEST_CASE("projection algebra") {
    const DigitSystem s = DigitSystem::dyadic(6);
    const auto sign = FiberFunction::fiber_sign(2);
    for (const auto& v : project_H0(sign).values) CHECK(v == 0);

    BaseFunction g;
    g.depth = 2;
    g.values = {make_rational(1, 3), Rational(-2), Rational(5), Rational(0)};
    CHECK(project_H0(lift_to_extension(g, 2)).values == g.values);

    const FiberedCylinder a(CylinderSet(s, 1, {0}), {0}, 2);
    const auto pa = project_H0(FiberFunction::indicator(s, a));
    CHECK(pa.values == std::vector<Rational>{make_rational(1, 2), Rational(0)});

    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
      FiberFunction f;
      f.depth = 2;
      f.cells = 4;
      f.fiber = 3;
      for (int i = 0; i < 12; ++i) f.values.push_back(make_rational(static_cast<std::int64_t>(rng() % 19) - 9, 1 + rng() % 5));
      const auto f0 = lift_to_extension(project_H0(f), 3);
      CHECK(project_H0(f0).values == project_H0(f).values);  // idempotent
      CHECK(inner_product(f0, project_H0_perp(f)) == 0);
    }
  }
}
