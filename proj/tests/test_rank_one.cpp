#include <doctest.h>

#include <numeric>
#include <random>

#include "rigidlab/koopman.hpp"
#include "rigidlab/oracle.hpp"
#include "rigidlab/rank_one.hpp"

using namespace rigidlab;

TEST_SUITE("rank_one") {
  TEST_CASE("stage heights") {
    const auto chacon = RankOneSchedule::chacon();
    const std::uint64_t want[] = {1, 4, 13, 40, 121};
    for (int n = 1; n <= 5; ++n) CHECK(tower_height(chacon, n) == want[n - 1]);
    for (int n = 1; n <= 4; ++n) CHECK(tower_height(RankOneSchedule::dyadic(), n) == (std::uint64_t{1} << (n - 1)));
    auto t = build_tower(chacon, 1);
    CHECK(t.height == 1);
    CHECK(t.embeddings.empty());
  }

  TEST_CASE("chacon embeddings and masses") {
    auto t = build_tower(RankOneSchedule::chacon(), 3);
    CHECK(t.height == 13);
    CHECK(t.embeddings[1] == std::vector<std::uint64_t>{0, 4, 9});
    CHECK(t.level_width == make_rational(1, 9));
    CHECK(t.total_mass == make_rational(13, 9));
    CHECK(RankOneSchedule::chacon().limit_mass() == make_rational(3, 2));
    CHECK(RankOneSchedule::dyadic().limit_mass() == 1);
  }

  TEST_CASE("limit mass of a finite spacer prefix") {
    RankOneSchedule s(2, {StageRecipe{2, {0, 3}}, StageRecipe{2, {0, 0}}});
    // stage 2 has height 7 and width 1/2; no spacers afterwards
    CHECK(s.limit_mass() == make_rational(7, 2));
    CHECK(s.spacer_free_from(2));
    CHECK_FALSE(s.spacer_free_from(1));
  }

  TEST_CASE("lag zero gives the measure") {
    const auto chacon = RankOneSchedule::chacon();
    const std::uint64_t levels[] = {0, 2};
    auto c = tower_correlation(chacon, 2, levels, 0, 5);
    CHECK(c.value.is_point());
    CHECK(c.value.lo == make_rational(2, 3) / make_rational(3, 2));
  }

  TEST_CASE("dyadic bottom half moved by half the tower") {
    // An 8-level dyadic tower is stage 4 when stage 1 has one level.
    std::vector<std::uint64_t> half{0, 1, 2, 3};
    auto c = tower_correlation(RankOneSchedule::dyadic(), 4, half, 4, 5);
    CHECK(c.value.contains(Rational(0)));
    CHECK(c.value.width() <= make_rational(4, 16));
    CHECK(c.wrapped_exactly);
  }

  TEST_CASE("chacon level 0 at lag h_2 matches the list oracle") {
    const std::uint64_t a[] = {0};
    auto c = tower_correlation(RankOneSchedule::chacon(), 2, a, 4, 5);
    CHECK(c.value == oracle_tower_correlation(RankOneSchedule::chacon(), 2, a, a, 4, 5));
    CHECK_FALSE(c.wrapped_exactly);
  }

  TEST_CASE("intervals nest as the expansion stage grows") {
    std::mt19937_64 rng(5);
    const auto chacon = RankOneSchedule::chacon();
    for (int trial = 0; trial < 60; ++trial) {
      const int n = 1 + static_cast<int>(rng() % 3);
      const std::uint64_t hn = tower_height(chacon, n);
      std::vector<std::uint64_t> a, b;
      for (std::uint64_t l = 0; l < hn; ++l) {
        if (rng() % 2) a.push_back(l);
        if (rng() % 2) b.push_back(l);
      }
      const int m = n + 1 + static_cast<int>(rng() % 3);
      const std::uint64_t k = rng() % tower_height(chacon, m);
      auto lo = tower_correlation(chacon, n, a, b, k, m);
      auto hi = tower_correlation(chacon, n, a, b, k, m + 1);
      CHECK(lo.value.contains(hi.value));
      CHECK(lo.value == oracle_tower_correlation(chacon, n, a, b, k, m));
    }
  }

  TEST_CASE("chacon width at k = h_n is at most k / h_m") {
    const auto chacon = RankOneSchedule::chacon();
    const std::uint64_t a[] = {0};
    for (int n = 2; n <= 4; ++n) {
      const std::uint64_t k = tower_height(chacon, n);
      for (int m = n + 1; m <= n + 3; ++m) {
        auto c = tower_correlation(chacon, n, a, k, m);
        CHECK(c.value.width() <= from_u64(k) / from_u64(tower_height(chacon, m)));
      }
    }
  }

  TEST_CASE("dyadic rank-one equals the residue path") {
    // Stage-n level l is the residue l mod 2^(n-1) of the dyadic odometer.
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 1 + static_cast<int>(rng() % 5);
      const std::uint64_t hn = std::uint64_t{1} << (n - 1);
      std::vector<std::uint64_t> a, b;
      for (std::uint64_t l = 0; l < hn; ++l) {
        if (rng() % 2) a.push_back(l);
        if (rng() % 2) b.push_back(l);
      }
      const int m = n + 1 + static_cast<int>(rng() % 4);
      const std::uint64_t k = rng() % (std::uint64_t{1} << (m - 1));
      const auto tower = tower_correlation(RankOneSchedule::dyadic(), n, a, b, k, m);
      const AdicSystem adic(DigitSystem::dyadic(m - 1 > 0 ? m - 1 : 1));
      const int d = n - 1;
      const auto fa = FiberedCylinder::full(CylinderSet(adic.base(), d, a), 1);
      const auto fb = FiberedCylinder::full(CylinderSet(adic.base(), d, b), 1);
      CHECK(tower.value == correlation(adic, fa, fb, k));
    }
  }

  TEST_CASE("resource and argument bounds") {
    CHECK_THROWS(tower_height(RankOneSchedule::chacon(), 40));
    const std::uint64_t a[] = {0};
    CHECK_THROWS_AS(tower_correlation(RankOneSchedule::chacon(), 2, a, 40, 4), std::invalid_argument);
    CHECK_THROWS(RankOneSchedule(1, {StageRecipe{1, {0}}}));
    CHECK_THROWS(RankOneSchedule(1, {StageRecipe{3, {0, 1}}}));
  }
}
