#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rigidlab/oracle.hpp"
#include "rigidlab/spectral.hpp"

using namespace rigidlab;

namespace {

FiberFunction first_digit_sign() {
  FiberFunction f;
  f.depth = 1;
  f.cells = 2;
  f.fiber = 1;
  f.values = {Rational(1), Rational(-1)};
  return f;
}

CorrelationSeries exact(std::vector<Rational> rho) {
  CorrelationSeries s;
  for (auto& r : rho) s.rho.push_back(RationalInterval::point(r));
  return s;
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("first-digit sign alternates") {
    const AdicSystem sys(DigitSystem::dyadic(10));
    const auto s = autocorrelation_series(sys, first_digit_sign(), 12, false);
    REQUIRE(s.rho.size() == 13);
    for (std::size_t k = 0; k <= 12; ++k) CHECK(s.rho[k] == RationalInterval::point(Rational(k % 2 ? -1 : 1)));
  }

  TEST_CASE("Morse rho(1) encloses -1/3") {
    const AdicSystem sys(DigitSystem::dyadic(20), Cocycle::morse());
    const auto s = autocorrelation_series(sys, FiberFunction::fiber_sign(2), 1, false);
    CHECK(s.rho[0] == RationalInterval::point(Rational(1)));
    CHECK(s.rho[1].contains(make_rational(-1, 3)));
    CHECK(s.rho[1].width() <= pow2(-18));
  }

  TEST_CASE("Rudin-Shapiro correlations match the oracle and vanish") {
    const AdicSystem sys(DigitSystem::dyadic(12), Cocycle::rudin_shapiro());
    const auto f = FiberFunction::fiber_sign(2);
    const auto s = autocorrelation_series(sys, f, 24, false, 3);
    for (std::size_t k = 0; k <= 24; ++k) {
      CHECK(s.rho[k] == oracle_autocorrelation(sys, f, k));
      if (k > 0) CHECK(s.rho[k].contains(Rational(0)));
    }
  }

  TEST_CASE("threads do not change the series") {
    const AdicSystem sys(DigitSystem({3, 2}, 9), Cocycle::zero(3));
    FiberFunction f;
    f.depth = 2;
    f.cells = 6;
    f.fiber = 3;
    for (int i = 0; i < 18; ++i) f.values.push_back(make_rational(i % 5 - 2, 1 + i % 3));
    const auto one = autocorrelation_series(sys, f, 40, true, 1);
    const auto four = autocorrelation_series(sys, f, 40, true, 4);
    CHECK(one.rho == four.rho);
    CHECK(one.mean_removed == four.mean_removed);
  }

  TEST_CASE("Fejer sums of simple series") {
    auto delta = exact({Rational(1), Rational(0), Rational(0), Rational(0)});
    auto est = fejer_density(delta, 4, 64);
    for (double v : est.density) CHECK(v == doctest::Approx(1.0));
    CHECK(flatness_test(est, delta).consistent_with_flat);

    std::vector<Rational> alt, one;
    for (int k = 0; k < 8; ++k) {
      alt.push_back(Rational(k % 2 ? -1 : 1));
      one.push_back(Rational(1));
    }
    const auto a = fejer_density(exact(alt), 8, 64);
    const auto c = fejer_density(exact(one), 8, 64);
    for (std::size_t j = 0; j < a.theta.size(); ++j) {
      if (std::abs(a.theta[j] - std::numbers::pi) < 1e-12) CHECK(a.density[j] == doctest::Approx(8.0));
      if (std::abs(c.theta[j]) < 1e-12) CHECK(c.density[j] == doctest::Approx(8.0));
    }
    CHECK_FALSE(flatness_test(c, exact(one)).consistent_with_flat);
    CHECK_THROWS_AS(fejer_density(delta, 5, 64), std::invalid_argument);
    CHECK_THROWS_AS(fejer_density(delta, 4, 4), std::invalid_argument);
  }

  TEST_CASE("density invariants") {
    const AdicSystem sys(DigitSystem::dyadic(16), Cocycle::morse());
    const auto s = autocorrelation_series(sys, FiberFunction::fiber_sign(2), 31, false, 2);
    const auto est = fejer_density(s, 32, 256);
    CHECK(est.min_density >= -(est.slack + est.rounding));
    CHECK(std::abs(est.grid_mean - est.rho0) <= est.slack + est.rounding + 1e-9);
    const auto flat = flatness_test(est, s);
    CHECK(flat.bound_holds);
    CHECK_FALSE(flat.consistent_with_flat);
  }

  TEST_CASE("Rudin-Shapiro spectrum is flat and correlations decay") {
    const AdicSystem sys(DigitSystem::dyadic(18), Cocycle::rudin_shapiro());
    const auto s = autocorrelation_series(sys, FiberFunction::fiber_sign(2), 32, false, 2);
    const auto est = fejer_density(s, 32, 256);
    const auto flat = flatness_test(est, s);
    CHECK(flat.consistent_with_flat);
    CHECK(flat.bound_holds);
    const auto decay = decay_test(s, 4);
    CHECK(decay.within_slack);
    CHECK(decay.certain == 0);
    const auto w = wiener_average(s, 32);
    CHECK(w.value.lo == 0);
    const auto all = decay_test(s, 1);
    CHECK(w.value.hi <= all.sup * all.sup);
  }

  TEST_CASE("decay and Wiener examples") {
    auto s = exact({Rational(1), make_rational(1, 2), make_rational(-1, 4), Rational(0)});
    const auto d = decay_test(s, 1);
    CHECK(d.sup == make_rational(1, 2));
    CHECK(d.argmax == 1);
    CHECK(d.certain == make_rational(1, 2));
    CHECK_FALSE(d.within_slack);
    const auto w = wiener_average(s, 3);
    CHECK(w.value == RationalInterval::point(make_rational(5, 48)));
    CHECK(w.slack == 0);
  }
}
