#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace rigidlab {

using Rational = mpq_class;

Rational make_rational(std::int64_t num, std::uint64_t den = 1);
Rational from_u64(std::uint64_t v);

/// Parses "p/q", "p", or a finite decimal such as "0.01" into an exact rational.
/// Throws std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// Always "p/q", including integers ("1/1", "0/1").
std::string to_fraction(const Rational& r);
std::string to_decimal(const Rational& r, int significant = 12);

Rational abs(const Rational& r);
Rational pow2(int exponent);

/// Closed interval of exact rationals. Undetermined orbit mass shows up as width.
struct RationalInterval {
  Rational lo;
  Rational hi;

  RationalInterval() = default;
  RationalInterval(Rational l, Rational h);
  static RationalInterval point(const Rational& v) { return {v, v}; }

  Rational width() const { return hi - lo; }
  Rational midpoint() const { return (lo + hi) / 2; }
  bool is_point() const { return lo == hi; }
  bool contains(const Rational& v) const { return lo <= v && v <= hi; }
  bool contains(const RationalInterval& inner) const {
    return lo <= inner.lo && inner.hi <= hi;
  }
  /// max(|lo|, |hi|)
  Rational magnitude() const;
  /// Smallest |v - target| over v in the interval.
  Rational distance_to(const Rational& target) const;
  /// Largest |v - target| over v in the interval.
  Rational max_distance_to(const Rational& target) const;

  RationalInterval& operator+=(const RationalInterval& o);
  RationalInterval& operator-=(const RationalInterval& o);
};

bool operator==(const RationalInterval& a, const RationalInterval& b);
inline bool operator!=(const RationalInterval& a, const RationalInterval& b) { return !(a == b); }
RationalInterval operator+(RationalInterval a, const RationalInterval& b);
RationalInterval operator-(RationalInterval a, const RationalInterval& b);
RationalInterval operator*(const RationalInterval& a, const Rational& c);
RationalInterval operator/(const RationalInterval& a, const Rational& c);
RationalInterval hull(const RationalInterval& a, const RationalInterval& b);

/// "[p/q, r/s]"
std::string to_string(const RationalInterval& iv);

}  // namespace rigidlab
