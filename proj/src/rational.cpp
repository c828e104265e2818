#include "rigidlab/rational.hpp"

#include <cstdio>
#include <stdexcept>

namespace rigidlab {

Rational make_rational(std::int64_t num, std::uint64_t den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  mpz_class n;
  mpz_class d;
  // mpz from 64-bit values without going through long (portable to LLP64).
  mpz_import(d.get_mpz_t(), 1, -1, sizeof(den), 0, 0, &den);
  std::uint64_t mag = num < 0 ? static_cast<std::uint64_t>(-(num + 1)) + 1 : static_cast<std::uint64_t>(num);
  mpz_import(n.get_mpz_t(), 1, -1, sizeof(mag), 0, 0, &mag);
  if (num < 0) n = -n;
  Rational r(n, d);
  r.canonicalize();
  return r;
}

Rational from_u64(std::uint64_t v) {
  mpz_class n;
  mpz_import(n.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
  return Rational(n);
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t start = s.find_first_not_of(" \t");
  if (start == std::string::npos) throw std::invalid_argument("empty rational");
  s = s.substr(start);

  auto check_int = [](const std::string& part, bool allow_sign) {
    if (part.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (part[0] == '-' || part[0] == '+')) i = 1;
    if (i == part.size()) return false;
    for (; i < part.size(); ++i)
      if (part[i] < '0' || part[i] > '9') return false;
    return true;
  };

  if (auto slash = s.find('/'); slash != std::string::npos) {
    std::string num = s.substr(0, slash);
    std::string den = s.substr(slash + 1);
    if (!check_int(num, true) || !check_int(den, false))
      throw std::invalid_argument("malformed rational '" + s + "'");
    mpz_class n(num[0] == '+' ? num.substr(1) : num);
    mpz_class d(den);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    Rational r(n, d);
    r.canonicalize();
    return r;
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole = whole.substr(1);
    if (whole.empty()) whole = "0";
    if (!check_int(whole, false) || (!frac.empty() && !check_int(frac, false)))
      throw std::invalid_argument("malformed decimal '" + s + "'");
    mpz_class scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    mpz_class n = mpz_class(whole) * scale + (frac.empty() ? mpz_class(0) : mpz_class(frac));
    if (negative) n = -n;
    Rational r(n, scale);
    r.canonicalize();
    return r;
  }
  if (!check_int(s, true)) throw std::invalid_argument("malformed rational '" + s + "'");
  return Rational(mpz_class(s[0] == '+' ? s.substr(1) : s));
}

std::string to_fraction(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string to_decimal(const Rational& r, int significant) {
  // mpf with enough precision that the printed digits are those of the exact value.
  mpf_class f(r, 256);
  mp_exp_t exp = 0;
  std::string digits = f.get_str(exp, 10, static_cast<std::size_t>(significant));
  if (digits.empty() || digits == "0") return "0";
  bool negative = digits[0] == '-';
  if (negative) digits = digits.substr(1);
  std::string out;
  if (exp <= 0) {
    out = "0." + std::string(static_cast<std::size_t>(-exp), '0') + digits;
  } else if (static_cast<std::size_t>(exp) >= digits.size()) {
    out = digits + std::string(static_cast<std::size_t>(exp) - digits.size(), '0');
  } else {
    out = digits.substr(0, static_cast<std::size_t>(exp)) + "." + digits.substr(static_cast<std::size_t>(exp));
  }
  return negative ? "-" + out : out;
}

Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

Rational pow2(int exponent) {
  mpz_class p = 1;
  if (exponent >= 0) {
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(exponent));
    return Rational(p);
  }
  mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(-exponent));
  return Rational(mpz_class(1), p);
}

RationalInterval::RationalInterval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
  if (hi < lo) throw std::invalid_argument("interval with hi < lo");
}

Rational RationalInterval::magnitude() const {
  Rational a = rigidlab::abs(lo);
  Rational b = rigidlab::abs(hi);
  return a < b ? b : a;
}

Rational RationalInterval::distance_to(const Rational& target) const {
  if (target < lo) return lo - target;
  if (target > hi) return target - hi;
  return Rational(0);
}

Rational RationalInterval::max_distance_to(const Rational& target) const {
  Rational a = rigidlab::abs(lo - target);
  Rational b = rigidlab::abs(hi - target);
  return a < b ? b : a;
}

RationalInterval& RationalInterval::operator+=(const RationalInterval& o) {
  lo += o.lo;
  hi += o.hi;
  return *this;
}

RationalInterval& RationalInterval::operator-=(const RationalInterval& o) {
  lo -= o.hi;
  hi -= o.lo;
  return *this;
}

bool operator==(const RationalInterval& a, const RationalInterval& b) {
  return a.lo == b.lo && a.hi == b.hi;
}

RationalInterval operator+(RationalInterval a, const RationalInterval& b) { return a += b; }
RationalInterval operator-(RationalInterval a, const RationalInterval& b) { return a -= b; }

RationalInterval operator*(const RationalInterval& a, const Rational& c) {
  if (c >= 0) return {a.lo * c, a.hi * c};
  return {a.hi * c, a.lo * c};
}

RationalInterval operator/(const RationalInterval& a, const Rational& c) {
  if (c == 0) throw std::invalid_argument("interval division by zero");
  return a * (1 / c);
}

RationalInterval hull(const RationalInterval& a, const RationalInterval& b) {
  return {a.lo < b.lo ? a.lo : b.lo, a.hi < b.hi ? b.hi : a.hi};
}

std::string to_string(const RationalInterval& iv) {
  return "[" + to_fraction(iv.lo) + ", " + to_fraction(iv.hi) + "]";
}

}  // namespace rigidlab
