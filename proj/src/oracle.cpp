#include "rigidlab/oracle.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rigidlab/errors.hpp"

namespace rigidlab {
namespace {

struct Walker {
  const DigitSystem& sys;
  const Cocycle& c;
  std::vector<std::uint32_t> digits;
  std::uint32_t shift = 0;
  bool open = false;

  Walker(const DigitSystem& s, const Cocycle& coc, std::uint64_t residue)
      : sys(s), c(coc), digits(static_cast<std::size_t>(s.depth())) {
    for (int i = 0; i < s.depth(); ++i) {
      digits[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(residue % s.radix(i + 1));
      residue /= s.radix(i + 1);
    }
  }

  std::optional<std::uint32_t> phi(int t) const {
    const int n = sys.depth();
    const std::uint32_t m = c.modulus();
    auto d = [&](int pos) { return digits[static_cast<std::size_t>(pos - 1)]; };  // 1-based
    switch (c.rule()) {
      case CocycleRule::Zero:
        return 0u;
      case CocycleRule::Morse:
        if (t == n) return std::nullopt;
        return static_cast<std::uint32_t>((1 + t) % 2);
      case CocycleRule::RudinShapiro:
        if (t + 2 > n) return std::nullopt;
        return static_cast<std::uint32_t>((d(t + 2) + (t >= 1 ? t - 1 : 0)) % 2);
      case CocycleRule::Table: {
        const CocycleTable& tab = *c.table();
        if (t == n || t + tab.lookahead > n) return std::nullopt;
        std::vector<std::uint32_t> w;
        for (int i = 1; i <= tab.lookahead; ++i) w.push_back(d(t + i));
        if (t < tab.t_max) {
          auto it = tab.entries.find({t, w});
          if (it == tab.entries.end()) throw ConfigError("cocycle table has no entry for t = " + std::to_string(t));
          return it->second % m;
        }
        std::uint64_t v = static_cast<std::uint64_t>(tab.tail.carry_coeff) * static_cast<std::uint64_t>(t) +
                          tab.tail.constant;
        for (std::size_t i = 0; i < tab.tail.digit_weights.size() && i < w.size(); ++i)
          v += static_cast<std::uint64_t>(tab.tail.digit_weights[i]) * w[i];
        return static_cast<std::uint32_t>(v % m);
      }
    }
    return std::nullopt;
  }

  void step() {
    int t = 0;
    const int n = sys.depth();
    while (t < n && digits[static_cast<std::size_t>(t)] == sys.radix(t + 1) - 1) ++t;
    auto v = phi(t);
    if (v) {
      shift = (shift + *v) % c.modulus();
    } else {
      open = true;
    }
    for (int i = 0; i < t; ++i) digits[static_cast<std::size_t>(i)] = 0;
    if (t < n) ++digits[static_cast<std::size_t>(t)];
  }

  std::uint64_t cell(int depth) const {
    std::uint64_t r = 0;
    for (int i = depth; i >= 1; --i) r = r * sys.radix(i) + digits[static_cast<std::size_t>(i - 1)];
    return r;
  }
};

void check_budget(const DigitSystem& sys, std::uint64_t k) {
  const std::uint64_t size = sys.modulus();
  if (k != 0 && size > kMaxOracleSteps / std::max<std::uint64_t>(k, 1))
    throw ResourceError("oracle request of B_N * k = " + std::to_string(size) + " * " + std::to_string(k) +
                        " steps exceeds the bound");
}

}  // namespace

RationalInterval oracle_correlation(const AdicSystem& sys, const FiberedCylinder& a, const FiberedCylinder& b,
                                    std::uint64_t k) {
  const DigitSystem& base = sys.base();
  const std::uint32_t m = sys.fiber();
  if (a.modulus != m || b.modulus != m) throw std::invalid_argument("fiber modulus mismatch");
  check_budget(base, k);
  std::uint64_t lo = 0, hi = 0;
  for (std::uint64_t x = 0; x < base.modulus(); ++x) {
    Walker w(base, sys.cocycle(), x);
    if (!a.base.contains(w.cell(a.base.depth()))) continue;
    for (std::uint64_t i = 0; i < k; ++i) w.step();
    if (!b.base.contains(w.cell(b.base.depth()))) continue;
    auto hits = [&](std::uint32_t g) {
      std::uint64_t n = 0;
      for (auto y : a.fiber) n += b.fiber_contains((y + g) % m) ? 1 : 0;
      return n;
    };
    if (!w.open) {
      lo += hits(w.shift);
      hi += hits(w.shift);
    } else {
      std::uint64_t mn = a.fiber.size(), mx = 0;
      for (std::uint32_t g = 0; g < m; ++g) {
        mn = std::min(mn, hits(g));
        mx = std::max(mx, hits(g));
      }
      lo += mn;
      hi += mx;
    }
  }
  const Rational denom = from_u64(base.modulus()) * from_u64(m);
  return RationalInterval(from_u64(lo) / denom, from_u64(hi) / denom);
}

RationalInterval oracle_autocorrelation(const AdicSystem& sys, const FiberFunction& f, std::uint64_t k) {
  const DigitSystem& base = sys.base();
  const std::uint32_t m = sys.fiber();
  if (f.fiber != m) throw std::invalid_argument("fiber modulus mismatch");
  check_budget(base, k);
  Rational lo = 0, hi = 0;
  for (std::uint64_t x = 0; x < base.modulus(); ++x) {
    Walker w(base, sys.cocycle(), x);
    const std::uint64_t src = w.cell(f.depth);
    for (std::uint64_t i = 0; i < k; ++i) w.step();
    const std::uint64_t dst = w.cell(f.depth);
    auto term = [&](std::uint32_t g) {
      Rational s = 0;
      for (std::uint32_t y = 0; y < m; ++y) s += f.at(src, y) * f.at(dst, (y + g) % m);
      return s;
    };
    if (!w.open) {
      Rational t = term(w.shift);
      lo += t;
      hi += t;
    } else {
      Rational mn = term(0), mx = mn;
      for (std::uint32_t g = 1; g < m; ++g) {
        Rational t = term(g);
        mn = std::min(mn, t);
        mx = std::max(mx, t);
      }
      lo += mn;
      hi += mx;
    }
  }
  const Rational denom = from_u64(base.modulus()) * from_u64(m);
  return RationalInterval(lo / denom, hi / denom);
}

RationalInterval oracle_tower_correlation(const RankOneSchedule& sched, int n,
                                          std::span<const std::uint64_t> levels_a,
                                          std::span<const std::uint64_t> levels_b, std::uint64_t k, int m) {
  if (n < 1 || m <= n) throw std::invalid_argument("oracle tower correlation requires 1 <= n < m");
  // Stage-n tower as a list of labels, then literal cutting and stacking.
  std::uint64_t hn = sched.initial_height();
  Rational width = 1;
  for (int s = 1; s < n; ++s) {
    hn = hn * sched.recipe(s).cuts + sched.recipe(s).spacer_total();
    width /= sched.recipe(s).cuts;
  }
  std::vector<std::int64_t> tower(hn);
  for (std::uint64_t i = 0; i < hn; ++i) tower[i] = static_cast<std::int64_t>(i);
  for (int s = n; s < m; ++s) {
    const StageRecipe& r = sched.recipe(s);
    std::vector<std::int64_t> next;
    for (std::uint32_t c = 0; c < r.cuts; ++c) {
      next.insert(next.end(), tower.begin(), tower.end());
      next.insert(next.end(), r.spacers[c], -1);
    }
    tower = std::move(next);
    width /= r.cuts;
    if (tower.size() > kDefaultMaxTowerHeight) throw ResourceError("oracle tower exceeds the height bound");
  }
  const std::uint64_t h = tower.size();
  if (k >= h) throw std::invalid_argument("lag is not below the tower height");
  const bool wrap = sched.spacer_free_from(m);
  auto in = [](std::span<const std::uint64_t> set, std::int64_t label) {
    return label >= 0 && std::find(set.begin(), set.end(), static_cast<std::uint64_t>(label)) != set.end();
  };

  std::uint64_t det = 0, open = 0;
  for (std::uint64_t i = 0; i < h; ++i) {
    if (!in(levels_a, tower[i])) continue;
    std::uint64_t pos = i;
    bool lost = false;
    for (std::uint64_t s = 0; s < k; ++s) {
      if (pos + 1 < h) {
        ++pos;
      } else if (wrap) {
        pos = 0;
      } else {
        lost = true;
        break;
      }
    }
    if (lost) {
      ++open;
    } else if (in(levels_b, tower[pos])) {
      ++det;
    }
  }
  const Rational mass = sched.limit_mass();
  return RationalInterval(from_u64(det) * width / mass, from_u64(det + open) * width / mass);
}

}  // namespace rigidlab
