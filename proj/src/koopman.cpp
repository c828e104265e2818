#include "rigidlab/koopman.hpp"

#include <algorithm>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>

#include "rigidlab/errors.hpp"
#include "rigidlab/simd/kernels.hpp"

namespace rigidlab {

// ---------------------------------------------------------------- AdicSystem

struct AdicSystem::Cache {
  std::once_flag once;
  std::shared_ptr<const OrbitTable> table;
};

AdicSystem::AdicSystem(DigitSystem base) : AdicSystem(std::move(base), Cocycle::zero(1)) {}

AdicSystem::AdicSystem(DigitSystem base, Cocycle cocycle)
    : ext_{std::move(base), std::move(cocycle)}, cache_(std::make_shared<Cache>()) {
  if (ext_.cocycle.lookahead() >= ext_.base.depth() && ext_.cocycle.rule() != CocycleRule::Zero)
    throw ConfigError("working depth " + std::to_string(ext_.base.depth()) +
                      " leaves no room for the cocycle window");
}

std::shared_ptr<const OrbitTable> AdicSystem::orbit_table() const {
  std::call_once(cache_->once, [this] { cache_->table = std::make_shared<const OrbitTable>(ext_); });
  return cache_->table;
}

AdicSystem AdicSystem::with_depth(int depth) const {
  return AdicSystem(ext_.base.with_depth(depth), ext_.cocycle);
}

// ----------------------------------------------------------------- LagEngine

LagEngine::LagEngine(const AdicSystem& sys, int depth) : sys_(sys), depth_(depth) {
  if (depth < 0 || depth > sys.base().depth()) throw std::invalid_argument("depth outside [0, N]");
  if (!sys.trivial_cocycle())
    layout_ = std::make_shared<const ClassLayout>(sys.orbit_table(), sys.base().block_size(depth));
}

ShiftHistogram LagEngine::histogram(std::uint64_t k) const {
  const DigitSystem& base = sys_.base();
  ShiftHistogram h;
  h.depth = depth_;
  h.lag = k;
  h.cells = base.block_size(depth_);
  h.modulus = sys_.fiber();
  h.per_cell = base.modulus() / h.cells;
  h.counts.assign(h.cells * h.modulus, 0);
  h.undetermined.assign(h.cells, 0);

  if (!layout_) {
    for (std::uint64_t a = 0; a < h.cells; ++a) h.counts[a * h.modulus] = h.per_cell;
    return h;
  }

  const OrbitTable& table = layout_->table();
  const std::uint64_t size = table.size();
  const std::uint64_t n = h.per_cell;
  const std::uint32_t m = h.modulus;
  const std::uint64_t k_mod = k % size;
  const std::uint64_t wraps = (k / size) % m;
  const std::uint32_t lag32 =
      static_cast<std::uint32_t>(std::min<std::uint64_t>(k, OrbitTable::kNoGap));

  for (std::uint64_t a = 0; a < h.cells; ++a) {
    const std::uint64_t shifted = a + k_mod;
    const std::uint64_t target = shifted % h.cells;
    const std::uint64_t s = shifted / h.cells;  // in [0, n]
    std::uint64_t* counts = &h.counts[a * m];
    std::uint64_t* open = &h.undetermined[a];

    simd::ShiftKernelArgs args;
    args.gap = layout_->gap(a);
    args.prefix_lo = layout_->prefix(a);
    args.lag = lag32;
    args.modulus = m;
    if (s < n) {
      args.prefix_hi = layout_->prefix(target) + s;
      args.n = n - s;
      args.add = static_cast<std::uint8_t>((wraps * table.total()) % m);
      simd::shift_histogram(args, counts, open);
    }
    if (s > 0) {
      args.prefix_hi = layout_->prefix(target);
      args.prefix_lo = layout_->prefix(a) + (n - s);
      args.gap = layout_->gap(a) + (n - s);
      args.n = s;
      args.add = static_cast<std::uint8_t>(((wraps + 1) * table.total()) % m);
      simd::shift_histogram(args, counts, open);
    }
  }
  return h;
}

// ----------------------------------------------------------- FiberedCylinder

FiberedCylinder::FiberedCylinder(CylinderSet b, std::vector<std::uint32_t> f, std::uint32_t m)
    : base(std::move(b)), fiber(std::move(f)), modulus(m) {
  if (modulus < 1) throw std::invalid_argument("fiber modulus must be >= 1");
  std::sort(fiber.begin(), fiber.end());
  fiber.erase(std::unique(fiber.begin(), fiber.end()), fiber.end());
  if (!fiber.empty() && fiber.back() >= modulus) throw std::invalid_argument("fiber element outside [0, m)");
}

FiberedCylinder FiberedCylinder::full(CylinderSet base, std::uint32_t modulus) {
  std::vector<std::uint32_t> all(modulus);
  for (std::uint32_t y = 0; y < modulus; ++y) all[y] = y;
  return FiberedCylinder(std::move(base), std::move(all), modulus);
}

bool FiberedCylinder::fiber_contains(std::uint32_t y) const {
  return std::binary_search(fiber.begin(), fiber.end(), y);
}

Rational measure(const FiberedCylinder& c) {
  return cylinder_measure(c.base) * from_u64(c.fiber.size()) / from_u64(c.modulus);
}

// ---------------------------------------------------------------- Correlator

Correlator::Correlator(const LagEngine& engine, std::uint64_t k)
    : base_(engine.system().base()), hist_(engine.histogram(k)) {}

Correlator::Correlator(const AdicSystem& sys, int depth, std::uint64_t k)
    : Correlator(LagEngine(sys, depth), k) {}

RationalInterval Correlator::operator()(const FiberedCylinder& a, const FiberedCylinder& b) const {
  const std::uint32_t m = hist_.modulus;
  if (a.modulus != m || b.modulus != m) throw std::invalid_argument("fiber modulus mismatch");
  if (a.base.depth() > hist_.depth || b.base.depth() > hist_.depth)
    throw std::invalid_argument("cylinder deeper than the correlator");

  // c[g] = #{y in F_A : y + g in F_B}
  std::vector<std::uint64_t> c(m, 0);
  for (std::uint32_t g = 0; g < m; ++g)
    for (auto y : a.fiber) c[g] += b.fiber_contains((y + g) % m) ? 1 : 0;
  const std::uint64_t c_min = *std::min_element(c.begin(), c.end());
  const std::uint64_t c_max = *std::max_element(c.begin(), c.end());

  const CylinderSet la = a.base.lift(base_, hist_.depth);
  const CylinderSet lb = b.base.lift(base_, hist_.depth);
  std::vector<char> in_b(hist_.cells, 0);
  for (auto r : lb.residues()) in_b[r] = 1;

  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  for (auto cell : la.residues()) {
    if (!in_b[hist_.target(cell)]) continue;
    std::uint64_t det = 0;
    for (std::uint32_t g = 0; g < m; ++g) det += hist_.counts[cell * m + g] * c[g];
    const std::uint64_t open = hist_.undetermined[cell];
    lo += det + open * c_min;
    hi += det + open * c_max;
  }
  const Rational denom = from_u64(base_.modulus()) * from_u64(m);
  return RationalInterval(from_u64(lo) / denom, from_u64(hi) / denom);
}

RationalInterval correlation(const AdicSystem& sys, const FiberedCylinder& a, const FiberedCylinder& b,
                             std::uint64_t k) {
  const int depth = std::max(a.base.depth(), b.base.depth());
  return Correlator(sys, depth, k)(a, b);
}

// ------------------------------------------------------------- JoiningMatrix

JoiningMatrix::JoiningMatrix(int depth, std::uint64_t lag, std::uint64_t base_cells, std::uint32_t fiber,
                             Rational unit)
    : unit_(std::move(unit)), lag_(lag), base_cells_(base_cells), size_(0), fiber_(fiber), depth_(depth) {
  if (base_cells == 0 || fiber == 0) throw std::invalid_argument("empty joining matrix");
  if (base_cells > kMaxMatrixCells / fiber)
    throw ResourceError("joining matrix with " + std::to_string(base_cells) + " x " + std::to_string(fiber) +
                        " cells exceeds the bound " + std::to_string(kMaxMatrixCells));
  size_ = static_cast<std::size_t>(base_cells * fiber);
  lo_.assign(size_ * size_, 0);
  hi_.assign(size_ * size_, 0);
}

RationalInterval JoiningMatrix::entry(std::size_t row, std::size_t col) const {
  return RationalInterval(from_u64(lo_count(row, col)) * unit_, from_u64(hi_count(row, col)) * unit_);
}

void JoiningMatrix::add(std::size_t row, std::size_t col, std::uint64_t lo, std::uint64_t hi) {
  lo_[row * size_ + col] += lo;
  hi_[row * size_ + col] += hi;
}

RationalInterval JoiningMatrix::row_sum(std::size_t row) const {
  std::uint64_t lo = 0, hi = 0;
  for (std::size_t c = 0; c < size_; ++c) {
    lo += lo_count(row, c);
    hi += hi_count(row, c);
  }
  return RationalInterval(from_u64(lo) * unit_, from_u64(hi) * unit_);
}

RationalInterval JoiningMatrix::col_sum(std::size_t col) const {
  std::uint64_t lo = 0, hi = 0;
  for (std::size_t r = 0; r < size_; ++r) {
    lo += lo_count(r, col);
    hi += hi_count(r, col);
  }
  return RationalInterval(from_u64(lo) * unit_, from_u64(hi) * unit_);
}

Rational JoiningMatrix::max_endpoint_distance(const JoiningMatrix& other) const {
  if (other.size_ != size_) throw std::invalid_argument("joining matrices differ in size");
  if (other.unit_ == unit_) {
    std::uint64_t far = 0;
    auto diff = [](std::uint64_t x, std::uint64_t y) { return x > y ? x - y : y - x; };
    for (std::size_t i = 0; i < lo_.size(); ++i)
      far = std::max({far, diff(lo_[i], other.lo_[i]), diff(hi_[i], other.hi_[i])});
    return from_u64(far) * unit_;
  }
  Rational best = 0;
  for (std::size_t r = 0; r < size_; ++r) {
    for (std::size_t c = 0; c < size_; ++c) {
      auto x = entry(r, c);
      auto y = other.entry(r, c);
      const Rational dl = abs(Rational(x.lo - y.lo));
      const Rational dh = abs(Rational(x.hi - y.hi));
      best = std::max({best, dl, dh});
    }
  }
  return best;
}

JoiningMatrix joining_matrix(const LagEngine& engine, std::uint64_t k) {
  const ShiftHistogram h = engine.histogram(k);
  const std::uint32_t m = h.modulus;
  JoiningMatrix out(h.depth, k, h.cells, m, Rational(1) / from_u64(h.per_cell));
  for (std::uint64_t b = 0; b < h.cells; ++b) {
    const std::uint64_t a = h.target(b);
    const std::uint64_t open = h.undetermined[b];
    for (std::uint32_t y = 0; y < m; ++y) {
      const std::size_t col = b * m + y;
      for (std::uint32_t g = 0; g < m; ++g) {
        const std::size_t row = a * m + (y + g) % m;
        const std::uint64_t cnt = h.counts[b * m + g];
        out.add(row, col, cnt, cnt + open);
      }
    }
  }
  return out;
}

JoiningMatrix joining_matrix(const AdicSystem& sys, int depth, std::uint64_t k) {
  if (sys.base().block_size(depth) > kMaxMatrixCells / sys.fiber())
    throw ResourceError("joining matrix at depth " + std::to_string(depth) + " exceeds the bound " +
                        std::to_string(kMaxMatrixCells));
  return joining_matrix(LagEngine(sys, depth), k);
}

JoiningMatrix joining_matrix(const RankOneSystem& sys, int depth, std::uint64_t k) {
  const int m = sys.expansion_stage;
  if (depth < 1 || depth >= m) throw std::invalid_argument("tower depth must satisfy 1 <= d < expansion stage");
  const std::uint64_t hm = tower_height(sys.schedule, m);
  const std::uint64_t hd = tower_height(sys.schedule, depth);
  if (k >= hm)
    throw std::invalid_argument("lag " + std::to_string(k) + " is not below the stage-" + std::to_string(m) +
                                " height " + std::to_string(hm));
  const auto labels = stage_labels(sys.schedule, depth, m);
  const std::uint64_t copies = stage_offsets(sys.schedule, depth, m).size();
  const bool wrap = sys.schedule.spacer_free_from(m);
  JoiningMatrix out(depth, k, hd, 1, Rational(1) / from_u64(copies));
  for (std::uint64_t i = 0; i < hm; ++i) {
    const std::int64_t b = labels[i];
    if (b < 0) continue;
    std::uint64_t j = i + k;
    if (j >= hm) {
      if (!wrap) {
        for (std::uint64_t a = 0; a < hd; ++a) out.add(a, static_cast<std::size_t>(b), 0, 1);
        continue;
      }
      j -= hm;
    }
    const std::int64_t a = labels[j];
    if (a >= 0) out.add(static_cast<std::size_t>(a), static_cast<std::size_t>(b), 1, 1);
  }
  return out;
}

JoiningMatrix joining_matrix(const System& sys, int depth, std::uint64_t k) {
  return std::visit([&](const auto& s) { return joining_matrix(s, depth, k); }, sys);
}

std::uint64_t max_lag(const System& sys) {
  if (auto* a = std::get_if<AdicSystem>(&sys)) return a->base().modulus();
  const auto& r = std::get<RankOneSystem>(sys);
  return tower_height(r.schedule, r.expansion_stage) - 1;
}

std::uint64_t matrix_cells(const System& sys, int depth) {
  if (auto* a = std::get_if<AdicSystem>(&sys)) return a->base().block_size(depth) * a->fiber();
  return tower_height(std::get<RankOneSystem>(sys).schedule, depth);
}

int max_depth(const System& sys) {
  if (auto* a = std::get_if<AdicSystem>(&sys)) return a->base().depth();
  return std::get<RankOneSystem>(sys).expansion_stage - 1;
}

std::string describe(const System& sys) {
  if (auto* a = std::get_if<AdicSystem>(&sys)) {
    std::string radices;
    for (auto r : a->base().pattern()) radices += (radices.empty() ? "" : ",") + std::to_string(r);
    std::string s = "adic(" + radices + ") N=" + std::to_string(a->base().depth());
    if (a->is_extension()) s += " x Z_" + std::to_string(a->fiber()) + " via " + a->cocycle().name();
    return s;
  }
  const auto& r = std::get<RankOneSystem>(sys);
  return "rank-one h1=" + std::to_string(r.schedule.initial_height()) + " m=" + std::to_string(r.expansion_stage);
}

// ----------------------------------------------------------------- WeakLimit

namespace {

template <class MatrixAt>
WeakLimit iterate_limit(MatrixAt&& at, std::span<const std::uint64_t> lags, const Rational& tolerance) {
  std::vector<JoiningMatrix> iterates;
  iterates.reserve(lags.size());
  for (auto k : lags) iterates.push_back(at(k));
  Rational movement = 0;
  const std::size_t first = iterates.size() >= 3 ? iterates.size() - 3 : 0;
  for (std::size_t i = first + 1; i < iterates.size(); ++i)
    movement = std::max(movement, iterates[i].max_endpoint_distance(iterates[i - 1]));
  JoiningMatrix last = iterates.back();
  return WeakLimit{std::move(last), std::move(iterates), movement, movement <= tolerance};
}

}  // namespace

WeakLimit weak_limit(const System& sys, int depth, std::span<const std::uint64_t> seq, std::size_t i_max,
                     const Rational& tolerance) {
  const std::uint64_t limit = max_lag(sys);
  std::vector<std::uint64_t> lags;
  for (auto k : seq) {
    if (lags.size() >= i_max) break;
    if (k <= limit) lags.push_back(k);
  }
  if (lags.size() < 2)
    throw std::invalid_argument("weak limit needs at least two sequence entries within the representable range");
  if (auto* a = std::get_if<AdicSystem>(&sys)) {
    if (a->base().block_size(depth) > kMaxMatrixCells / a->fiber())
      throw ResourceError("joining matrix at depth " + std::to_string(depth) + " exceeds the bound " +
                          std::to_string(kMaxMatrixCells));
    LagEngine engine(*a, depth);
    return iterate_limit([&](std::uint64_t k) { return joining_matrix(engine, k); }, lags, tolerance);
  }
  const auto& r = std::get<RankOneSystem>(sys);
  return iterate_limit([&](std::uint64_t k) { return joining_matrix(r, depth, k); }, lags, tolerance);
}

// ------------------------------------------------------------- FiberFunction

FiberFunction FiberFunction::fiber_sign(std::uint32_t modulus) {
  if (modulus < 2 || modulus % 2 != 0) throw std::invalid_argument("fiber sign needs an even modulus");
  FiberFunction f;
  f.fiber = modulus;
  f.values.resize(modulus);
  for (std::uint32_t y = 0; y < modulus; ++y) f.values[y] = (y % 2 == 0) ? 1 : -1;
  return f;
}

FiberFunction FiberFunction::indicator(const DigitSystem& sys, const FiberedCylinder& c) {
  FiberFunction f;
  f.depth = c.base.depth();
  f.cells = sys.block_size(f.depth);
  f.fiber = c.modulus;
  f.values.assign(f.cells * f.fiber, 0);
  for (auto a : c.base.residues())
    for (auto y : c.fiber) f.values[a * f.fiber + y] = 1;
  return f;
}

FiberFunction FiberFunction::lift(const DigitSystem& sys, int to) const {
  if (to < depth) throw std::invalid_argument("cannot lift a function to a shallower depth");
  FiberFunction g;
  g.depth = to;
  g.cells = sys.block_size(to);
  g.fiber = fiber;
  g.values.resize(g.cells * fiber);
  for (std::uint64_t a = 0; a < g.cells; ++a)
    for (std::uint32_t y = 0; y < fiber; ++y) g.values[a * fiber + y] = at(a % cells, y);
  return g;
}

BaseFunction project_H0(const FiberFunction& f) {
  BaseFunction g;
  g.depth = f.depth;
  g.values.resize(f.cells);
  for (std::uint64_t a = 0; a < f.cells; ++a) {
    Rational s = 0;
    for (std::uint32_t y = 0; y < f.fiber; ++y) s += f.at(a, y);
    g.values[a] = s / f.fiber;
  }
  return g;
}

FiberFunction lift_to_extension(const BaseFunction& g, std::uint32_t fiber) {
  FiberFunction f;
  f.depth = g.depth;
  f.cells = g.values.size();
  f.fiber = fiber;
  f.values.resize(f.cells * fiber);
  for (std::uint64_t a = 0; a < f.cells; ++a)
    for (std::uint32_t y = 0; y < fiber; ++y) f.values[a * fiber + y] = g.values[a];
  return f;
}

FiberFunction project_H0_perp(const FiberFunction& f) {
  FiberFunction out = f;
  const FiberFunction avg = lift_to_extension(project_H0(f), f.fiber);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= avg.values[i];
  return out;
}

Rational inner_product(const FiberFunction& f, const FiberFunction& g) {
  if (f.depth != g.depth || f.fiber != g.fiber || f.values.size() != g.values.size())
    throw std::invalid_argument("inner product needs functions on the same cells");
  Rational s = 0;
  for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * g.values[i];
  return s / from_u64(f.values.size());
}

Rational mean(const FiberFunction& f) {
  Rational s = 0;
  for (const auto& v : f.values) s += v;
  return s / from_u64(f.values.size());
}

}  // namespace rigidlab
