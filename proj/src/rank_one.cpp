#include "rigidlab/rank_one.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "rigidlab/errors.hpp"

namespace rigidlab {

std::uint64_t StageRecipe::spacer_total() const {
  std::uint64_t s = 0;
  for (auto v : spacers) s += v;
  return s;
}

RankOneSchedule::RankOneSchedule(std::uint64_t initial_height, std::vector<StageRecipe> recipes)
    : recipes_(std::move(recipes)), initial_height_(initial_height) {
  if (initial_height_ < 1) throw std::invalid_argument("initial tower height must be >= 1");
  if (recipes_.empty()) throw std::invalid_argument("rank-one schedule needs at least one recipe");
  for (auto& r : recipes_) {
    if (r.cuts < 2) throw std::invalid_argument("cut count must be >= 2");
    if (r.spacers.empty()) r.spacers.assign(r.cuts, 0);
    if (r.spacers.size() != r.cuts)
      throw std::invalid_argument("spacer list length must equal the cut count");
  }
}

RankOneSchedule RankOneSchedule::chacon() { return RankOneSchedule(1, {StageRecipe{3, {0, 1, 0}}}); }

RankOneSchedule RankOneSchedule::dyadic() { return RankOneSchedule(1, {StageRecipe{2, {0, 0}}}); }

const StageRecipe& RankOneSchedule::recipe(int n) const {
  if (n < 1) throw std::out_of_range("stage index must be >= 1");
  auto idx = std::min<std::size_t>(static_cast<std::size_t>(n - 1), recipes_.size() - 1);
  return recipes_[idx];
}

bool RankOneSchedule::spacer_free_from(int n) const {
  auto first = std::min<std::size_t>(static_cast<std::size_t>(std::max(n, 1) - 1), recipes_.size() - 1);
  for (std::size_t i = first; i < recipes_.size(); ++i)
    if (recipes_[i].spacer_total() != 0) return false;
  return true;
}

Rational RankOneSchedule::limit_mass() const {
  // Explicit stages up to L = #recipes, then the last recipe repeats:
  // each further step adds S * w_n / r, a geometric series in 1/r.
  const int last = static_cast<int>(recipes_.size());
  Rational height = from_u64(initial_height_);
  Rational width = 1;
  for (int n = 1; n < last; ++n) {
    const auto& r = recipe(n);
    height = height * r.cuts + from_u64(r.spacer_total());
    width /= r.cuts;
  }
  const auto& tail = recipe(last);
  return height * width + from_u64(tail.spacer_total()) * width / (tail.cuts - 1);
}

std::uint64_t tower_height(const RankOneSchedule& sched, int n, std::uint64_t max_height) {
  if (n < 1) throw std::invalid_argument("stage must be >= 1");
  std::uint64_t h = sched.initial_height();
  if (h > max_height) throw ResourceError("initial tower height exceeds the bound");
  for (int s = 1; s < n; ++s) {
    const auto& r = sched.recipe(s);
    if (h > (max_height - r.spacer_total()) / r.cuts)
      throw ResourceError("stage-" + std::to_string(s + 1) + " tower height exceeds the bound " +
                          std::to_string(max_height));
    h = h * r.cuts + r.spacer_total();
  }
  return h;
}

namespace {

std::vector<std::uint64_t> step_offsets(const StageRecipe& r, std::uint64_t h) {
  std::vector<std::uint64_t> out(r.cuts);
  std::uint64_t pos = 0;
  for (std::uint32_t c = 0; c < r.cuts; ++c) {
    out[c] = pos;
    pos += h + r.spacers[c];
  }
  return out;
}

}  // namespace

std::vector<std::uint64_t> stage_offsets(const RankOneSchedule& sched, int n, int m,
                                         std::uint64_t max_height) {
  if (n < 1 || m < n) throw std::invalid_argument("stage_offsets requires 1 <= n <= m");
  tower_height(sched, m, max_height);  // bound check
  std::vector<std::uint64_t> offsets{0};
  std::uint64_t h = tower_height(sched, n, max_height);
  for (int s = n; s < m; ++s) {
    const auto& r = sched.recipe(s);
    auto step = step_offsets(r, h);
    std::vector<std::uint64_t> next;
    next.reserve(offsets.size() * step.size());
    for (auto o : step)
      for (auto e : offsets) next.push_back(o + e);
    offsets = std::move(next);
    h = h * r.cuts + r.spacer_total();
  }
  return offsets;
}

TowerStage build_tower(const RankOneSchedule& sched, int n, std::uint64_t max_height) {
  TowerStage t;
  t.stage = n;
  t.height = tower_height(sched, n, max_height);
  t.level_width = 1;
  for (int s = 1; s < n; ++s) t.level_width /= sched.recipe(s).cuts;
  t.total_mass = from_u64(t.height) * t.level_width;
  t.embeddings.reserve(static_cast<std::size_t>(n > 1 ? n - 1 : 0));
  for (int m = 1; m < n; ++m) t.embeddings.push_back(stage_offsets(sched, m, n, max_height));
  return t;
}

std::vector<std::int64_t> stage_labels(const RankOneSchedule& sched, int d, int m,
                                       std::uint64_t max_height) {
  const std::uint64_t hm = tower_height(sched, m, max_height);
  const std::uint64_t hd = tower_height(sched, d, max_height);
  std::vector<std::int64_t> labels(hm, -1);
  for (auto o : stage_offsets(sched, d, m, max_height))
    for (std::uint64_t a = 0; a < hd; ++a) labels[o + a] = static_cast<std::int64_t>(a);
  return labels;
}

TowerCorrelation tower_correlation(const RankOneSchedule& sched, int n,
                                   std::span<const std::uint64_t> levels_a,
                                   std::span<const std::uint64_t> levels_b,
                                   std::uint64_t k, int m) {
  if (n < 1 || m <= n) throw std::invalid_argument("tower_correlation requires 1 <= n < m");
  const std::uint64_t hn = tower_height(sched, n);
  const std::uint64_t hm = tower_height(sched, m);
  if (k >= hm)
    throw std::invalid_argument("lag " + std::to_string(k) + " is not below the stage-" +
                                std::to_string(m) + " height " + std::to_string(hm));
  for (auto l : levels_a)
    if (l >= hn) throw std::invalid_argument("level outside the stage-n tower");
  for (auto l : levels_b)
    if (l >= hn) throw std::invalid_argument("level outside the stage-n tower");

  std::vector<char> in_a(hm, 0);
  std::vector<char> in_b(hm, 0);
  for (auto o : stage_offsets(sched, n, m)) {
    for (auto l : levels_a) in_a[o + l] = 1;
    for (auto l : levels_b) in_b[o + l] = 1;
  }
  const bool wrap = sched.spacer_free_from(m);

  std::uint64_t determined = 0;
  std::uint64_t open = 0;
  for (std::uint64_t i = 0; i < hm; ++i) {
    if (!in_a[i]) continue;
    std::uint64_t j = i + k;
    if (j < hm) {
      determined += static_cast<std::uint64_t>(in_b[j]);
    } else if (wrap) {
      determined += static_cast<std::uint64_t>(in_b[j - hm]);
    } else {
      ++open;
    }
  }

  Rational width_m = 1;
  for (int s = 1; s < m; ++s) width_m /= sched.recipe(s).cuts;

  TowerCorrelation out;
  out.expansion_stage = m;
  out.normalization = sched.limit_mass();
  out.wrapped_exactly = wrap;
  out.absolute = RationalInterval(from_u64(determined) * width_m, from_u64(determined + open) * width_m);
  out.value = out.absolute / out.normalization;
  return out;
}

}  // namespace rigidlab
