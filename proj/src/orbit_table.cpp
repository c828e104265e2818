#include "rigidlab/orbit_table.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "rigidlab/errors.hpp"

namespace rigidlab {

OrbitTable::OrbitTable(const GroupExtension& ext) : modulus_(ext.fiber()) {
  const DigitSystem& sys = ext.base;
  const Cocycle& c = ext.cocycle;
  const std::uint64_t size = sys.modulus();
  if (size > kMaxOrbitTableSize)
    throw ResourceError("orbit table for B_N = " + std::to_string(size) + " exceeds the bound 2^28");
  if (modulus_ > kMaxFiberModulus) throw ResourceError("fiber modulus above 64 is not supported");

  prefix_.assign(size, 0);
  gap_.assign(size, kNoGap);
  std::vector<char> open(size, 0);

  const int depth = sys.depth();
  const int lookahead = c.lookahead();
  std::vector<std::uint32_t> digits(static_cast<std::size_t>(depth), 0);
  std::vector<std::uint32_t> window(static_cast<std::size_t>(lookahead));
  std::uint32_t running = 0;
  for (std::uint64_t x = 0; x < size; ++x) {
    prefix_[x] = static_cast<std::uint8_t>(running);
    int t = 0;
    while (t < depth && digits[static_cast<std::size_t>(t)] == sys.radix(t + 1) - 1) ++t;
    if (c.rule() != CocycleRule::Zero && (t == depth || t + lookahead > depth)) {
      open[x] = 1;
      ++undetermined_;
    } else {
      for (int i = 0; i < lookahead; ++i)
        window[static_cast<std::size_t>(i)] = digits[static_cast<std::size_t>(t + i)];
      running = (running + c.value(t, window)) % modulus_;
    }
    // advance the digit vector by one
    for (int i = 0; i < t; ++i) digits[static_cast<std::size_t>(i)] = 0;
    if (t < depth) ++digits[static_cast<std::size_t>(t)];
  }
  total_ = static_cast<std::uint8_t>(running);

  if (undetermined_ > 0) {
    // Backward sweep; the first open residue, shifted by one period, seeds the wrap.
    std::uint64_t next = 0;
    while (!open[next]) ++next;
    next += size;
    for (std::uint64_t i = size; i-- > 0;) {
      if (open[i]) next = i;
      gap_[i] = static_cast<std::uint32_t>(std::min<std::uint64_t>(next - i, kNoGap - 1));
    }
  }
}

ClassLayout::ClassLayout(std::shared_ptr<const OrbitTable> table, std::uint64_t classes)
    : table_(std::move(table)), prefix_(nullptr), gap_(nullptr), classes_(classes), per_class_(0) {
  const std::uint64_t size = table_->size();
  if (classes == 0 || size % classes != 0) throw std::invalid_argument("class count must divide B_N");
  per_class_ = size / classes;
  if (classes == 1) {
    prefix_ = table_->prefix().data();
    gap_ = table_->gap().data();
    return;
  }
  prefix_store_.resize(size);
  gap_store_.resize(size);
  auto p = table_->prefix();
  auto g = table_->gap();
  for (std::uint64_t j = 0; j < per_class_; ++j) {
    const std::uint64_t row = j * classes;
    for (std::uint64_t a = 0; a < classes; ++a) {
      prefix_store_[a * per_class_ + j] = p[row + a];
      gap_store_[a * per_class_ + j] = g[row + a];
    }
  }
  prefix_ = prefix_store_.data();
  gap_ = gap_store_.data();
}

}  // namespace rigidlab
