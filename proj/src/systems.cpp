#include "rigidlab/systems.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "rigidlab/errors.hpp"

namespace rigidlab {

DigitSystem::DigitSystem(std::vector<std::uint32_t> radix_pattern, int depth)
    : pattern_(std::move(radix_pattern)), depth_(depth) {
  if (pattern_.empty()) throw std::invalid_argument("empty radix pattern");
  if (depth < 1) throw std::invalid_argument("working depth must be >= 1, got " + std::to_string(depth));
  for (auto b : pattern_)
    if (b < 2) throw std::invalid_argument("radix must be >= 2, got " + std::to_string(b));
  radices_.reserve(static_cast<std::size_t>(depth));
  blocks_.reserve(static_cast<std::size_t>(depth) + 1);
  blocks_.push_back(1);
  for (int i = 0; i < depth; ++i) {
    std::uint32_t b = pattern_[static_cast<std::size_t>(i) % pattern_.size()];
    radices_.push_back(b);
    if (blocks_.back() > kMaxDigitModulus / b)
      throw ResourceError("block size B_" + std::to_string(i + 1) + " exceeds the supported modulus");
    blocks_.push_back(blocks_.back() * b);
  }
}

std::uint32_t DigitSystem::radix(int i) const {
  if (i < 1 || i > depth_) throw std::out_of_range("digit position out of range");
  return radices_[static_cast<std::size_t>(i - 1)];
}

std::uint64_t DigitSystem::block_size(int d) const {
  if (d < 0 || d > depth_) throw std::out_of_range("block depth out of range");
  return blocks_[static_cast<std::size_t>(d)];
}

Point point_from_residue(const DigitSystem& sys, std::uint64_t residue) {
  if (residue >= sys.modulus()) throw std::invalid_argument("residue outside [0, B_N)");
  return Point{residue};
}

Point point_from_digits(const DigitSystem& sys, std::span<const std::uint32_t> digits) {
  if (digits.size() != static_cast<std::size_t>(sys.depth()))
    throw std::invalid_argument("digit vector length must equal the working depth");
  std::uint64_t r = 0;
  for (int i = sys.depth(); i >= 1; --i) {
    auto x = digits[static_cast<std::size_t>(i - 1)];
    if (x >= sys.radix(i)) throw std::invalid_argument("digit out of range at position " + std::to_string(i));
    r = r * sys.radix(i) + x;
  }
  return Point{r};
}

std::vector<std::uint32_t> digits_of(const DigitSystem& sys, Point x) {
  std::vector<std::uint32_t> out(static_cast<std::size_t>(sys.depth()));
  std::uint64_t r = x.residue;
  for (int i = 1; i <= sys.depth(); ++i) {
    out[static_cast<std::size_t>(i - 1)] = static_cast<std::uint32_t>(r % sys.radix(i));
    r /= sys.radix(i);
  }
  return out;
}

Point odometer_add(const DigitSystem& sys, Point x, std::int64_t k) {
  if (k < 0) throw std::invalid_argument("odometer_add: negative step count");
  const std::uint64_t mod = sys.modulus();
  const std::uint64_t step = static_cast<std::uint64_t>(k) % mod;
  // x < mod and step < mod <= 2^62, so the sum cannot overflow.
  return Point{(x.residue + step) % mod};
}

CarryLength carry_length(const DigitSystem& sys, Point x) {
  std::uint64_t r = x.residue;
  int t = 0;
  for (int i = 1; i <= sys.depth(); ++i) {
    auto b = sys.radix(i);
    if (r % b != b - 1) return {t, true};
    r /= b;
    ++t;
  }
  return {t, false};
}

CylinderSet::CylinderSet(const DigitSystem& sys, int depth, std::vector<std::uint64_t> residues)
    : residues_(std::move(residues)), cells_(0), depth_(depth) {
  if (depth < 0 || depth > sys.depth())
    throw std::invalid_argument("cylinder depth outside [0, N]");
  cells_ = sys.block_size(depth);
  std::sort(residues_.begin(), residues_.end());
  residues_.erase(std::unique(residues_.begin(), residues_.end()), residues_.end());
  if (!residues_.empty() && residues_.back() >= cells_)
    throw std::invalid_argument("cylinder residue outside [0, B_d)");
}

CylinderSet CylinderSet::from_constraints(const DigitSystem& sys,
                                          std::span<const std::pair<int, std::uint32_t>> constraints) {
  int depth = 0;
  for (auto [pos, value] : constraints) {
    if (pos < 1 || pos > sys.depth()) throw std::invalid_argument("constraint position out of range");
    if (value >= sys.radix(pos)) throw std::invalid_argument("constraint digit out of range");
    depth = std::max(depth, pos);
  }
  std::vector<std::uint64_t> residues;
  const std::uint64_t cells = sys.block_size(depth);
  for (std::uint64_t r = 0; r < cells; ++r) {
    bool ok = true;
    for (auto [pos, value] : constraints) {
      std::uint64_t digit = (r / sys.block_size(pos - 1)) % sys.radix(pos);
      if (digit != value) {
        ok = false;
        break;
      }
    }
    if (ok) residues.push_back(r);
  }
  return CylinderSet(sys, depth, std::move(residues));
}

CylinderSet CylinderSet::whole(const DigitSystem& sys, int depth) {
  std::vector<std::uint64_t> all(sys.block_size(depth));
  for (std::uint64_t r = 0; r < all.size(); ++r) all[r] = r;
  return CylinderSet(sys, depth, std::move(all));
}

bool CylinderSet::contains(std::uint64_t residue_mod_cells) const {
  return std::binary_search(residues_.begin(), residues_.end(), residue_mod_cells);
}

CylinderSet CylinderSet::lift(const DigitSystem& sys, int depth) const {
  if (depth < depth_) throw std::invalid_argument("cannot lift a cylinder to a shallower depth");
  if (depth == depth_) return *this;
  const std::uint64_t finer = sys.block_size(depth);
  const std::uint64_t copies = finer / cells_;
  std::vector<std::uint64_t> out;
  out.reserve(residues_.size() * copies);
  for (std::uint64_t j = 0; j < copies; ++j)
    for (auto r : residues_) out.push_back(r + j * cells_);
  return CylinderSet(sys, depth, std::move(out));
}

Rational cylinder_measure(const CylinderSet& c) {
  return Rational(from_u64(c.residues().size()) / from_u64(c.cells()));
}

}  // namespace rigidlab
