#include "rigidlab/cocycles.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rigidlab/errors.hpp"

namespace rigidlab {

Cocycle::Cocycle(CocycleRule rule, std::uint32_t modulus, int lookahead,
                 std::shared_ptr<const CocycleTable> table)
    : rule_(rule), modulus_(modulus), lookahead_(lookahead), table_(std::move(table)) {}

Cocycle Cocycle::zero(std::uint32_t modulus) {
  if (modulus < 1) throw std::invalid_argument("fiber modulus must be >= 1");
  return Cocycle(CocycleRule::Zero, modulus, 0, nullptr);
}

Cocycle Cocycle::morse() { return Cocycle(CocycleRule::Morse, 2, 0, nullptr); }

Cocycle Cocycle::rudin_shapiro() { return Cocycle(CocycleRule::RudinShapiro, 2, 2, nullptr); }

Cocycle Cocycle::from_table(CocycleTable table) {
  if (table.modulus < 2) throw ConfigError("cocycle table: modulus must be >= 2");
  if (table.lookahead < 0) throw ConfigError("cocycle table: lookahead must be >= 0");
  if (table.t_max < 0) throw ConfigError("cocycle table: t_max must be >= 0");
  if (table.tail.digit_weights.empty()) table.tail.digit_weights.assign(static_cast<std::size_t>(table.lookahead), 0);
  if (table.tail.digit_weights.size() != static_cast<std::size_t>(table.lookahead))
    throw ConfigError("cocycle table: tail weights must have one entry per lookahead digit");
  for (const auto& [key, v] : table.entries) {
    if (v >= table.modulus) throw ConfigError("cocycle table: value outside [0, m)");
    if (key.second.size() != static_cast<std::size_t>(table.lookahead))
      throw ConfigError("cocycle table: pattern length differs from lookahead");
  }
  auto m = table.modulus;
  auto l = table.lookahead;
  return Cocycle(CocycleRule::Table, m, l, std::make_shared<const CocycleTable>(std::move(table)));
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::uint32_t parse_u32(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("expected a non-negative integer, got '" + s + "'");
  unsigned long long v = std::stoull(s);
  if (v > 0xffffffffULL) throw std::invalid_argument("integer too large: " + s);
  return static_cast<std::uint32_t>(v);
}

std::vector<std::uint32_t> parse_digit_list(const std::string& s) {
  if (s == "-") return {};
  std::vector<std::uint32_t> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_u32(part));
  return out;
}

}  // namespace

Cocycle Cocycle::parse_table(std::string_view text) {
  CocycleTable table;
  std::vector<std::string> errors;
  bool have_modulus = false;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  struct PendingEntry {
    int line;
    int t;
    std::vector<std::uint32_t> pattern;
    std::uint32_t value;
  };
  std::vector<PendingEntry> pending;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream words(line);
    std::vector<std::string> tok;
    for (std::string w; words >> w;) tok.push_back(w);
    if (tok.empty()) continue;
    try {
      if (tok[0] == "modulus" && tok.size() == 2) {
        table.modulus = parse_u32(tok[1]);
        have_modulus = true;
      } else if (tok[0] == "lookahead" && tok.size() == 2) {
        table.lookahead = static_cast<int>(parse_u32(tok[1]));
      } else if (tok[0] == "t_max" && tok.size() == 2) {
        table.t_max = static_cast<int>(parse_u32(tok[1]));
      } else if (tok[0] == "tail" && (tok.size() == 3 || tok.size() == 4)) {
        table.tail.carry_coeff = parse_u32(tok[1]);
        table.tail.constant = parse_u32(tok[2]);
        table.tail.digit_weights = tok.size() == 4 ? parse_digit_list(tok[3]) : std::vector<std::uint32_t>{};
      } else if (tok.size() == 3 && tok[0].find_first_not_of("0123456789") == std::string::npos) {
        pending.push_back({lineno, static_cast<int>(parse_u32(tok[0])), parse_digit_list(tok[1]), parse_u32(tok[2])});
      } else {
        errors.push_back("line " + std::to_string(lineno) + ": unrecognized directive '" + tok[0] + "'");
      }
    } catch (const std::invalid_argument& e) {
      errors.push_back("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_modulus) errors.push_back("cocycle table: missing 'modulus' directive");
  for (const auto& e : pending) {
    std::string where = "line " + std::to_string(e.line) + ": ";
    if (e.t >= table.t_max) errors.push_back(where + "entry t=" + std::to_string(e.t) + " is not below t_max");
    if (e.pattern.size() != static_cast<std::size_t>(table.lookahead))
      errors.push_back(where + "pattern length differs from lookahead");
    if (have_modulus && e.value >= table.modulus) errors.push_back(where + "value outside [0, modulus)");
    if (!table.entries.emplace(std::make_pair(e.t, e.pattern), e.value).second)
      errors.push_back(where + "duplicate entry");
  }
  if (!errors.empty()) {
    std::string msg = "invalid cocycle table:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return from_table(std::move(table));
}

Cocycle Cocycle::load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open cocycle table " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_table(buf.str());
}

std::string Cocycle::name() const {
  switch (rule_) {
    case CocycleRule::Zero: return "ZERO";
    case CocycleRule::Morse: return "MORSE";
    case CocycleRule::RudinShapiro: return "RUDIN_SHAPIRO";
    case CocycleRule::Table: return "TABLE";
  }
  return "?";
}

std::uint32_t Cocycle::value(int carry, std::span<const std::uint32_t> window) const {
  switch (rule_) {
    case CocycleRule::Zero:
      return 0;
    case CocycleRule::Morse:
      return static_cast<std::uint32_t>(1 + carry) % 2;
    case CocycleRule::RudinShapiro: {
      std::uint32_t above = window[1];
      std::uint32_t lost_pairs = carry > 1 ? static_cast<std::uint32_t>(carry - 1) : 0;
      return (above + lost_pairs) % 2;
    }
    case CocycleRule::Table: {
      const auto& tab = *table_;
      if (carry < tab.t_max) {
        std::vector<std::uint32_t> key(window.begin(), window.end());
        auto it = tab.entries.find({carry, key});
        if (it == tab.entries.end()) {
          std::string pattern;
          for (auto d : key) pattern += (pattern.empty() ? "" : ",") + std::to_string(d);
          throw ConfigError("cocycle table has no entry for t=" + std::to_string(carry) + " pattern=" +
                            (pattern.empty() ? "-" : pattern));
        }
        return it->second;
      }
      std::uint64_t v = static_cast<std::uint64_t>(tab.tail.carry_coeff) * static_cast<std::uint64_t>(carry) +
                        tab.tail.constant;
      for (std::size_t i = 0; i < window.size(); ++i)
        v += static_cast<std::uint64_t>(tab.tail.digit_weights[i]) * window[i];
      return static_cast<std::uint32_t>(v % modulus_);
    }
  }
  return 0;
}

CocycleValue eval_cocycle(const Cocycle& c, const DigitSystem& sys, Point x) {
  if (c.rule() == CocycleRule::Zero) return {0u};
  auto carry = carry_length(sys, x);
  if (!carry.determined) return CocycleValue::undetermined();
  if (carry.length + c.lookahead() > sys.depth()) return CocycleValue::undetermined();
  std::vector<std::uint32_t> window(static_cast<std::size_t>(c.lookahead()));
  for (int i = 0; i < c.lookahead(); ++i) {
    int pos = carry.length + 1 + i;
    window[static_cast<std::size_t>(i)] =
        static_cast<std::uint32_t>((x.residue / sys.block_size(pos - 1)) % sys.radix(pos));
  }
  return {c.value(carry.length, window)};
}

CocycleValue cocycle_sum(const Cocycle& c, const DigitSystem& sys, Point x, std::int64_t k) {
  if (k < 0) throw std::invalid_argument("cocycle_sum: negative step count");
  std::uint64_t acc = 0;
  Point y = x;
  for (std::int64_t j = 0; j < k; ++j) {
    auto v = eval_cocycle(c, sys, y);
    if (!v.determined()) return CocycleValue::undetermined();
    acc = (acc + *v.value) % c.modulus();
    y = odometer_add(sys, y, 1);
  }
  return {static_cast<std::uint32_t>(acc)};
}

std::uint32_t sequence_oracle_value(SequenceOracle oracle, std::uint64_t n) {
  switch (oracle) {
    case SequenceOracle::MorseDigitSum:
      return static_cast<std::uint32_t>(std::popcount(n) & 1);
    case SequenceOracle::RudinShapiro11Count:
      return static_cast<std::uint32_t>(std::popcount(n & (n >> 1)) & 1);
  }
  return 0;
}

std::string to_string(SequenceOracle oracle) {
  return oracle == SequenceOracle::MorseDigitSum ? "MORSE_DIGIT_SUM" : "RS_11_COUNT";
}

std::string to_string(CocycleVerification::Status s) {
  switch (s) {
    case CocycleVerification::Status::Success: return "SUCCESS";
    case CocycleVerification::Status::Mismatch: return "MISMATCH";
    case CocycleVerification::Status::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

CocycleVerification verify_cocycle_against_sequence(const Cocycle& c, const DigitSystem& sys,
                                                    SequenceOracle oracle, std::uint64_t k_max) {
  if (c.modulus() != 2) throw std::invalid_argument("sequence oracles are Z_2-valued; cocycle modulus must be 2");
  if (!sys.is_dyadic()) throw std::invalid_argument("sequence oracles are defined on the dyadic base");
  CocycleVerification out;
  const std::uint32_t base = sequence_oracle_value(oracle, 0);
  std::uint32_t sum = 0;  // phi_k(0)
  Point y{0};
  for (std::uint64_t k = 0; k < k_max; ++k) {
    if (k > 0) {
      auto v = eval_cocycle(c, sys, y);
      if (!v.determined()) {
        out.status = CocycleVerification::Status::Inconclusive;
        out.first_k = k;
        return out;
      }
      sum = (sum + *v.value) % 2;
      y = odometer_add(sys, y, 1);
    }
    std::uint32_t expected = (sequence_oracle_value(oracle, k) + 2 - base) % 2;
    if (expected != sum) {
      out.status = CocycleVerification::Status::Mismatch;
      out.first_k = k;
      out.expected = expected;
      out.actual = sum;
      return out;
    }
    out.checked = k + 1;
  }
  return out;
}

CocycleVerification verify_cocycle_against_sequence(const Cocycle& c, SequenceOracle oracle,
                                                    std::uint64_t k_max) {
  int bits = 1;
  while (bits < 62 && (std::uint64_t{1} << bits) < k_max) ++bits;
  return verify_cocycle_against_sequence(c, DigitSystem::dyadic(bits + c.lookahead() + 1), oracle, k_max);
}

}  // namespace rigidlab
