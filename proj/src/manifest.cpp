#include "rigidlab/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rigidlab/errors.hpp"

namespace rigidlab {

std::string AnalysisSpec::get(const std::string& key, const std::string& fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

const SequenceSpec* ExperimentManifest::sequence(const std::string& name) const {
  for (const auto& s : sequences)
    if (s.name == name) return &s;
  return nullptr;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) out.push_back(trim(part));
  return out;
}

std::uint64_t parse_u64(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("expected a non-negative integer, got '" + s + "'");
  try {
    return std::stoull(s);
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("integer out of range: '" + s + "'");
  }
}

int parse_int_bounded(const std::string& s, int lo, int hi) {
  const std::uint64_t v = parse_u64(s);
  if (v < static_cast<std::uint64_t>(lo) || v > static_cast<std::uint64_t>(hi))
    throw std::invalid_argument("value " + s + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw std::invalid_argument("expected true or false, got '" + s + "'");
}

std::vector<std::uint64_t> parse_u64_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& p : split(s, ',')) out.push_back(parse_u64(p));
  return out;
}

enum class Kind { UInt, List, Range, PositiveRational, Bool, Word, Name };

struct KeySpec {
  Kind kind;
  bool required;
  std::vector<std::string> words = {};
};

using Schema = std::map<std::string, KeySpec>;

const std::map<std::string, Schema>& analysis_schemas() {
  static const std::map<std::string, Schema> s = {
      {"joining", {{"depth", {Kind::UInt, true}}, {"k", {Kind::List, true}}}},
      {"correlate",
       {{"depth", {Kind::UInt, true}},
        {"a", {Kind::List, true}},
        {"b", {Kind::List, false}},
        {"a_fiber", {Kind::List, false}},
        {"b_fiber", {Kind::List, false}},
        {"k", {Kind::List, true}}}},
      {"rigidity",
       {{"sequence", {Kind::Name, true}},
        {"depths", {Kind::Range, true}},
        {"i_max", {Kind::UInt, false}},
        {"tolerance", {Kind::PositiveRational, false}},
        {"method", {Kind::Word, false, {"operator", "set", "both"}}},
        {"halving", {Kind::Bool, false}}}},
      {"spectrum",
       {{"function", {Kind::Word, true, {"fiber-sign", "cylinder"}}},
        {"depth", {Kind::UInt, false}},
        {"cells", {Kind::List, false}},
        {"fiber_values", {Kind::List, false}},
        {"center", {Kind::Bool, false}},
        {"K", {Kind::UInt, true}},
        {"order", {Kind::UInt, false}},
        {"grid", {Kind::UInt, false}},
        {"tail", {Kind::UInt, false}},
        {"wiener", {Kind::UInt, false}}}},
      {"verify-theorem",
       {{"sequence", {Kind::Name, true}},
        {"depth", {Kind::UInt, true}},
        {"i_max", {Kind::UInt, false}},
        {"tolerance", {Kind::PositiveRational, false}}}},
      {"verify-cocycles",
       {{"k_max", {Kind::UInt, false}}, {"cocycle", {Kind::Word, false, {"MORSE", "RUDIN_SHAPIRO", "both"}}}}},
  };
  return s;
}

void check_value(const KeySpec& spec, const std::string& v) {
  switch (spec.kind) {
    case Kind::UInt: parse_u64(v); break;
    case Kind::List: parse_index_list(v); break;
    case Kind::Range: {
      auto r = parse_index_list(v);
      if (r.empty()) throw std::invalid_argument("empty range");
      break;
    }
    case Kind::PositiveRational:
      if (parse_rational(v) <= 0) throw std::invalid_argument("tolerance must be positive");
      break;
    case Kind::Bool: parse_bool(v); break;
    case Kind::Word:
      if (std::find(spec.words.begin(), spec.words.end(), v) == spec.words.end()) {
        std::string all;
        for (const auto& w : spec.words) all += (all.empty() ? "" : "|") + w;
        throw std::invalid_argument("expected one of " + all + ", got '" + v + "'");
      }
      break;
    case Kind::Name:
      if (v.empty()) throw std::invalid_argument("empty name");
      break;
  }
}

}  // namespace

std::vector<std::uint64_t> parse_index_list(std::string_view text) {
  const std::string s = trim(text);
  std::vector<std::uint64_t> out;
  if (s.empty()) return out;
  for (const auto& part : split(s, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_u64(part));
      continue;
    }
    const std::uint64_t a = parse_u64(trim(part.substr(0, dots)));
    const std::uint64_t b = parse_u64(trim(part.substr(dots + 2)));
    if (b < a) throw std::invalid_argument("range '" + part + "' runs backwards");
    if (b - a > (1u << 24)) throw std::invalid_argument("range '" + part + "' is too long");
    for (std::uint64_t v = a; v <= b; ++v) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ExperimentManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  ExperimentManifest m;
  m.text = std::string(text);
  std::vector<std::string> errors;
  auto error = [&](int line, const std::string& msg) {
    errors.push_back("line " + std::to_string(line) + ": " + msg);
  };

  enum class Section { None, System, Extension, Sequence, Analysis, Output };
  Section section = Section::None;
  bool have_system = false;
  int system_line = 0;
  std::map<std::string, int> seen_keys;  // per section, reset on header
  std::map<std::string, int> analysis_lines;
  std::set<std::string> names;
  std::optional<int> ext_cocycle_line;
  std::string table_value;
  int table_line = 0;
  std::map<std::string, int> system_keys;

  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        error(lineno, "malformed section header '" + line + "'");
        section = Section::None;
        continue;
      }
      const auto words = split(trim(line.substr(1, line.size() - 2)), ' ');
      std::vector<std::string> w;
      for (const auto& x : words)
        if (!x.empty()) w.push_back(x);
      seen_keys.clear();
      if (w.size() == 1 && w[0] == "system") {
        if (have_system) error(lineno, "duplicate [system] section");
        have_system = true;
        system_line = lineno;
        section = Section::System;
      } else if (w.size() == 1 && w[0] == "extension") {
        if (m.extension) error(lineno, "duplicate [extension] section");
        m.extension = ExtensionSpec{};
        m.extension->cocycle.clear();
        ext_cocycle_line = lineno;
        section = Section::Extension;
      } else if (w.size() == 1 && w[0] == "output") {
        section = Section::Output;
      } else if (w.size() == 2 && (w[0] == "sequence" || w[0] == "analysis")) {
        if (!names.insert(w[0] + ":" + w[1]).second) error(lineno, "duplicate " + w[0] + " name '" + w[1] + "'");
        if (w[0] == "sequence") {
          m.sequences.push_back(SequenceSpec{w[1], "", 16, 0, {}});
          section = Section::Sequence;
        } else {
          m.analyses.push_back(AnalysisSpec{w[1], "", {}, lineno});
          section = Section::Analysis;
        }
      } else {
        error(lineno, "unknown section '" + line + "'");
        section = Section::None;
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      error(lineno, "expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      error(lineno, "missing key");
      continue;
    }
    if (seen_keys.count(key)) error(lineno, "duplicate key '" + key + "'");
    seen_keys[key] = lineno;

    try {
      switch (section) {
        case Section::None:
          error(lineno, "key '" + key + "' outside any section");
          break;
        case Section::System: {
          SystemSpec& s = m.system;
          system_keys[key] = lineno;
          if (key == "kind") {
            if (value != "adic" && value != "rank-one") throw std::invalid_argument("kind must be adic or rank-one");
            s.kind = value;
          } else if (key == "radices") {
            s.radices.clear();
            for (auto v : parse_u64_list(value)) {
              if (v < 2 || v > 0xffffffffULL) throw std::invalid_argument("radices must be >= 2");
              s.radices.push_back(static_cast<std::uint32_t>(v));
            }
          } else if (key == "depth") {
            if (!value.empty() && value[0] == '-') throw std::invalid_argument("depth must be non-negative, got " + value);
            s.depth = parse_int_bounded(value, 1, 62);
          } else if (key == "initial_height") {
            s.initial_height = parse_u64(value);
            if (s.initial_height < 1) throw std::invalid_argument("initial_height must be >= 1");
          } else if (key == "cuts") {
            s.cuts.clear();
            for (const auto& p : split(value, ';')) {
              const auto c = parse_u64(p);
              if (c < 2 || c > 1024) throw std::invalid_argument("cuts must lie in [2, 1024]");
              s.cuts.push_back(static_cast<std::uint32_t>(c));
            }
          } else if (key == "spacers") {
            s.spacers.clear();
            for (const auto& p : split(value, ';')) s.spacers.push_back(parse_u64_list(p));
          } else if (key == "stage") {
            if (!value.empty() && value[0] == '-') throw std::invalid_argument("stage must be positive, got " + value);
            s.stage = parse_int_bounded(value, 2, 64);
          } else {
            throw std::invalid_argument("unknown key '" + key + "' in [system]");
          }
          break;
        }
        case Section::Extension: {
          ExtensionSpec& e = *m.extension;
          if (key == "cocycle") {
            if (value != "ZERO" && value != "MORSE" && value != "RUDIN_SHAPIRO" && value != "TABLE")
              throw std::invalid_argument("cocycle must be ZERO, MORSE, RUDIN_SHAPIRO or TABLE");
            e.cocycle = value;
          } else if (key == "fiber") {
            e.fiber = static_cast<std::uint32_t>(parse_int_bounded(value, 2, 64));
          } else if (key == "table") {
            table_value = value;
            table_line = lineno;
            e.table = base_dir / value;
          } else {
            throw std::invalid_argument("unknown key '" + key + "' in [extension]");
          }
          break;
        }
        case Section::Sequence: {
          SequenceSpec& s = m.sequences.back();
          if (key == "rule") {
            if (value != "tower-heights" && value != "shifted-tower-heights" && value != "explicit")
              throw std::invalid_argument("rule must be tower-heights, shifted-tower-heights or explicit");
            s.rule = value;
          } else if (key == "count") {
            s.count = static_cast<std::size_t>(parse_int_bounded(value, 2, 4096));
          } else if (key == "shift") {
            s.shift = parse_u64(value);
          } else if (key == "values") {
            s.values = parse_u64_list(value);
            for (std::size_t i = 0; i < s.values.size(); ++i)
              if (s.values[i] == 0 || (i > 0 && s.values[i] <= s.values[i - 1]))
                throw std::invalid_argument("values must be strictly increasing positive integers");
          } else {
            throw std::invalid_argument("unknown key '" + key + "' in [sequence]");
          }
          break;
        }
        case Section::Analysis: {
          AnalysisSpec& a = m.analyses.back();
          if (key == "type") {
            if (!analysis_schemas().count(value)) throw std::invalid_argument("unknown analysis type '" + value + "'");
            a.type = value;
            break;
          }
          a.params[key] = value;
          analysis_lines[a.name + "." + key] = lineno;
          break;
        }
        case Section::Output:
          if (key == "dir") {
            if (value.empty()) throw std::invalid_argument("empty output dir");
            m.output_dir = value;
          } else {
            throw std::invalid_argument("unknown key '" + key + "' in [output]");
          }
          break;
      }
    } catch (const std::invalid_argument& e) {
      error(lineno, e.what());
    }
  }

  // Cross-section checks.
  if (!have_system) errors.push_back("missing [system] section");
  SystemSpec& sys = m.system;
  if (have_system) {
    if (sys.kind == "adic") {
      if (!system_keys.count("depth")) error(system_line, "[system] needs depth");
      for (const char* k : {"cuts", "spacers", "initial_height", "stage"})
        if (system_keys.count(k)) error(system_keys[k], std::string("'") + k + "' applies to rank-one systems only");
    } else {
      if (system_keys.count("radices")) error(system_keys["radices"], "'radices' applies to adic systems only");
      if (system_keys.count("depth")) error(system_keys["depth"], "'depth' applies to adic systems only; use stage");
      if (sys.cuts.empty()) error(system_line, "rank-one [system] needs cuts");
      if (sys.spacers.empty()) sys.spacers.assign(sys.cuts.size(), {});
      if (sys.spacers.size() != sys.cuts.size()) {
        error(system_keys.count("spacers") ? system_keys["spacers"] : system_line,
              "spacers must list one stage per cuts entry");
      } else {
        for (std::size_t i = 0; i < sys.cuts.size(); ++i)
          if (!sys.spacers[i].empty() && sys.spacers[i].size() != sys.cuts[i])
            error(system_keys["spacers"], "stage " + std::to_string(i + 1) + " spacer count differs from its cuts");
      }
    }
  }
  if (m.extension) {
    if (sys.kind != "adic") error(*ext_cocycle_line, "extensions are supported over adic systems only");
    if (m.extension->cocycle.empty()) error(*ext_cocycle_line, "[extension] needs cocycle");
    if (m.extension->cocycle == "TABLE") {
      if (table_value.empty()) {
        error(*ext_cocycle_line, "cocycle TABLE needs a table path");
      } else if (!std::filesystem::exists(m.extension->table)) {
        error(table_line, "table file '" + m.extension->table.string() + "' does not exist");
      }
    } else if (!table_value.empty()) {
      error(table_line, "table is only used with cocycle TABLE");
    }
    if ((m.extension->cocycle == "MORSE" || m.extension->cocycle == "RUDIN_SHAPIRO") && m.extension->fiber != 2)
      error(*ext_cocycle_line, m.extension->cocycle + " is Z_2-valued; fiber must be 2");
  }
  for (const auto& s : m.sequences) {
    if (s.rule.empty()) errors.push_back("sequence '" + s.name + "' needs a rule");
    if (s.rule == "explicit" && s.values.empty()) errors.push_back("explicit sequence '" + s.name + "' needs values");
    if (s.rule != "explicit" && !s.values.empty())
      errors.push_back("sequence '" + s.name + "': values only apply to the explicit rule");
  }
  const int max_d = sys.kind == "adic" ? sys.depth : sys.stage - 1;
  for (const auto& a : m.analyses) {
    auto where = [&](const std::string& key) {
      auto it = analysis_lines.find(a.name + "." + key);
      return it == analysis_lines.end() ? a.line : it->second;
    };
    if (a.type.empty()) {
      error(a.line, "analysis '" + a.name + "' needs a type");
      continue;
    }
    const Schema& schema = analysis_schemas().at(a.type);
    for (const auto& [key, value] : a.params) {
      auto it = schema.find(key);
      if (it == schema.end()) {
        error(where(key), "unknown key '" + key + "' for " + a.type + " analysis");
        continue;
      }
      try {
        check_value(it->second, value);
      } catch (const std::invalid_argument& e) {
        error(where(key), key + ": " + e.what());
      }
    }
    for (const auto& [key, spec] : schema)
      if (spec.required && !a.params.count(key)) error(a.line, a.type + " analysis '" + a.name + "' needs '" + key + "'");
    for (const char* dkey : {"depth", "depths"}) {
      if (!a.params.count(dkey)) continue;
      try {
        for (auto d : parse_index_list(a.params.at(dkey)))
          if (static_cast<std::int64_t>(d) > max_d)
            error(where(dkey), std::string(dkey) + " " + std::to_string(d) + " exceeds the system limit " +
                                   std::to_string(max_d));
      } catch (const std::invalid_argument&) {
      }
    }
    if (a.params.count("sequence") && !m.sequence(a.params.at("sequence")))
      error(where("sequence"), "unknown sequence '" + a.params.at("sequence") + "'");
    if (a.type == "verify-theorem" && !m.extension) error(a.line, "verify-theorem needs an [extension]");
    if ((a.type == "spectrum" || a.type == "correlate") && sys.kind != "adic")
      error(a.line, a.type + " analyses run on adic systems only");
    if (a.type == "spectrum" && a.get("function", "") == "fiber-sign" && !m.extension)
      error(a.line, "fiber-sign needs an [extension]");
  }

  if (!errors.empty()) {
    std::string all = "invalid manifest:";
    for (const auto& e : errors) all += "\n  " + e;
    throw ConfigError(all);
  }
  return m;
}

ExperimentManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read manifest '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace rigidlab
