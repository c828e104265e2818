#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rigidlab/rational.hpp"

namespace rigidlab {

/// One "[analysis NAME]" block: its type plus raw key/value parameters,
/// already checked against the keys that type accepts.
struct AnalysisSpec {
  std::string name;
  std::string type;
  std::map<std::string, std::string> params;
  int line = 0;

  bool has(const std::string& key) const { return params.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
};

struct SequenceSpec {
  std::string name;
  std::string rule;  // tower-heights | shifted-tower-heights | explicit
  std::size_t count = 16;
  std::uint64_t shift = 0;
  std::vector<std::uint64_t> values;
};

struct SystemSpec {
  std::string kind = "adic";  // adic | rank-one
  std::vector<std::uint32_t> radices{2};
  int depth = 0;
  std::uint64_t initial_height = 1;
  std::vector<std::uint32_t> cuts;
  std::vector<std::vector<std::uint64_t>> spacers;
  int stage = 12;
};

struct ExtensionSpec {
  std::string cocycle;  // ZERO | MORSE | RUDIN_SHAPIRO | TABLE
  std::uint32_t fiber = 2;
  std::filesystem::path table;
};

struct ExperimentManifest {
  std::string text;
  SystemSpec system;
  std::optional<ExtensionSpec> extension;
  std::vector<SequenceSpec> sequences;
  std::vector<AnalysisSpec> analyses;
  std::filesystem::path output_dir = "out";

  const SequenceSpec* sequence(const std::string& name) const;
};

/// Parses the line-based manifest format. Table paths resolve against
/// base_dir. Throws ConfigError listing every problem with its line number.
ExperimentManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir = ".");
ExperimentManifest load_manifest(const std::filesystem::path& path);

/// "a..b" or "a,b,c" into sorted distinct integers.
std::vector<std::uint64_t> parse_index_list(std::string_view text);

}  // namespace rigidlab
