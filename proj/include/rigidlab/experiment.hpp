#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rigidlab/koopman.hpp"
#include "rigidlab/manifest.hpp"
#include "rigidlab/rigidity.hpp"

namespace rigidlab {

enum class OracleMode { Full, Sample, Off };

OracleMode parse_oracle_mode(const std::string& s);

struct RunOptions {
  unsigned threads = 1;
  OracleMode oracle = OracleMode::Sample;
};

struct CsvArtifact {
  std::string file;
  std::string body;
};

struct AnalysisResult {
  std::string name;
  std::string type;
  Verdict verdict = Verdict::Info;
  /// Stopped by a resource bound.
  bool aborted = false;
  /// Stopped by a bad parameter found only at run time.
  bool config_error = false;
  /// Human-readable summary lines; numbers as "p/q (decimal)".
  std::vector<std::string> lines;
  std::vector<CsvArtifact> csv;
};

struct Report {
  std::string manifest_text;
  std::string system;
  std::vector<AnalysisResult> results;

  /// 3 any run-time configuration error, else 2 any FAIL, else 4 any
  /// resource abort, else 0.
  int exit_code() const;
  /// report.txt body; the timestamp is confined to its first line.
  std::string render(const std::string& timestamp) const;
};

System build_system(const ExperimentManifest& m);

/// Runs every analysis in order. A resource violation aborts that analysis only.
Report run_experiment(const ExperimentManifest& m, const RunOptions& opts);

/// Writes report.txt and every CSV artifact into dir (created if needed).
void write_report(const Report& r, const std::filesystem::path& dir);

/// "p/q (decimal)"
std::string show(const Rational& r);
std::string show(const RationalInterval& iv);

/// Built-in manifest: dyadic base and its Rudin-Shapiro Z_2 extension,
/// rigidity with the halving check, spectrum and the residual table.
std::string demo_manifest();

}  // namespace rigidlab
