// rigidlab: batch runner for rigidity, joining and spectral experiments.

#include <CLI11.hpp>

#include <iostream>

#include "rigidlab/errors.hpp"
#include "rigidlab/experiment.hpp"
#include "rigidlab/simd/kernels.hpp"

using namespace rigidlab;

namespace {

int finish(const Report& report, const std::filesystem::path& dir) {
  write_report(report, dir);
  for (const auto& r : report.results) {
    const std::string status = r.aborted ? "ABORTED" : r.config_error ? "CONFIG_ERROR" : to_string(r.verdict);
    std::cout << r.name << " (" << r.type << "): " << status << "\n";
    for (const auto& l : r.lines) std::cout << "  " << l << "\n";
  }
  std::cout << "report written to " << (dir / "report.txt").string() << "\n";
  return report.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rigidlab: exact partial-rigidity and spectral diagnostics for adic and rank-one systems"};
  app.require_subcommand(1);

  std::string manifest_path, out_dir, oracle = "sample";
  unsigned threads = 1;
  auto* run = app.add_subcommand("run", "run every analysis in a manifest");
  run->add_option("manifest", manifest_path, "manifest file")->required();
  run->add_option("--out", out_dir, "output directory (overrides [output] dir)");
  run->add_option("--threads", threads, "worker threads for correlation series")->check(CLI::Range(1u, 256u));
  run->add_option("--oracle", oracle, "brute-force cross-checks")->check(CLI::IsMember({"full", "sample", "off"}));

  std::uint64_t k_max = 65536;
  auto* verify = app.add_subcommand("verify-cocycles", "check Morse and Rudin-Shapiro sums against their sequences");
  verify->add_option("--k-max", k_max, "check all k below this bound")->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 24));

  std::string demo_name;
  auto* demo = app.add_subcommand("demo", "built-in experiments");
  demo->add_option("name", demo_name, "demo name")->required()->check(CLI::IsMember({"remark-1-4"}));
  demo->add_option("--out", out_dir, "output directory");
  demo->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 256u));

  CLI11_PARSE(app, argc, argv);

  try {
    RunOptions opts;
    opts.threads = threads;
    if (*run) {
      opts.oracle = parse_oracle_mode(oracle);
      const ExperimentManifest m = load_manifest(manifest_path);
      return finish(run_experiment(m, opts), out_dir.empty() ? m.output_dir : std::filesystem::path(out_dir));
    }
    if (*verify) {
      ExperimentManifest m = parse_manifest("[system]\ndepth = 1\n[analysis verify-cocycles]\ntype = verify-cocycles\nk_max = " +
                                            std::to_string(k_max) + "\n");
      Report r = run_experiment(m, opts);
      for (const auto& res : r.results)
        for (const auto& l : res.lines) std::cout << l << "\n";
      return r.exit_code();
    }
    if (*demo) {
      const ExperimentManifest m = parse_manifest(demo_manifest());
      std::cout << "simd: " << simd::to_string(simd::active_isa()) << "\n";
      return finish(run_experiment(m, opts), out_dir.empty() ? m.output_dir : std::filesystem::path(out_dir));
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
