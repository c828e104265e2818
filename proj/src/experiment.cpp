#include "rigidlab/experiment.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rigidlab/errors.hpp"
#include "rigidlab/oracle.hpp"
#include "rigidlab/spectral.hpp"

namespace rigidlab {

OracleMode parse_oracle_mode(const std::string& s) {
  if (s == "full") return OracleMode::Full;
  if (s == "sample") return OracleMode::Sample;
  if (s == "off") return OracleMode::Off;
  throw ConfigError("oracle mode must be full, sample or off");
}

std::string show(const Rational& r) { return to_fraction(r) + " (" + to_decimal(r) + ")"; }

std::string show(const RationalInterval& iv) {
  if (iv.is_point()) return show(iv.lo);
  return "[" + show(iv.lo) + ", " + show(iv.hi) + "]";
}

namespace {

// Oracle subsampling: lags up to 16, systems truncated to depth (or stage) 10.
constexpr std::uint64_t kSampleMaxLag = 16;
constexpr int kSampleDepth = 10;

std::string csv_interval(const RationalInterval& iv) {
  return to_fraction(iv.lo) + "," + to_fraction(iv.hi) + "," + to_decimal(iv.lo) + "," + to_decimal(iv.hi);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Cocycle build_cocycle(const ExtensionSpec& e) {
  if (e.cocycle == "ZERO") return Cocycle::zero(e.fiber);
  if (e.cocycle == "MORSE") return Cocycle::morse();
  if (e.cocycle == "RUDIN_SHAPIRO") return Cocycle::rudin_shapiro();
  Cocycle c = Cocycle::load_table(e.table);
  if (c.modulus() != e.fiber)
    throw ConfigError("cocycle table modulus " + std::to_string(c.modulus()) + " differs from fiber " +
                      std::to_string(e.fiber));
  return c;
}

CandidateSequence build_sequence(const System& sys, const SequenceSpec& s) {
  if (s.rule == "explicit") return CandidateSequence::explicit_list(s.values, s.name);
  const std::uint64_t shift = s.rule == "shifted-tower-heights" ? (s.shift == 0 ? 1 : s.shift) : s.shift;
  return CandidateSequence::tower_heights(sys, s.count, shift);
}

/// A smaller copy of the system for sampled oracle checks, or the system itself.
std::optional<System> oracle_system(const System& sys, OracleMode mode, int needed_depth) {
  if (mode == OracleMode::Off) return std::nullopt;
  if (mode == OracleMode::Full) return sys;
  if (auto* a = std::get_if<AdicSystem>(&sys)) {
    const int n = std::min(a->base().depth(), kSampleDepth);
    if (n < needed_depth || n <= a->cocycle().lookahead()) return std::nullopt;
    return a->with_depth(n);
  }
  auto r = std::get<RankOneSystem>(sys);
  r.expansion_stage = std::min(r.expansion_stage, kSampleDepth);
  if (r.expansion_stage <= needed_depth) return std::nullopt;
  return r;
}

FiberedCylinder cell(const AdicSystem& sys, int depth, std::uint64_t a, std::uint32_t y) {
  return FiberedCylinder(CylinderSet(sys.base(), depth, {a}), {y}, sys.fiber());
}

/// Compares up to 8 x 8 joining-matrix entries with brute force. Returns the
/// number of mismatches, or -1 when nothing was checked.
int check_matrix(const System& sys, int depth, std::uint64_t k, OracleMode mode) {
  if (mode == OracleMode::Sample && k > kSampleMaxLag) return -1;
  auto osys = oracle_system(sys, mode, depth);
  if (!osys || k > max_lag(*osys)) return -1;
  const JoiningMatrix fast = joining_matrix(*osys, depth, k);
  const std::size_t n = fast.size();
  const std::size_t stride = n <= 8 ? 1 : n / 8;
  int bad = 0;
  for (std::size_t r = 0; r < n; r += stride) {
    for (std::size_t c = 0; c < n; c += stride) {
      RationalInterval want;
      if (auto* a = std::get_if<AdicSystem>(&*osys)) {
        const std::uint32_t m = a->fiber();
        const auto src = cell(*a, depth, c / m, static_cast<std::uint32_t>(c % m));
        const auto dst = cell(*a, depth, r / m, static_cast<std::uint32_t>(r % m));
        want = oracle_correlation(*a, src, dst, k) * (from_u64(a->base().block_size(depth)) * m);
      } else {
        const auto& t = std::get<RankOneSystem>(*osys);
        const std::uint64_t src = c, dst = r;
        Rational width = 1;
        for (int s = 1; s < depth; ++s) width /= t.schedule.recipe(s).cuts;
        want = oracle_tower_correlation(t.schedule, depth, std::span(&src, 1), std::span(&dst, 1), k,
                                        t.expansion_stage) *
               (t.schedule.limit_mass() / width);
      }
      if (fast.entry(r, c) != want) ++bad;
    }
  }
  return bad;
}

std::string oracle_note(int status) {
  if (status < 0) return "skipped";
  return status == 0 ? "match" : "MISMATCH";
}

void run_joining(const System& sys, const AnalysisSpec& a, const RunOptions& opts, AnalysisResult& out) {
  const int d = static_cast<int>(std::stoull(a.get("depth", "0")));
  std::string body = "k,row,col,lo,hi,lo_decimal,hi_decimal\n";
  const bool adic = std::holds_alternative<AdicSystem>(sys);
  for (auto k : parse_index_list(a.get("k", ""))) {
    const JoiningMatrix m = joining_matrix(sys, d, k);
    bool stochastic = true;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (adic && (!m.row_sum(i).contains(Rational(1)) || !m.col_sum(i).contains(Rational(1)))) stochastic = false;
      for (std::size_t j = 0; j < m.size(); ++j) {
        if (m.hi_count(i, j) == 0) continue;
        body += std::to_string(k) + "," + std::to_string(i) + "," + std::to_string(j) + "," +
                csv_interval(m.entry(i, j)) + "\n";
      }
    }
    const int oracle = check_matrix(sys, d, k, opts.oracle);
    out.lines.push_back("k=" + std::to_string(k) + " size=" + std::to_string(m.size()) +
                        " min diagonal " + show(alpha_from_matrix(m)) +
                        (adic ? (stochastic ? " bistochastic" : " NOT bistochastic") : " (levels only)") +
                        " oracle " + oracle_note(oracle));
    if (!stochastic || oracle > 0) out.verdict = Verdict::Fail;
  }
  out.csv.push_back({out.name + ".csv", body});
}

void run_correlate(const AdicSystem& sys, const AnalysisSpec& a, const RunOptions& opts, AnalysisResult& out) {
  const int d = static_cast<int>(std::stoull(a.get("depth", "0")));
  const std::uint32_t m = sys.fiber();
  auto fiber_of = [&](const std::string& key) {
    std::vector<std::uint32_t> f;
    if (a.has(key)) {
      for (auto y : parse_index_list(a.get(key, ""))) f.push_back(static_cast<std::uint32_t>(y));
    } else {
      for (std::uint32_t y = 0; y < m; ++y) f.push_back(y);
    }
    return f;
  };
  const auto ra = parse_index_list(a.get("a", ""));
  const auto rb = a.has("b") ? parse_index_list(a.get("b", "")) : ra;
  const FiberedCylinder A(CylinderSet(sys.base(), d, ra), fiber_of("a_fiber"), m);
  const FiberedCylinder B(CylinderSet(sys.base(), d, rb), fiber_of("b_fiber"), m);
  LagEngine engine(sys, d);
  std::string body = "k,lo,hi,lo_decimal,hi_decimal,oracle\n";
  for (auto k : parse_index_list(a.get("k", ""))) {
    const RationalInterval v = Correlator(engine, k)(A, B);
    int oracle = -1;
    if (!(opts.oracle == OracleMode::Sample && k > kSampleMaxLag)) {
      if (auto osys = oracle_system(sys, opts.oracle, d)) {
        const auto& o = std::get<AdicSystem>(*osys);
        const FiberedCylinder oa(CylinderSet(o.base(), d, ra), A.fiber, m);
        const FiberedCylinder ob(CylinderSet(o.base(), d, rb), B.fiber, m);
        oracle = correlation(o, oa, ob, k) == oracle_correlation(o, oa, ob, k) ? 0 : 1;
      }
    }
    body += std::to_string(k) + "," + csv_interval(v) + "," + oracle_note(oracle) + "\n";
    out.lines.push_back("k=" + std::to_string(k) + " mu(T^k A ∩ B) = " + show(v) + " oracle " + oracle_note(oracle));
    if (oracle > 0) out.verdict = Verdict::Fail;
  }
  out.lines.insert(out.lines.begin(), "mu(A) = " + show(measure(A)) + ", mu(B) = " + show(measure(B)));
  out.csv.push_back({out.name + ".csv", body});
}

void append_estimate(const RigidityEstimate& est, std::string& body, AnalysisResult& out) {
  for (const auto& d : est.depths) {
    for (const auto& it : d.iterates)
      body += to_string(est.method) + "," + std::to_string(d.depth) + "," + std::to_string(it.lag) + "," +
              csv_interval(it.beta) + ",iterate\n";
    body += to_string(est.method) + "," + std::to_string(d.depth) + ",tail," + csv_interval(d.beta) + "," +
            (d.converged ? "converged" : "NON_CONVERGED") + "\n";
    out.lines.push_back(to_string(est.method) + " depth " + std::to_string(d.depth) + ": beta " + show(d.beta) +
                        ", movement " + show(d.movement) + (d.converged ? "" : " NON_CONVERGED"));
  }
  out.lines.push_back(to_string(est.method) + " alpha along " + est.sequence + ": " +
                      (est.alpha ? show(*est.alpha) : std::string("NON_CONVERGED (no alpha claimed)")) +
                      (est.monotone ? "" : "; beta_d NOT monotone"));
  if (!est.monotone) out.verdict = Verdict::Fail;
}

void run_rigidity(const System& sys, const ExperimentManifest& man, const AnalysisSpec& a, const RunOptions& opts,
                  AnalysisResult& out) {
  const auto seq = build_sequence(sys, *man.sequence(a.get("sequence", "")));
  const auto depths = parse_index_list(a.get("depths", ""));
  const int d_min = static_cast<int>(depths.front()), d_max = static_cast<int>(depths.back());
  const std::size_t i_max = std::stoull(a.get("i_max", "16"));
  const Rational tol = a.has("tolerance") ? parse_rational(a.get("tolerance", "")) : default_tolerance();
  const std::string method = a.get("method", "operator");

  std::string body = "method,depth,k,beta_lo,beta_hi,beta_lo_decimal,beta_hi_decimal,status\n";
  std::optional<RigidityEstimate> op, set;
  if (method != "set") {
    op = rigidity_along(sys, seq, d_min, d_max, i_max, tol);
    append_estimate(*op, body, out);
  }
  if (method != "operator") {
    set = set_based_alpha(sys, seq, d_min, d_max, i_max, tol);
    append_estimate(*set, body, out);
  }
  if (op && set && op->alpha && set->alpha) {
    const Rational gap = abs(Rational(op->alpha->midpoint() - set->alpha->midpoint()));
    const bool agree = gap <= op->alpha->width() + set->alpha->width();
    out.lines.push_back(std::string("methods ") + (agree ? "agree" : "DISAGREE") + " within summed widths");
    if (!agree) out.verdict = Verdict::Fail;
  }

  int oracle = -1;
  for (auto k : seq.values()) {
    if (k > max_lag(sys)) break;
    const int r = check_matrix(sys, d_min, k, opts.oracle);
    if (r < 0) continue;
    oracle = std::max(oracle, r);
  }
  out.lines.push_back("oracle check of depth-" + std::to_string(d_min) + " matrices: " + oracle_note(oracle));
  if (oracle > 0) out.verdict = Verdict::Fail;

  if (a.get("halving", "false") == "true") {
    const auto* ext = std::get_if<AdicSystem>(&sys);
    if (!ext || !ext->is_extension()) throw ConfigError("halving needs an extension");
    const System base = AdicSystem(ext->base());
    const RigidityEstimate base_est = rigidity_along(base, build_sequence(base, *man.sequence(a.get("sequence", ""))),
                                                     d_min, d_max, i_max, tol);
    const auto& ext_est = op ? *op : *set;
    const Verdict v = halving_check(base_est.alpha, ext_est.alpha, parse_rational("1/100"));
    out.lines.push_back("base alpha: " +
                        (base_est.alpha ? show(*base_est.alpha) : std::string("NON_CONVERGED")) +
                        "; halving check (tol 1/100): " + to_string(v));
    if (out.verdict != Verdict::Fail) out.verdict = v;
  }
  out.csv.push_back({out.name + ".csv", body});
}

FiberFunction build_function(const AdicSystem& sys, const AnalysisSpec& a) {
  if (a.get("function", "") == "fiber-sign") return FiberFunction::fiber_sign(sys.fiber());
  const int d = static_cast<int>(std::stoull(a.get("depth", "0")));
  const auto cells = parse_index_list(a.get("cells", "0"));
  std::vector<std::uint32_t> fiber;
  if (a.has("fiber_values")) {
    for (auto y : parse_index_list(a.get("fiber_values", ""))) fiber.push_back(static_cast<std::uint32_t>(y));
  } else {
    for (std::uint32_t y = 0; y < sys.fiber(); ++y) fiber.push_back(y);
  }
  return FiberFunction::indicator(sys.base(), FiberedCylinder(CylinderSet(sys.base(), d, cells), fiber, sys.fiber()));
}

void run_spectrum(const AdicSystem& sys, const AnalysisSpec& a, const RunOptions& opts, AnalysisResult& out) {
  const FiberFunction f = build_function(sys, a);
  const std::size_t K = std::stoull(a.get("K", "64"));
  if (K < 1) throw ConfigError("spectrum needs K >= 1");
  const std::size_t order = std::stoull(a.get("order", std::to_string(std::min<std::size_t>(K, 256))));
  const std::size_t grid = std::stoull(a.get("grid", "1024"));
  const std::size_t tail = std::stoull(a.get("tail", std::to_string(std::max<std::size_t>(1, K / 4))));
  const std::size_t wk = std::stoull(a.get("wiener", std::to_string(K)));
  const bool center = a.get("center", "false") == "true";

  const CorrelationSeries s = autocorrelation_series(sys, f, K, center, opts.threads);
  const SpectralEstimate est = fejer_density(s, order, grid);
  const FlatnessResult flat = flatness_test(est, s);
  const DecayResult decay = decay_test(s, tail);
  const WienerAverage w = wiener_average(s, wk);

  int oracle = -1;
  if (auto osys = oracle_system(sys, opts.oracle, f.depth)) {
    const auto& o = std::get<AdicSystem>(*osys);
    FiberFunction g = f.lift(o.base(), f.depth);
    for (auto& v : g.values) v -= s.mean_removed;
    const std::size_t top = opts.oracle == OracleMode::Sample ? std::min<std::size_t>(K, kSampleMaxLag) : K;
    const CorrelationSeries fast = autocorrelation_series(o, g, top, false);
    oracle = 0;
    for (std::size_t k = 0; k <= top; ++k)
      if (fast.rho[k] != oracle_autocorrelation(o, g, k)) ++oracle;
  }

  std::string series = "k,lo,hi,lo_decimal,hi_decimal\n";
  for (std::size_t k = 0; k < s.rho.size(); ++k) series += std::to_string(k) + "," + csv_interval(s.rho[k]) + "\n";
  std::string density = "theta,value,slack\n";
  for (std::size_t j = 0; j < est.density.size(); ++j)
    density += fmt_double(est.theta[j]) + "," + fmt_double(est.density[j]) + "," + fmt_double(est.slack + est.rounding) + "\n";

  out.lines.push_back("rho(0) = " + show(s.rho[0]) + (center ? ", mean removed " + show(s.mean_removed) : ""));
  if (K >= 1) out.lines.push_back("rho(1) = " + show(s.rho[1]));
  out.lines.push_back("Fejer order " + std::to_string(order) + ", grid " + std::to_string(grid) + ": flatness deviation " +
                      fmt_double(flat.deviation) + ", slack " + fmt_double(flat.slack) + ", rounding " +
                      fmt_double(flat.rounding) + (flat.consistent_with_flat ? " (consistent with flat)" : " (not flat)"));
  out.lines.push_back("grid mean " + fmt_double(est.grid_mean) + ", min density " + fmt_double(est.min_density));
  out.lines.push_back("decay: sup_{k>=" + std::to_string(tail) + "} |rho| = " + show(decay.sup) + " at k=" +
                      std::to_string(decay.argmax) + ", slack " + show(decay.slack) +
                      (decay.within_slack ? " (within slack)" : ""));
  out.lines.push_back("Wiener average K=" + std::to_string(wk) + ": " + show(w.value));
  out.lines.push_back("oracle " + oracle_note(oracle));
  const bool positive = est.min_density >= -(est.slack + est.rounding);
  if (!flat.bound_holds) out.lines.push_back("FAIL: Fejer deviation exceeds (N-1) sup |rho|");
  if (!positive) out.lines.push_back("FAIL: Fejer density below -slack");
  if (!flat.bound_holds || !positive || oracle > 0) out.verdict = Verdict::Fail;
  out.csv.push_back({out.name + "_series.csv", series});
  out.csv.push_back({out.name + "_density.csv", density});
}

void run_theorem(const AdicSystem& sys, const ExperimentManifest& man, const AnalysisSpec& a, AnalysisResult& out) {
  const auto seq = build_sequence(sys, *man.sequence(a.get("sequence", "")));
  const int d = static_cast<int>(std::stoull(a.get("depth", "1")));
  const std::size_t i_max = std::stoull(a.get("i_max", "16"));
  const Rational tol = a.has("tolerance") ? parse_rational(a.get("tolerance", "")) : parse_rational("1/50");
  const TheoremCheck tc = theorem_check(sys, seq, d, i_max, tol);
  std::string body = "k,residual_lo,residual_hi,residual_lo_decimal,residual_hi_decimal\n";
  for (const auto& r : tc.rows) {
    body += std::to_string(r.lag) + "," + csv_interval(r.residual) + "\n";
    out.lines.push_back("k=" + std::to_string(r.lag) + " residual " + show(r.residual));
  }
  out.lines.push_back(std::string("upper bounds strictly decreasing: ") + (tc.strictly_decreasing ? "yes" : "no"));
  out.lines.push_back(std::string("base limit converged: ") + (tc.base_converged ? "yes" : "no"));
  out.verdict = tc.verdict;
  out.csv.push_back({out.name + ".csv", body});
}

void run_verify_cocycles(const AnalysisSpec& a, AnalysisResult& out) {
  const std::uint64_t k_max = std::stoull(a.get("k_max", "65536"));
  const std::string which = a.get("cocycle", "both");
  std::string body = "cocycle,oracle,checked,status,first_k\n";
  out.verdict = Verdict::Pass;
  auto one = [&](const Cocycle& c, SequenceOracle o) {
    const auto v = verify_cocycle_against_sequence(c, o, k_max);
    body += c.name() + "," + to_string(o) + "," + std::to_string(v.checked) + "," + to_string(v.status) + "," +
            std::to_string(v.first_k) + "\n";
    out.lines.push_back(c.name() + " vs " + to_string(o) + ": " + to_string(v.status) + " over " +
                        std::to_string(v.checked) + " sums");
    if (v.status == CocycleVerification::Status::Mismatch) out.verdict = Verdict::Fail;
    else if (v.status == CocycleVerification::Status::Inconclusive && out.verdict == Verdict::Pass)
      out.verdict = Verdict::Inconclusive;
  };
  if (which != "RUDIN_SHAPIRO") one(Cocycle::morse(), SequenceOracle::MorseDigitSum);
  if (which != "MORSE") one(Cocycle::rudin_shapiro(), SequenceOracle::RudinShapiro11Count);
  out.csv.push_back({out.name + ".csv", body});
}

}  // namespace

System build_system(const ExperimentManifest& m) {
  const SystemSpec& s = m.system;
  try {
    if (s.kind == "adic") {
      DigitSystem base(s.radices, s.depth);
      if (!m.extension) return AdicSystem(base);
      return AdicSystem(base, build_cocycle(*m.extension));
    }
    std::vector<StageRecipe> recipes;
    for (std::size_t i = 0; i < s.cuts.size(); ++i) recipes.push_back(StageRecipe{s.cuts[i], s.spacers[i]});
    RankOneSchedule sched(s.initial_height, recipes);
    tower_height(sched, s.stage);  // resource check up front
    return RankOneSystem{sched, s.stage};
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("system: ") + e.what());
  }
}

Report run_experiment(const ExperimentManifest& m, const RunOptions& opts) {
  const System sys = build_system(m);
  Report report;
  report.manifest_text = m.text;
  report.system = describe(sys);
  for (const auto& a : m.analyses) {
    AnalysisResult out;
    out.name = a.name;
    out.type = a.type;
    try {
      if (a.type == "joining") {
        run_joining(sys, a, opts, out);
      } else if (a.type == "correlate") {
        run_correlate(std::get<AdicSystem>(sys), a, opts, out);
      } else if (a.type == "rigidity") {
        run_rigidity(sys, m, a, opts, out);
      } else if (a.type == "spectrum") {
        run_spectrum(std::get<AdicSystem>(sys), a, opts, out);
      } else if (a.type == "verify-theorem") {
        run_theorem(std::get<AdicSystem>(sys), m, a, out);
      } else if (a.type == "verify-cocycles") {
        run_verify_cocycles(a, out);
      }
    } catch (const ResourceError& e) {
      out.aborted = true;
      out.lines.push_back(std::string("ABORTED: ") + e.what());
    } catch (const ConfigError& e) {
      out.config_error = true;
      out.lines.push_back(std::string("CONFIG ERROR: ") + e.what());
    } catch (const std::invalid_argument& e) {
      out.config_error = true;
      out.lines.push_back(std::string("CONFIG ERROR: ") + e.what());
    }
    report.results.push_back(std::move(out));
  }
  return report;
}

int Report::exit_code() const {
  bool fail = false, aborted = false, config = false;
  for (const auto& r : results) {
    fail = fail || r.verdict == Verdict::Fail;
    aborted = aborted || r.aborted;
    config = config || r.config_error;
  }
  if (config) return 3;
  if (fail) return 2;
  if (aborted) return 4;
  return 0;
}

std::string Report::render(const std::string& timestamp) const {
  std::ostringstream o;
  o << "rigidlab report " << timestamp << "\n";
  o << "system: " << system << "\n\n";
  o << "--- manifest ---\n" << manifest_text;
  if (!manifest_text.empty() && manifest_text.back() != '\n') o << "\n";
  o << "--- results ---\n";
  for (const auto& r : results) {
    const std::string status = r.aborted ? "ABORTED" : r.config_error ? "CONFIG_ERROR" : to_string(r.verdict);
    o << "[" << r.name << "] " << r.type << ": " << status << "\n";
    for (const auto& l : r.lines) o << "  " << l << "\n";
    for (const auto& c : r.csv) o << "  table: " << c.file << "\n";
  }
  o << "exit code " << exit_code() << "\n";
  return o.str();
}

void write_report(const Report& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  auto put = [&](const std::string& name, const std::string& body) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + (dir / name).string() + "'");
    f << body;
  };
  char stamp[64];
  const std::time_t now = std::time(nullptr);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  put("report.txt", r.render(stamp));
  for (const auto& res : r.results)
    for (const auto& c : res.csv) put(c.file, c.body);
}

std::string demo_manifest() {
  return R"(# dyadic odometer and its Rudin-Shapiro Z_2 extension
[system]
kind = adic
radices = 2
depth = 22

[extension]
cocycle = RUDIN_SHAPIRO
fiber = 2

[sequence heights]
rule = tower-heights
count = 10

[sequence late]
rule = explicit
values = 256,512,1024,2048,4096,8192,16384,32768,65536

[analysis rigidity]
type = rigidity
sequence = heights
depths = 1..4
i_max = 10
halving = true

[analysis spectrum]
type = spectrum
function = fiber-sign
K = 64
order = 64
tail = 16

[analysis residual]
type = verify-theorem
sequence = late
depth = 4

[output]
dir = rigidlab-demo
)";
}

}  // namespace rigidlab
