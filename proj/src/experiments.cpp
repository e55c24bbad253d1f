#include "scl/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "scl/crossratio.hpp"
#include "scl/discrepancy.hpp"
#include "scl/parallel.hpp"
#include "scl/partition.hpp"

namespace scl {

namespace {

constexpr std::size_t kNamedMinCoefficients = 40;
constexpr int kSingularityMinLevel = 6;
constexpr double kIdentityThreshold = 1e-12;
constexpr double kQuadratureThreshold = 1e-6;
constexpr double kExpansionThreshold = 1e-9;
constexpr double kGibbsThreshold = -1e-12;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, std::initializer_list<const char*> header) : out_(path) {
    if (!out_) throw Error("cannot open " + path.string() + " for writing");
    bool first = true;
    for (const char* h : header) {
      out_ << (first ? "" : ",") << h;
      first = false;
    }
    out_ << '\n';
  }

  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(fields), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double x) { return fmt(x); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <typename Int>
    requires std::is_integral_v<Int>
  static std::string cell(Int v) {
    return std::to_string(v);
  }

  std::ofstream out_;
};

class Run {
 public:
  Run(const ExperimentConfig& config, const char* command) : config_(config), command_(command) {
    config_.validate();
    std::filesystem::create_directories(config_.out_dir);
  }

  std::filesystem::path path(const std::string& name) {
    report_.files.push_back(name);
    return std::filesystem::path(config_.out_dir) / name;
  }

  void warn(std::string w) { report_.warnings.push_back(std::move(w)); }
  void fail(std::string f) { report_.failures.push_back(std::move(f)); }

  Report finish(nlohmann::json results) {
    report_.json = {{"command", command_},
                    {"version", kSoftwareVersion},
                    {"config", to_json(config_)},
                    {"results", std::move(results)},
                    {"warnings", report_.warnings},
                    {"failures", report_.failures}};
    std::ofstream out(path("report.json"));
    out << report_.json.dump(2) << '\n';
    if (!out) throw Error("cannot write report.json");
    report_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return std::move(report_);
  }

  const ExperimentConfig& config() const { return config_; }

 private:
  ExperimentConfig config_;
  std::string command_;
  Report report_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <typename T>
T take(const nlohmann::json& j, const char* field) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(field, "has the wrong type");
  }
}

TuneResult tune(const ExperimentConfig& c, const RotationNumber& rho) {
  return tune_parameter(c.map_family(), rho, c.tune_depth, c.u_radius);
}

nlohmann::json tune_json(const TuneResult& t) {
  return {{"family", to_string(t.map.family())},
          {"omega", t.map.omega()},
          {"omega_lo", t.omega_lo},
          {"omega_hi", t.omega_hi},
          {"matched_depth", t.matched_depth}};
}

void note_truncation(Run& run, const ConjugacyLadder& ladder) {
  if (ladder.truncated_at())
    run.warn("truncated at level " + std::to_string(*ladder.truncated_at()) + ": deeper levels exceed the precision floor or orbit budget");
}

Quadruple random_quadruple(SplitMix64& rng, double lo, double hi, double min_gap) {
  for (;;) {
    double p[4];
    for (double& x : p) x = lo + (hi - lo) * rng.uniform();
    std::sort(p, p + 4);
    if (p[1] - p[0] > min_gap && p[2] - p[1] > min_gap && p[3] - p[2] > min_gap)
      return Quadruple::make(p[0], p[1], p[2], p[3]);
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    family_from_string(family);
  } catch (const DomainError&) {
    throw ConfigError("family", "unknown family '" + family + "'");
  }
  if (map_family() == Family::CubicProxy) throw ConfigError("family", "the cubic proxy is not a circle map");
  const auto rho = rotation_number();
  if (target.is_string() && rho.cf().size() < kNamedMinCoefficients)
    throw ConfigError("target", "named constant expands to fewer than 40 coefficients");
  if (depth < 2) throw ConfigError("depth", "must be >= 2");
  if (tune_depth < 1) throw ConfigError("tune_depth", "must be >= 1");
  if (exponent_min_level < 1 || exponent_min_level > depth)
    throw ConfigError("exponent_min_level", "must lie in [1, depth]");
  if (static_cast<std::size_t>(std::max(depth, tune_depth)) + 1 > rho.cf().size())
    throw ConfigError("target", "needs more coefficients than depth and tune_depth");
  if (refinements.empty()) throw ConfigError("refinements", "must not be empty");
  for (int r : refinements)
    if (r < 1 || r > 3) throw ConfigError("refinements", "entries must lie in {1, 2, 3}");
  if (std::find(refinements.begin(), refinements.end(), refinement) == refinements.end())
    throw ConfigError("refinement", "must be one of the refinements swept");
  if (discrepancy_min_level < 1 || discrepancy_min_level > discrepancy_max_level)
    throw ConfigError("discrepancy_min_level", "must satisfy 1 <= min <= discrepancy_max_level");
  if (samples_mu < 1) throw ConfigError("samples_mu", "must be >= 1");
  if (samples_lebesgue < 1) throw ConfigError("samples_lebesgue", "must be >= 1");
  try {
    sampling_scheme_from_string(sampling_scheme);
  } catch (const DomainError&) {
    throw ConfigError("sampling_scheme", "must be 'independent' or 'stratified'");
  }
  if (out_dir.empty()) throw ConfigError("out_dir", "must not be empty");
  if (!(u_radius > 0.0 && u_radius < 0.5)) throw ConfigError("u_radius", "must lie in (0, 0.5)");
  if (identity_sweep < 1) throw ConfigError("identity_sweep", "must be >= 1");
  if (quadrature_sweep < 1) throw ConfigError("quadrature_sweep", "must be >= 1");
  if (schwarzian_sweep < 1) throw ConfigError("schwarzian_sweep", "must be >= 1");
  if (threads < 0) throw ConfigError("threads", "must be >= 0");
}

RotationNumber ExperimentConfig::rotation_number() const {
  if (target.is_string()) {
    const auto name = target.get<std::string>();
    if (name == "golden") return RotationNumber::golden();
    if (name == "silver") return RotationNumber::silver();
    throw ConfigError("target", "unknown named constant '" + name + "'");
  }
  if (!target.is_array() || target.empty())
    throw ConfigError("target", "must be \"golden\", \"silver\" or a list of positive integers");
  std::vector<std::int64_t> a;
  for (const auto& v : target) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 1)
      throw ConfigError("target", "coefficients must be positive integers");
    a.push_back(v.get<std::int64_t>());
  }
  try {
    return RotationNumber::from_cf(ContinuedFraction(std::move(a)));
  } catch (const Error& e) {
    throw ConfigError("target", e.what());
  }
}

Family ExperimentConfig::map_family() const { return family_from_string(family); }

int ExperimentConfig::worker_count() const {
  const int cap = threads_from_env();
  return threads > 0 ? std::min(threads, cap) : cap;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  ExperimentConfig c;
  static const std::set<std::string> known{
      "family",          "target",           "tune_depth",          "depth",
      "exponent_min_level", "refinement",    "refinements",         "discrepancy_min_level",
      "discrepancy_max_level", "samples_mu", "samples_lebesgue",    "sampling_scheme",
      "seed",            "out_dir",          "u_radius",            "truncate_on_precision",
      "identity_sweep",  "quadrature_sweep", "schwarzian_sweep",    "threads"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError(key, "unknown field");
  auto read = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = take<std::decay_t<decltype(field)>>(j.at(key), key);
  };
  read("family", c.family);
  if (j.contains("target")) c.target = j.at("target");
  read("tune_depth", c.tune_depth);
  read("depth", c.depth);
  read("exponent_min_level", c.exponent_min_level);
  read("refinement", c.refinement);
  read("refinements", c.refinements);
  read("discrepancy_min_level", c.discrepancy_min_level);
  read("discrepancy_max_level", c.discrepancy_max_level);
  read("samples_mu", c.samples_mu);
  read("samples_lebesgue", c.samples_lebesgue);
  read("sampling_scheme", c.sampling_scheme);
  read("seed", c.seed);
  read("out_dir", c.out_dir);
  read("u_radius", c.u_radius);
  read("truncate_on_precision", c.truncate_on_precision);
  read("identity_sweep", c.identity_sweep);
  read("quadrature_sweep", c.quadrature_sweep);
  read("schwarzian_sweep", c.schwarzian_sweep);
  read("threads", c.threads);
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"family", c.family},
          {"target", c.target},
          {"tune_depth", c.tune_depth},
          {"depth", c.depth},
          {"exponent_min_level", c.exponent_min_level},
          {"refinement", c.refinement},
          {"refinements", c.refinements},
          {"discrepancy_min_level", c.discrepancy_min_level},
          {"discrepancy_max_level", c.discrepancy_max_level},
          {"samples_mu", c.samples_mu},
          {"samples_lebesgue", c.samples_lebesgue},
          {"sampling_scheme", c.sampling_scheme},
          {"seed", c.seed},
          {"out_dir", c.out_dir},
          {"u_radius", c.u_radius},
          {"truncate_on_precision", c.truncate_on_precision},
          {"identity_sweep", c.identity_sweep},
          {"quadrature_sweep", c.quadrature_sweep},
          {"schwarzian_sweep", c.schwarzian_sweep},
          {"threads", c.threads}};
}

Report cmd_tune(const ExperimentConfig& config) {
  Run run(config, "tune");
  const auto rho = config.rotation_number();
  const auto t = tune(config, rho);
  const auto table = convergent_table(rho.cf(), config.tune_depth);

  CsvFile csv(run.path("closest_returns.csv"), {"level", "a", "q", "p", "offset"});
  nlohmann::json rows = nlohmann::json::array();
  LiftPoint x;
  std::int64_t steps = 0;
  for (int n = 1; n <= config.tune_depth; ++n) {
    const auto& c = table[static_cast<std::size_t>(n)];
    for (; steps < c.q; ++steps) x = t.map.step(x);
    const double offset = x.minus(LiftPoint{}, c.p);
    csv.row(n, rho.cf().a(n), c.q, c.p, offset);
    rows.push_back({{"level", n}, {"q", c.q}, {"p", c.p}, {"offset", offset}});
  }
  auto results = tune_json(t);
  results["closest_returns"] = std::move(rows);
  return run.finish(std::move(results));
}

Report cmd_exponents(const ExperimentConfig& config) {
  Run run(config, "exponents");
  const auto rho = config.rotation_number();
  const auto t = tune(config, rho);
  const ConjugacyLadder ladder(t.map, rho, config.depth, config.truncate_on_precision);
  note_truncation(run, ladder);
  const int n_max = ladder.n_max();
  const int n_min = std::min(config.exponent_min_level, n_max);
  const auto scheme = sampling_scheme_from_string(config.sampling_scheme);
  const int threads = config.worker_count();

  const auto lebesgue = estimate_exponents(ladder, SamplingMeasure::Lebesgue, config.samples_lebesgue, n_min, n_max,
                                           config.seed, threads, scheme);
  const auto mu = estimate_exponents(ladder, SamplingMeasure::Invariant, config.samples_mu, n_min, n_max, config.seed,
                                     threads, scheme);
  const auto gamma_from_lebesgue = gamma_exponents(lebesgue);
  const auto gamma_from_mu = gamma_exponents(mu);
  const auto hd = hausdorff_estimate(mu);
  const auto profile = singularity_profile(ladder, kSingularityMinLevel, n_max);

  {
    CsvFile csv(run.path("exponent_samples.csv"), {"measure", "seed", "sample", "x", "level", "r"});
    for (const auto* est : {&lebesgue, &mu})
      for (const auto& s : est->samples)
        for (std::size_t j = 0; j < s.r.size(); ++j)
          csv.row(to_string(est->sampling), est->seed, s.index, s.x, est->n_min + static_cast<int>(j), s.r[j]);
  }
  {
    CsvFile csv(run.path("exponent_levels.csv"), {"quantity", "measure", "level", "mean", "q05", "q50", "q95"});
    const std::pair<const char*, const ExponentEstimate*> rows[] = {
        {"tau", &lebesgue}, {"tau", &mu}, {"gamma", &gamma_from_lebesgue}, {"gamma", &gamma_from_mu}};
    for (const auto& [quantity, est] : rows)
      for (const auto& l : est->levels) csv.row(quantity, to_string(est->sampling), l.level, l.mean, l.q05, l.q50, l.q95);
  }
  {
    CsvFile csv(run.path("singularity_profile.csv"), {"level", "lebesgue_fraction"});
    for (const auto& p : profile) csv.row(p.level, p.lebesgue_fraction);
  }

  nlohmann::json sing = nlohmann::json::array();
  for (const auto& p : profile) sing.push_back({{"level", p.level}, {"lebesgue_fraction", p.lebesgue_fraction}});
  nlohmann::json results = {{"tuning", tune_json(t)},
                            {"levels_computed", n_max},
                            {"tau_lebesgue", summary_json(lebesgue)},
                            {"tau_mu", summary_json(mu)},
                            {"gamma_from_lebesgue", summary_json(gamma_from_lebesgue)},
                            {"gamma_from_mu", summary_json(gamma_from_mu)},
                            {"hausdorff", {{"value", hd.value}, {"band_lo", hd.band_lo}, {"band_hi", hd.band_hi}}},
                            {"singularity_profile", std::move(sing)}};
  if (ladder.truncated_at()) results["truncated_at"] = *ladder.truncated_at();
  return run.finish(std::move(results));
}

Report cmd_discrepancy(const ExperimentConfig& config) {
  Run run(config, "discrepancy");
  const auto rho = config.rotation_number();
  const auto t = tune(config, rho);
  const int r_max = *std::max_element(config.refinements.begin(), config.refinements.end());
  const int wanted = std::min<int>((config.discrepancy_max_level + 1) * r_max, static_cast<int>(rho.cf().size()) - 1);
  const ConjugacyLadder ladder(t.map, rho, wanted, config.truncate_on_precision);
  note_truncation(run, ladder);
  const int threads = config.worker_count();

  CsvFile csv(run.path("discrepancy.csv"),
              {"r", "n", "level", "box", "delta", "entropy", "gibbs_gap", "atom_count"});
  CsvFile summary_csv(run.path("discrepancy_summary.csv"), {"r", "n", "level", "boxes", "min_delta", "max_delta",
                                                            "min_gibbs_gap"});
  nlohmann::json summary = nlohmann::json::array();
  for (int r : config.refinements) {
    const int n_hi = std::min(config.discrepancy_max_level, ladder.n_max() / r - 1);
    if (n_hi < config.discrepancy_max_level)
      run.warn("r=" + std::to_string(r) + ": levels above n=" + std::to_string(n_hi) + " not computed");
    if (n_hi < config.discrepancy_min_level) continue;
    const auto rows = discrepancy_table(ladder, config.discrepancy_min_level, n_hi, r, threads);
    std::map<int, std::vector<const DiscrepancyRow*>> by_level;
    for (const auto& row : rows) {
      csv.row(row.r, row.n, row.n * row.r, row.box, row.delta, row.entropy, row.gibbs_gap, row.atom_count);
      by_level[row.n].push_back(&row);
      if (row.gibbs_gap < kGibbsThreshold)
        run.fail("negative Gibbs gap " + fmt(row.gibbs_gap) + " at r=" + std::to_string(r) +
                 " n=" + std::to_string(row.n) + " box=" + std::to_string(row.box));
    }
    for (const auto& [n, level_rows] : by_level) {
      double lo = INFINITY, hi = -INFINITY, gap = INFINITY;
      for (const auto* row : level_rows) {
        lo = std::min(lo, row->delta);
        hi = std::max(hi, row->delta);
        gap = std::min(gap, row->gibbs_gap);
      }
      summary_csv.row(r, n, n * r, level_rows.size(), lo, hi, gap);
      summary.push_back({{"r", r}, {"n", n}, {"level", n * r}, {"boxes", level_rows.size()},
                         {"min_delta", lo}, {"max_delta", hi}, {"min_gibbs_gap", gap}});
    }
  }
  nlohmann::json headline = nlohmann::json::array();
  for (const auto& row : summary)
    if (row["r"] == config.refinement) headline.push_back({{"n", row["n"]}, {"min_delta", row["min_delta"]}});
  nlohmann::json results = {{"tuning", tune_json(t)},
                            {"levels_computed", ladder.n_max()},
                            {"summary", summary},
                            {"min_delta_at_refinement", std::move(headline)}};
  if (ladder.truncated_at()) results["truncated_at"] = *ladder.truncated_at();
  return run.finish(std::move(results));
}

Report cmd_crossratio_check(const ExperimentConfig& config) {
  Run run(config, "crossratio-check");
  CsvFile csv(run.path("crossratio_residuals.csv"), {"sweep", "index", "a", "b", "c", "d", "value"});
  auto rng_for = [&config](std::uint64_t sweep, std::size_t i) {
    return SplitMix64::for_index(config.seed ^ (sweep << 56), i);
  };
  auto record = [&csv](const char* sweep, std::size_t i, const Quadruple& q, double value) {
    csv.row(sweep, i, q.a, q.b, q.c, q.d, value);
  };
  auto offend = [&run](const char* sweep, std::size_t i, const Quadruple& q, double value) {
    run.fail(std::string(sweep) + " #" + std::to_string(i) + " (" + fmt(q.a) + ", " + fmt(q.b) + ", " + fmt(q.c) +
             ", " + fmt(q.d) + "): " + fmt(value));
  };

  double identity_max = 0.0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(config.identity_sweep); ++i) {
    auto rng = rng_for(1, i);
    const auto q = random_quadruple(rng, 0.0, 1.0, 0.0);
    const double res = std::abs(cr(q) + poin(q) - 1.0);
    record("identity", i, q, res);
    identity_max = std::max(identity_max, res);
    if (!(res < kIdentityThreshold)) offend("identity", i, q, res);
  }

  std::vector<double> quad(static_cast<std::size_t>(config.quadrature_sweep));
  std::vector<Quadruple> quad_q(quad.size());
  parallel_for(quad.size(), config.worker_count(), [&](std::size_t i) {
    auto rng = rng_for(2, i);
    quad_q[i] = random_quadruple(rng, 0.0, 1.0, 1e-3);
    quad[i] = std::abs(poin_integral(quad_q[i]) + std::log(poin(quad_q[i])));
  });
  double quadrature_max = 0.0;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    record("quadrature", i, quad_q[i], quad[i]);
    quadrature_max = std::max(quadrature_max, quad[i]);
    if (!(quad[i] < kQuadratureThreshold)) offend("quadrature", i, quad_q[i], quad[i]);
  }

  const auto cubic = CircleMap::cubic_proxy();
  const auto sine = CircleMap::critical_sine(0.5, config.u_radius);
  double cubic_min = INFINITY, sine_min = INFINITY, schwarzian_max = -INFINITY;
  for (std::size_t i = 0; i < static_cast<std::size_t>(config.schwarzian_sweep); ++i) {
    auto rng = rng_for(3, i);
    const auto qc = random_quadruple(rng, 0.01, 1.0, 1e-6);
    const double dc = dpoin(qc, cubic, 1).dpoin;
    record("cubic_dpoin", i, qc, dc);
    cubic_min = std::min(cubic_min, dc);
    if (!(dc >= 1.0 - kExpansionThreshold)) offend("cubic_dpoin", i, qc, dc);

    const auto qs = random_quadruple(rng, config.u_radius, 1.0 - config.u_radius, 1e-6);
    const double ds = dpoin(qs, sine, 1).dpoin;
    record("sine_dpoin", i, qs, ds);
    sine_min = std::min(sine_min, ds);
    if (!(ds >= 1.0 - kExpansionThreshold)) offend("sine_dpoin", i, qs, ds);
    schwarzian_max = std::max({schwarzian_max, schwarzian(sine, qs.a), schwarzian(cubic, qc.a)});
  }
  if (!(schwarzian_max < 0.0)) run.fail("Schwarzian sweep met a nonnegative value " + fmt(schwarzian_max));

  return run.finish({{"identity", {{"count", config.identity_sweep}, {"max_residual", identity_max},
                                   {"threshold", kIdentityThreshold}}},
                     {"quadrature", {{"count", config.quadrature_sweep}, {"max_residual", quadrature_max},
                                     {"threshold", kQuadratureThreshold}}},
                     {"schwarzian", {{"count", config.schwarzian_sweep},
                                     {"cubic_min_dpoin", cubic_min},
                                     {"sine_min_dpoin", sine_min},
                                     {"max_schwarzian", schwarzian_max},
                                     {"threshold", 1.0 - kExpansionThreshold}}}});
}

}  // namespace scl
