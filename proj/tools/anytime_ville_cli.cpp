#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "anytime_ville/anytime_ville.h"
#include "json.hpp"

namespace {

using json = nlohmann::json;

// Thrown to leave main with an exit code after printing a diagnostic.
struct Exit {
  int code;
};

[[noreturn]] void validation_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  throw Exit{2};
}

void check(av_status status, const std::string& context) {
  if (status == AV_OK) return;
  std::cerr << "error: " << context << ": " << av_status_name(status) << ": " << av_last_error()
            << "\n";
  switch (status) {
    case AV_ERR_NUMERICAL:
    case AV_ERR_OVERFLOW:
    case AV_ERR_IO:
    case AV_ERR_INTERNAL:
      throw Exit{1};
    default:
      throw Exit{2};
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CurveDeleter {
  void operator()(av_curve* c) const { av_curve_free(c); }
};
using CurvePtr = std::unique_ptr<av_curve, CurveDeleter>;

// A curve argument is inline JSON or @path to a JSON file.
CurvePtr load_curve(const std::string& arg, const char* flag) {
  std::string text = arg;
  if (!arg.empty() && arg[0] == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) validation_error(std::string(flag) + ": cannot read " + arg.substr(1));
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  av_curve* c = nullptr;
  check(av_curve_from_json(text.c_str(), &c), flag);
  return CurvePtr(c);
}

json describe(const av_curve* c) {
  char* text = nullptr;
  check(av_curve_to_json(c, &text), "describe");
  json j = json::parse(text);
  av_string_free(text);
  return j;
}

struct Common {
  std::string output;
  std::string format = "json";
  unsigned threads = 0;
};

void emit(const Common& common, const std::string& body) {
  if (common.output.empty()) {
    std::cout << body;
    std::cout.flush();
    return;
  }
  std::ofstream out(common.output);
  if (!out) {
    std::cerr << "error: cannot open " << common.output << "\n";
    throw Exit{1};
  }
  out << body;
  if (!out) {
    std::cerr << "error: cannot write " << common.output << "\n";
    throw Exit{1};
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void add_common(CLI::App* sub, Common& common, const std::string& default_format) {
  common.format = default_format;
  sub->add_option("--output,-o", common.output, "Write output to this file instead of stdout");
  sub->add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--threads", common.threads, "Worker threads (0 = all cores)")
      ->envname("ANYTIME_VILLE_THREADS");
}

struct BoundArgs {
  Common common;
  std::string f;
  std::string g;
  std::optional<double> m0;
  std::int64_t horizon = 0;
  bool continuous = false;
  bool describe = false;
};

int run_bound(const BoundArgs& a) {
  const CurvePtr f = load_curve(a.f, "--f");
  const CurvePtr g = load_curve(a.g, "--g");
  if (a.describe) {
    emit(a.common, dump({{"f", describe(f.get())}, {"g", describe(g.get())}}));
    return 0;
  }
  if (!a.m0) validation_error("--m0 is required (initial expectation E[M_0] in [-f(0), g(0)])");
  double lower = 0.0;
  double upper = 0.0;
  bool divergent = false;
  json out;
  if (a.continuous) {
    av_continuous c{};
    check(av_continuous_bound(f.get(), g.get(), *a.m0, &c), "continuous bound");
    lower = upper = c.value;
    divergent = c.divergent != 0;
    out = {{"lower", lower}, {"upper", upper}, {"divergent", divergent}};
    if (!divergent) out["exponent"] = c.exponent;
  } else {
    av_bracket b{};
    check(av_crossing_bound(f.get(), g.get(), *a.m0, a.horizon, &b), "crossing bound");
    lower = b.lower;
    upper = b.upper;
    out = {{"lower", lower},
           {"upper", upper},
           {"divergent", false},
           {"truncation_horizon", b.truncation_horizon}};
  }
  if (a.common.format == "csv") {
    emit(a.common, "lower,upper,divergent\n" + fmt(lower) + "," + fmt(upper) + "," +
                       (divergent ? "true" : "false") + "\n");
  } else {
    emit(a.common, dump(out));
  }
  return 0;
}

struct SimulateArgs {
  Common common;
  std::string f;
  std::string g;
  std::optional<double> m0;
  std::int64_t horizon = 100'000;
  std::int64_t paths = 0;
  std::optional<std::uint64_t> seed;
  std::string dump_paths;
  std::int64_t dump_count = 100;
  bool describe = false;
};

int run_simulate(const SimulateArgs& a) {
  const CurvePtr f = load_curve(a.f, "--f");
  const CurvePtr g = load_curve(a.g, "--g");
  if (a.describe) {
    emit(a.common, dump({{"f", describe(f.get())}, {"g", describe(g.get())}}));
    return 0;
  }
  if (!a.m0) validation_error("--m0 is required (initial expectation E[M_0] in [-f(0), g(0)])");
  if (!a.seed) validation_error("--seed is required; there is no time-based default");
  if (a.paths < 1) validation_error("--paths must be >= 1");
  if (a.horizon < 1) validation_error("--horizon must be >= 1");
  const av_sim_config cfg{*a.m0, a.horizon, a.paths, *a.seed, a.common.threads};
  av_sim_summary s{};
  check(av_simulate(f.get(), g.get(), &cfg, &s), "simulate");
  if (!a.dump_paths.empty()) {
    const std::int64_t count = std::min(a.dump_count, a.paths);
    check(av_dump_paths(f.get(), g.get(), &cfg, count, a.dump_paths.c_str()), "dump paths");
  }
  if (a.common.format == "csv") {
    emit(a.common, "n_paths,n_crossed,empirical_prob,std_error\n" + std::to_string(s.n_paths) +
                       "," + std::to_string(s.n_crossed) + "," + fmt(s.empirical_prob) + "," +
                       fmt(s.std_error) + "\n");
  } else {
    emit(a.common, dump({{"n_paths", s.n_paths},
                         {"n_crossed", s.n_crossed},
                         {"empirical_prob", s.empirical_prob},
                         {"std_error", s.std_error},
                         {"horizon", a.horizon},
                         {"seed", *a.seed}}));
  }
  return 0;
}

struct LilCurveArgs {
  Common common;
  std::optional<double> delta;
  double kappa = 1.0;
  std::int64_t n_max = 10'000;
  std::string grid = "linear";
  std::int64_t points = 200;
  std::string form = "explicit";
  bool normalized = false;
};

int run_lil_curve(const LilCurveArgs& a) {
  if (!a.delta) validation_error("--delta is required");
  if (a.n_max < 0) validation_error("--n-max must be >= 0");
  std::vector<double> ns;
  if (a.grid == "linear") {
    for (std::int64_t n = 0; n <= a.n_max; ++n) ns.push_back(static_cast<double>(n));
  } else {
    if (a.points < 2) validation_error("--points must be >= 2");
    ns.push_back(0.0);
    const double top = std::log(static_cast<double>(std::max<std::int64_t>(a.n_max, 1)));
    for (std::int64_t i = 0; i < a.points; ++i) {
      const double n = std::round(std::exp(top * static_cast<double>(i) / (a.points - 1)));
      if (n > ns.back() && n <= static_cast<double>(a.n_max)) ns.push_back(n);
    }
  }
  const av_lil_form form = a.form == "simpler"    ? AV_LIL_SIMPLER
                           : a.form == "implicit" ? AV_LIL_IMPLICIT
                                                  : AV_LIL_EXPLICIT;
  std::vector<double> bound(ns.size());
  check(av_lil_curve(*a.delta, a.kappa, form, a.normalized ? 1 : 0, ns.data(), ns.size(),
                     bound.data()),
        "lil-curve");
  if (a.common.format == "json") {
    json rows = json::array();
    for (std::size_t i = 0; i < ns.size(); ++i) rows.push_back({{"n", ns[i]}, {"bound", bound[i]}});
    emit(a.common, dump({{"delta", *a.delta},
                         {"kappa", a.kappa},
                         {"form", a.form},
                         {"normalized", a.normalized},
                         {"rows", rows}}));
    return 0;
  }
  std::string body = "n,bound\n";
  for (std::size_t i = 0; i < ns.size(); ++i) body += fmt(ns[i]) + "," + fmt(bound[i]) + "\n";
  emit(a.common, body);
  return 0;
}

struct CoverageArgs {
  Common common;
  std::optional<double> delta;
  std::int64_t steps = 10'000;
  std::int64_t reps = 10'000;
  std::optional<std::uint64_t> seed;
  double kappa = 1.0;
  double sigma = 1.0;
  std::string form = "explicit";
  std::string histogram;
};

int run_coverage(const CoverageArgs& a) {
  if (!a.delta) validation_error("--delta is required");
  if (!a.seed) validation_error("--seed is required; there is no time-based default");
  const av_lil_form form = a.form == "simpler"    ? AV_LIL_SIMPLER
                           : a.form == "implicit" ? AV_LIL_IMPLICIT
                                                  : AV_LIL_EXPLICIT;
  const av_coverage_config cfg{*a.delta, a.steps, a.reps, *a.seed, a.kappa, a.sigma, form,
                               a.common.threads};
  av_coverage_report* raw = nullptr;
  check(av_coverage_run(&cfg, &raw), "coverage");
  std::unique_ptr<av_coverage_report, void (*)(av_coverage_report*)> report(raw, av_coverage_free);

  std::string csv = "t,count\n";
  json hist = json::array();
  for (std::size_t i = 0; i < av_coverage_histogram_size(report.get()); ++i) {
    std::int64_t t = 0;
    std::int64_t count = 0;
    check(av_coverage_histogram_entry(report.get(), i, &t, &count), "histogram");
    csv += std::to_string(t) + "," + std::to_string(count) + "\n";
    hist.push_back({{"t", t}, {"count", count}});
  }
  if (!a.histogram.empty()) {
    std::ofstream out(a.histogram);
    out << csv;
    if (!out) {
      std::cerr << "error: cannot write " << a.histogram << "\n";
      return 1;
    }
  }
  if (a.common.format == "csv") {
    emit(a.common, csv);
    return 0;
  }
  const std::int64_t reps = av_coverage_reps(report.get());
  const double rate = av_coverage_violation_rate(report.get());
  emit(a.common, dump({{"delta", *a.delta},
                       {"kappa", a.kappa},
                       {"n_steps", a.steps},
                       {"n_reps", reps},
                       {"seed", *a.seed},
                       {"violations", av_coverage_violations(report.get())},
                       {"violation_rate", rate},
                       {"std_error", std::sqrt(rate * (1.0 - rate) / static_cast<double>(reps))},
                       {"first_violation_times", hist}}));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Ville bounds, floor-hugger simulation and finite-time LIL curves"};
  app.require_subcommand(1);

  BoundArgs bound;
  auto* b = app.add_subcommand("bound", "Crossing-probability bound for a (f, g, m0) triple");
  add_common(b, bound.common, "json");
  b->add_option("--f", bound.f, "Lower-bound curve f as JSON or @file")->required();
  b->add_option("--g", bound.g, "Threshold curve g as JSON or @file")->required();
  b->add_option("--m0", bound.m0, "Initial expectation E[M_0]");
  b->add_option("--horizon", bound.horizon, "Truncation horizon (default 1e6)");
  b->add_flag("--continuous", bound.continuous, "Integral form instead of the discrete product");
  b->add_flag("--describe", bound.describe, "Print the parsed curves as canonical JSON");

  SimulateArgs simulate;
  auto* s = app.add_subcommand("simulate", "Monte Carlo crossing frequency of the floor-hugger");
  add_common(s, simulate.common, "json");
  s->add_option("--f", simulate.f, "Lower-bound curve f as JSON or @file")->required();
  s->add_option("--g", simulate.g, "Threshold curve g as JSON or @file")->required();
  s->add_option("--m0", simulate.m0, "Initial expectation E[M_0]");
  s->add_option("--horizon", simulate.horizon, "Number of steps per path");
  s->add_option("--paths", simulate.paths, "Number of paths")->required();
  s->add_option("--seed", simulate.seed, "RNG seed");
  s->add_option("--dump-paths", simulate.dump_paths, "Write CSV path_id,n,M,K for the first paths");
  s->add_option("--dump-count", simulate.dump_count, "Paths written by --dump-paths");
  s->add_flag("--describe", simulate.describe, "Print the parsed curves as canonical JSON");

  LilCurveArgs lil;
  auto* l = app.add_subcommand("lil-curve", "Finite-time LIL confidence bound on a grid of n");
  add_common(l, lil.common, "csv");
  l->add_option("--delta", lil.delta, "Confidence level in (0, 3/5]");
  l->add_option("--kappa", lil.kappa, "Scale kappa > 0");
  l->add_option("--n-max", lil.n_max, "Largest n");
  l->add_option("--grid", lil.grid, "Grid of n")->check(CLI::IsMember({"log", "linear"}));
  l->add_option("--points", lil.points, "Points on a log grid");
  l->add_option("--form", lil.form, "Bound form")
      ->check(CLI::IsMember({"explicit", "simpler", "implicit"}));
  l->add_flag("--normalized", lil.normalized, "Report the bound on |S_n|/sqrt(n+1)");

  CoverageArgs coverage;
  auto* c = app.add_subcommand("coverage", "Empirical violation rate of the LIL bound");
  add_common(c, coverage.common, "json");
  c->add_option("--delta", coverage.delta, "Confidence level in (0, 3/5]");
  c->add_option("--steps", coverage.steps, "Steps per repetition");
  c->add_option("--reps", coverage.reps, "Repetitions (>= 100)");
  c->add_option("--seed", coverage.seed, "RNG seed");
  c->add_option("--kappa", coverage.kappa, "Scale of the bound");
  c->add_option("--sigma", coverage.sigma, "Standard deviation of the data");
  c->add_option("--form", coverage.form, "Bound form")
      ->check(CLI::IsMember({"explicit", "simpler", "implicit"}));
  c->add_option("--histogram", coverage.histogram, "Write CSV t,count of first violation times");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (b->parsed()) return run_bound(bound);
    if (s->parsed()) return run_simulate(simulate);
    if (l->parsed()) return run_lil_curve(lil);
    if (c->parsed()) return run_coverage(coverage);
  } catch (const Exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
