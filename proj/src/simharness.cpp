#include "anytime_ville/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "anytime_ville/errors.hpp"
#include "anytime_ville/parallel.hpp"
#include "anytime_ville/rng.hpp"

namespace av::sim {

namespace {

constexpr std::int64_t kRepChunk = 64;

// M_n - M_{n-1} when S stays at 0.
double floor_step(std::int64_t n) {
  const double nn = static_cast<double>(n);
  return -(std::log1p(nn) - std::log(nn)) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

CoverageReport run_coverage(const CoverageConfig& cfg) {
  const lil::LilParams params(cfg.delta, cfg.kappa);
  if (cfg.n_steps < 0) throw InvalidQuery("n_steps must be >= 0");
  if (cfg.n_reps < 100) throw InvalidQuery("n_reps must be >= 100");
  if (cfg.distribution == Distribution::ScaledNormal && !(cfg.sigma > 0.0 && std::isfinite(cfg.sigma))) {
    throw InvalidQuery("sigma must be > 0");
  }
  const double sigma = cfg.distribution == Distribution::ScaledNormal ? cfg.sigma : 1.0;

  std::vector<double> bound(static_cast<std::size_t>(cfg.n_steps) + 1, 0.0);
  for (std::int64_t n = 1; n <= cfg.n_steps; ++n) {
    bound[static_cast<std::size_t>(n)] = lil::sum_bound(static_cast<double>(n), params, cfg.form);
  }

  const std::int64_t n_chunks = (cfg.n_reps + kRepChunk - 1) / kRepChunk;
  std::vector<std::vector<std::int64_t>> first(static_cast<std::size_t>(n_chunks));
  detail::for_each_chunk(cfg.n_reps, kRepChunk, cfg.threads,
                         [&](std::int64_t chunk, std::int64_t begin, std::int64_t end) {
                           auto& out = first[static_cast<std::size_t>(chunk)];
                           for (std::int64_t r = begin; r < end; ++r) {
                             const rng::CounterStream stream(cfg.seed, static_cast<std::uint64_t>(r));
                             double s = 0.0;
                             std::pair<double, double> z{};
                             for (std::int64_t n = 1; n <= cfg.n_steps; ++n) {
                               const std::int64_t step = n - 1;
                               if (step % 2 == 0) z = stream.normal_pair(static_cast<std::uint64_t>(step / 2));
                               const double x = sigma * (step % 2 == 0 ? z.first : z.second);
                               s += x / sigma;
                               if (std::fabs(s) > bound[static_cast<std::size_t>(n)]) {
                                 out.push_back(n);
                                 break;
                               }
                             }
                           }
                         });

  std::map<std::int64_t, std::int64_t> counts;
  CoverageReport report;
  report.n_reps = cfg.n_reps;
  for (const auto& chunk : first) {
    for (std::int64_t t : chunk) ++counts[t];
    report.violations += static_cast<std::int64_t>(chunk.size());
  }
  report.violation_rate = static_cast<double>(report.violations) / static_cast<double>(cfg.n_reps);
  report.histogram.assign(counts.begin(), counts.end());
  return report;
}

bool MartingaleCheckReport::drift_ok() const {
  return std::all_of(drift.begin(), drift.end(),
                     [](const StepDrift& d) { return d.mean <= 3.0 * d.std_error; });
}

std::vector<std::int64_t> drift_check_steps(std::int64_t n_steps) {
  std::vector<std::int64_t> steps;
  for (std::int64_t decade = 1; decade <= n_steps; decade *= 10) {
    for (std::int64_t m : {1, 2, 5}) {
      if (decade * m <= n_steps) steps.push_back(decade * m);
    }
  }
  return steps;
}

MartingaleCheckReport run_martingale_check(const MartingaleCheckConfig& cfg) {
  if (cfg.n_paths < 2) throw InvalidQuery("n_paths must be >= 2");
  if (cfg.n_steps < 0) throw InvalidQuery("n_steps must be >= 0");
  const auto steps = drift_check_steps(cfg.n_steps);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

  struct Partial {
    std::int64_t floor_violations = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    double sum_m0 = 0.0;
    std::vector<double> sum;
    std::vector<double> sum_sq;
  };
  const std::int64_t chunk_size = 256;
  const std::int64_t n_chunks = (cfg.n_paths + chunk_size - 1) / chunk_size;
  std::vector<Partial> partials(static_cast<std::size_t>(n_chunks));

  detail::for_each_chunk(cfg.n_paths, chunk_size, cfg.threads,
                         [&](std::int64_t chunk, std::int64_t begin, std::int64_t end) {
                           Partial p;
                           p.sum.assign(steps.size(), 0.0);
                           p.sum_sq.assign(steps.size(), 0.0);
                           for (std::int64_t path = begin; path < end; ++path) {
                             const rng::CounterStream stream(cfg.seed, static_cast<std::uint64_t>(path));
                             double s = 0.0;
                             double m_prev = lil::martingale_value(0.0, 0.0);
                             p.sum_m0 += m_prev;
                             std::size_t next_check = 0;
                             std::pair<double, double> z{};
                             for (std::int64_t n = 1; n <= cfg.n_steps; ++n) {
                               const std::int64_t step = n - 1;
                               if (!cfg.zero_noise) {
                                 if (step % 2 == 0) z = stream.normal_pair(static_cast<std::uint64_t>(step / 2));
                                 s += step % 2 == 0 ? z.first : z.second;
                               }
                               const double nn = static_cast<double>(n);
                               // M_n - floor is exactly I(S_n / sqrt(n + 1)).
                               const double margin = lil::I_series(s / std::sqrt(nn + 1.0));
                               const double m = margin - std::log1p(nn) * inv_sqrt_2pi;
                               if (margin < 0.0) ++p.floor_violations;
                               p.min_margin = std::min(p.min_margin, margin);
                               if (next_check < steps.size() && steps[next_check] == n) {
                                 // Centred on the noiseless increment to keep the variance sum clean.
                                 const double inc = m - m_prev - floor_step(n);
                                 p.sum[next_check] += inc;
                                 p.sum_sq[next_check] += inc * inc;
                                 ++next_check;
                               }
                               m_prev = m;
                             }
                           }
                           partials[static_cast<std::size_t>(chunk)] = std::move(p);
                         });

  MartingaleCheckReport report;
  report.n_paths = cfg.n_paths;
  report.n_steps = cfg.n_steps;
  report.min_floor_margin = std::numeric_limits<double>::infinity();
  std::vector<double> sum(steps.size(), 0.0);
  std::vector<double> sum_sq(steps.size(), 0.0);
  double sum_m0 = 0.0;
  for (const Partial& p : partials) {
    report.floor_violations += p.floor_violations;
    report.min_floor_margin = std::min(report.min_floor_margin, p.min_margin);
    sum_m0 += p.sum_m0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      sum[i] += p.sum[i];
      sum_sq[i] += p.sum_sq[i];
    }
  }
  const double count = static_cast<double>(cfg.n_paths);
  report.mean_m0 = sum_m0 / count;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    StepDrift d;
    d.n = steps[i];
    const double centred = sum[i] / count;
    d.mean = centred + floor_step(d.n);
    const double var = std::max(0.0, (sum_sq[i] - count * centred * centred) / (count - 1.0));
    d.std_error = std::sqrt(var / count);
    report.drift.push_back(d);
  }
  return report;
}

}  // namespace av::sim
