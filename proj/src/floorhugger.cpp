#include "anytime_ville/floorhugger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "anytime_ville/errors.hpp"
#include "anytime_ville/parallel.hpp"
#include "anytime_ville/rng.hpp"

namespace av::floorhugger {

namespace {

constexpr std::int64_t kChunk = 8192;
// Stream ids at and above this are reserved for one-step K transitions.
constexpr std::uint64_t kTransitionStreams = std::uint64_t{1} << 63;

double seed_s_at_horizon(const Curve& f, const Curve& g, std::int64_t horizon,
                         double* lower) {
  // s(H) = prod_{t >= H} (1 - p_t) lies in [exp(-\int_H^inf f'/(f+g)), 1].
  double lo = 0.0;
  if (std::holds_alternative<Curve::Constant>(f.family())) {
    lo = 1.0;
  } else if (const auto* tab = std::get_if<Curve::Tabulated>(&f.family())) {
    lo = tab->extend_constant && static_cast<double>(horizon) >= tab->x.back() ? 1.0 : 0.0;
  } else if (g.closed_form()) {
    const FloorIntegral tail = floor_integral(f, g, static_cast<double>(horizon));
    lo = tail.converged && !tail.divergent ? std::exp(-tail.value) : 0.0;
  }
  *lower = lo;
  return 0.5 * (lo + 1.0);
}

}  // namespace

double jump_prob(const Curve& f, const Curve& g, std::int64_t n) {
  if (n < 0) throw DomainError("jump_prob at n=" + std::to_string(n));
  const double t = static_cast<double>(n);
  const double f_next = f.eval(t + 1.0);
  return (f_next - f.eval(t)) / (g.eval(t + 1.0) + f_next);
}

FloorTable::FloorTable(const Curve& f, const Curve& g, double m0, std::int64_t horizon)
    : horizon_(horizon) {
  validate_query(f, g, m0);
  if (horizon < 1) throw InvalidQuery("horizon must be >= 1");
  const auto size = static_cast<std::size_t>(horizon) + 1;
  floor_.resize(size);
  threshold_.resize(size);
  jump_.assign(size, 0.0);
  log_survival_.assign(size, 0.0);
  for (std::size_t n = 0; n < size; ++n) {
    floor_[n] = f.eval(static_cast<double>(n));
    threshold_[n] = g.eval(static_cast<double>(n));
  }
  start_high_ = (m0 + floor_[0]) / (threshold_[0] + floor_[0]);
  for (std::size_t n = 0; n + 1 < size; ++n) {
    jump_[n] = (floor_[n + 1] - floor_[n]) / (threshold_[n + 1] + floor_[n + 1]);
    log_survival_[n + 1] = log_survival_[n] + std::log1p(-jump_[n]);
  }

  double lower_h = 0.0;
  const double mid_h = seed_s_at_horizon(f, g, horizon, &lower_h);
  s_mid_.resize(size);
  s_lower_.resize(size);
  s_upper_.resize(size);
  const double log_total = log_survival_.back();
  for (std::size_t n = 0; n < size; ++n) {
    // prod_{n <= t < H} (1 - p_t)
    const double segment = std::exp(log_total - log_survival_[n]);
    s_mid_[n] = segment * mid_h;
    s_lower_[n] = segment * lower_h;
    s_upper_[n] = segment;
  }
}

std::optional<std::int64_t> FloorTable::first_jump(double uniform) const {
  // P(no jump before n) = exp(log_survival(n)), nonincreasing in n, so the
  // first jump is at the first n with survival below the draw.
  const double log_u = std::log(uniform);
  const auto begin = log_survival_.begin() + 1;
  const auto it = std::partition_point(begin, log_survival_.end(),
                                       [log_u](double ls) { return !(ls < log_u); });
  if (it == log_survival_.end()) return std::nullopt;
  return static_cast<std::int64_t>(it - log_survival_.begin());
}

SimSummary simulate(const Config& cfg) {
  if (cfg.n_paths < 1) throw InvalidQuery("n_paths must be >= 1");
  const FloorTable table(cfg.f, cfg.g, cfg.m0, cfg.horizon);
  const std::int64_t n_chunks = (cfg.n_paths + kChunk - 1) / kChunk;
  std::vector<std::int64_t> crossed(static_cast<std::size_t>(n_chunks), 0);
  detail::for_each_chunk(cfg.n_paths, kChunk, cfg.threads,
                         [&](std::int64_t chunk, std::int64_t begin, std::int64_t end) {
                           std::int64_t count = 0;
                           for (std::int64_t i = begin; i < end; ++i) {
                             const rng::CounterStream stream(cfg.seed, static_cast<std::uint64_t>(i));
                             const auto [start, jump] = stream.uniform_pair(0);
                             if (start <= table.start_high() || table.first_jump(jump)) ++count;
                           }
                           crossed[static_cast<std::size_t>(chunk)] = count;
                         });
  SimSummary s;
  s.n_paths = cfg.n_paths;
  for (std::int64_t c : crossed) s.n_crossed += c;
  s.empirical_prob = static_cast<double>(s.n_crossed) / static_cast<double>(s.n_paths);
  s.std_error =
      std::sqrt(s.empirical_prob * (1.0 - s.empirical_prob) / static_cast<double>(s.n_paths));
  return s;
}

std::vector<PathRecord> simulate_paths(const Config& cfg, std::int64_t count) {
  if (count < 0 || count > cfg.n_paths) {
    throw InvalidQuery("path count must be in [0, n_paths]");
  }
  const FloorTable table(cfg.f, cfg.g, cfg.m0, cfg.horizon);
  std::vector<PathRecord> paths(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    PathRecord& p = paths[static_cast<std::size_t>(i)];
    const rng::CounterStream stream(cfg.seed, static_cast<std::uint64_t>(i));
    const auto [start, jump] = stream.uniform_pair(0);
    if (start <= table.start_high()) {
      p.values = {table.threshold(0)};
      p.crossed = true;
      p.crossing_time = 0;
      continue;
    }
    const auto t = table.first_jump(jump);
    const std::int64_t end = t ? *t : table.horizon() + 1;
    p.values.reserve(static_cast<std::size_t>(end) + 1);
    for (std::int64_t n = 0; n < end; ++n) p.values.push_back(0.0 - table.floor(n));
    if (t) {
      p.values.push_back(table.threshold(*t));
      p.crossed = true;
      p.crossing_time = t;
    }
  }
  return paths;
}

std::vector<double> k_process(const PathRecord& path, const FloorTable& table) {
  if (static_cast<std::int64_t>(path.values.size()) > table.horizon() + 1) {
    throw InvalidQuery("path is longer than the floor table");
  }
  std::vector<double> k(path.values.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    const auto n = static_cast<std::int64_t>(i);
    const double g = table.threshold(n);
    k[i] = 1.0 - (g - path.values[i]) / (g + table.floor(n)) * table.s(n);
  }
  return k;
}

DriftReport k_drift(const Config& cfg, std::int64_t transitions) {
  if (transitions < 2) throw InvalidQuery("k_drift needs at least 2 transitions");
  const FloorTable table(cfg.f, cfg.g, cfg.m0, cfg.horizon);
  struct Partial {
    double sum = 0.0;
    double sum_sq = 0.0;
    double min_k = std::numeric_limits<double>::infinity();
  };
  const std::int64_t n_chunks = (transitions + kChunk - 1) / kChunk;
  std::vector<Partial> partials(static_cast<std::size_t>(n_chunks));
  detail::for_each_chunk(
      transitions, kChunk, cfg.threads, [&](std::int64_t chunk, std::int64_t begin, std::int64_t end) {
        Partial p;
        for (std::int64_t i = begin; i < end; ++i) {
          const rng::CounterStream stream(cfg.seed, kTransitionStreams | static_cast<std::uint64_t>(i));
          const auto [pick, jump] = stream.uniform_pair(0);
          // Log-uniform over [0, horizon): early steps carry most of the jumps.
          const double t = std::exp(pick * std::log(static_cast<double>(table.horizon()) + 1.0));
          const auto n = std::clamp<std::int64_t>(static_cast<std::int64_t>(t) - 1, 0,
                                                  table.horizon() - 1);
          const double k_now = 1.0 - table.s(n);
          const double k_next = jump <= table.jump(n) ? 1.0 : 1.0 - table.s(n + 1);
          const double diff = k_next - k_now;
          p.sum += diff;
          p.sum_sq += diff * diff;
          p.min_k = std::min({p.min_k, k_now, k_next});
        }
        partials[static_cast<std::size_t>(chunk)] = p;
      });
  Partial total;
  for (const Partial& p : partials) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
    total.min_k = std::min(total.min_k, p.min_k);
  }
  DriftReport r;
  r.transitions = transitions;
  const double count = static_cast<double>(transitions);
  r.mean_drift = total.sum / count;
  const double var = std::max(0.0, (total.sum_sq - count * r.mean_drift * r.mean_drift) / (count - 1.0));
  r.std_error = std::sqrt(var / count);
  r.min_k = total.min_k;
  return r;
}

}  // namespace av::floorhugger
