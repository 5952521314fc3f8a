#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "anytime_ville/curves.hpp"
#include "anytime_ville/ville.hpp"

namespace av::floorhugger {

/// p_n = (f(n+1) - f(n)) / (g(n+1) + f(n+1)): the jump probability that makes
/// the floor-hugger a martingale from state -f(n).
double jump_prob(const Curve& f, const Curve& g, std::int64_t n);

struct Config {
  Curve f;
  Curve g;
  double m0 = 0.0;
  std::int64_t horizon = 1;
  std::int64_t n_paths = 1;
  std::uint64_t seed = 0;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 1;
};

struct PathRecord {
  /// M_0 .. M_T where T is the crossing time or the horizon.
  std::vector<double> values;
  bool crossed = false;
  std::optional<std::int64_t> crossing_time;
};

struct SimSummary {
  std::int64_t n_paths = 0;
  std::int64_t n_crossed = 0;
  double empirical_prob = 0.0;
  double std_error = 0.0;

  bool operator==(const SimSummary&) const = default;
};

/// Survival quantities along the floor for n = 0..horizon, built once.
class FloorTable {
 public:
  FloorTable(const Curve& f, const Curve& g, double m0, std::int64_t horizon);

  std::int64_t horizon() const { return horizon_; }
  double floor(std::int64_t n) const { return floor_[static_cast<std::size_t>(n)]; }
  double threshold(std::int64_t n) const { return threshold_[static_cast<std::size_t>(n)]; }
  double jump(std::int64_t n) const { return jump_[static_cast<std::size_t>(n)]; }

  /// Probability (m0 + f(0))/(g(0) + f(0)) of starting on the threshold.
  double start_high() const { return start_high_; }

  /// ln prod_{t < n} (1 - p_t): log-probability of still being on the floor
  /// at time n.
  double log_survival(std::int64_t n) const {
    return log_survival_[static_cast<std::size_t>(n)];
  }

  /// s(n) from the backward recurrence s(n) = (1 - p_n) s(n+1), seeded at the
  /// horizon with the midpoint of the s_tail bracket.
  double s(std::int64_t n) const { return s_mid_[static_cast<std::size_t>(n)]; }
  /// Endpoints of the s(n) bracket carried through the same recurrence.
  double s_lower(std::int64_t n) const { return s_lower_[static_cast<std::size_t>(n)]; }
  double s_upper(std::int64_t n) const { return s_upper_[static_cast<std::size_t>(n)]; }

  /// First time the floor-hugger started on the floor jumps, given a uniform
  /// draw in (0, 1]; nullopt when it stays on the floor through the horizon.
  std::optional<std::int64_t> first_jump(double uniform) const;

 private:
  std::int64_t horizon_;
  double start_high_;
  std::vector<double> floor_;
  std::vector<double> threshold_;
  std::vector<double> jump_;
  std::vector<double> log_survival_;
  std::vector<double> s_mid_;
  std::vector<double> s_lower_;
  std::vector<double> s_upper_;
};

/// Monte Carlo estimate of P{exists n <= horizon : M_n >= g(n)} for the
/// floor-hugger. Deterministic in (config, seed); independent of `threads`.
SimSummary simulate(const Config& cfg);

/// The first `count` paths of the same simulation, with full trajectories.
std::vector<PathRecord> simulate_paths(const Config& cfg, std::int64_t count);

/// K_n = 1 - (g(n) - M_n)/(g(n) + f(n)) * s(n) along a recorded path.
std::vector<double> k_process(const PathRecord& path, const FloorTable& table);

struct DriftReport {
  std::int64_t transitions = 0;
  double mean_drift = 0.0;
  double std_error = 0.0;
  double min_k = 0.0;

  bool operator==(const DriftReport&) const = default;
};

/// One-step check of the K supermartingale: `transitions` independent
/// floor-hugger steps from -f(n) at times n drawn log-uniformly in [0, horizon),
/// reporting the mean and standard error of K_{n+1} - K_n.
DriftReport k_drift(const Config& cfg, std::int64_t transitions);

}  // namespace av::floorhugger
