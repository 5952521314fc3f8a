#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "anytime_ville/lil.hpp"

namespace av::sim {

enum class Distribution { StandardNormal, ScaledNormal };

struct CoverageConfig {
  double delta = 0.05;
  std::int64_t n_steps = 10'000;
  std::int64_t n_reps = 10'000;
  std::uint64_t seed = 0;
  /// Scale of the bound: |S_n| <= kappa sqrt(n/kappa^2 + 1) B(n/kappa^2).
  double kappa = 1.0;
  /// ScaledNormal draws N(0, sigma^2) and standardizes by sigma before
  /// checking.
  Distribution distribution = Distribution::StandardNormal;
  double sigma = 1.0;
  lil::Form form = lil::Form::Explicit;
  unsigned threads = 1;
};

struct CoverageReport {
  std::int64_t n_reps = 0;
  std::int64_t violations = 0;
  double violation_rate = 0.0;
  /// (first violation time, number of repetitions), sorted by time.
  std::vector<std::pair<std::int64_t, std::int64_t>> histogram;

  bool operator==(const CoverageReport&) const = default;
};

/// Repetition r uses normals from stream (seed, r); step n of every
/// repetition sees the same draw for equal seeds across configs.
CoverageReport run_coverage(const CoverageConfig& cfg);

struct MartingaleCheckConfig {
  std::int64_t n_paths = 10'000;
  std::int64_t n_steps = 1'000;
  std::uint64_t seed = 0;
  /// Hold S_n = 0 instead of drawing normals.
  bool zero_noise = false;
  unsigned threads = 1;
};

struct StepDrift {
  std::int64_t n = 0;
  /// Mean and standard error of M_n - M_{n-1} across paths.
  double mean = 0.0;
  double std_error = 0.0;

  bool operator==(const StepDrift&) const = default;
};

struct MartingaleCheckReport {
  std::int64_t n_paths = 0;
  std::int64_t n_steps = 0;
  /// (path, n) pairs with M_n < -ln(1+n)/sqrt(2 pi).
  std::int64_t floor_violations = 0;
  /// min over paths and n of M_n + ln(1+n)/sqrt(2 pi).
  double min_floor_margin = 0.0;
  double mean_m0 = 0.0;
  std::vector<StepDrift> drift;

  bool drift_ok() const;
  bool operator==(const MartingaleCheckReport&) const = default;
};

/// Steps at which the one-step drift is checked: 1, 2, 5, 10, 20, ... up to n_steps.
std::vector<std::int64_t> drift_check_steps(std::int64_t n_steps);

MartingaleCheckReport run_martingale_check(const MartingaleCheckConfig& cfg);

}  // namespace av::sim
