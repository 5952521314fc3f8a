#pragma once

#include <cstdint>
#include <optional>

#include "anytime_ville/curves.hpp"

namespace av {

inline constexpr std::int64_t kDefaultHorizon = 1'000'000;

/// Time (t, not log time) up to which improper integrals are done by
/// quadrature before an analytic tail takes over.
inline constexpr double kQuadratureProbe = 1e12;

/// Partial integrals above this are declared divergent (exp(-50) < 1e-21).
inline constexpr double kDivergenceThreshold = 50.0;

struct BoundQuery {
  Curve f;
  Curve g;
  double m0;
  /// nullopt means "infinite horizon": truncated at kDefaultHorizon and
  /// completed with the tail integral.
  std::optional<std::int64_t> horizon;
};

/// Certified interval for a probability computed from a truncated infinite
/// product.
struct ProbBracket {
  double lower = 0.0;
  double upper = 1.0;
  std::int64_t truncation_horizon = 0;

  double midpoint() const { return 0.5 * (lower + upper); }
  double width() const { return upper - lower; }
};

/// Throws InvalidQuery unless -f(0) < g(0) and m0 in [-f(0), g(0)].
void validate_query(const Curve& f, const Curve& g, double m0);

struct FloorIntegral {
  double value = 0.0;
  bool divergent = false;
  bool converged = false;
  /// Part of `value` that came from a closed-form tail rather than quadrature.
  double analytic_tail = 0.0;
};

/// \int_from^\infty f'(t) / (g(t) + f(t)) dt for closed-form curves.
///
/// Integrated in log time u = ln(1+t) over panels of doubling width. With
/// `allow_closure` and g a threshold family over f, everything past
/// kQuadratureProbe is taken from the closed form.
FloorIntegral floor_integral(const Curve& f, const Curve& g, double from,
                             bool allow_closure = true);

/// Same integrand over the finite range [from, to], by quadrature only.
double floor_integral_between(const Curve& f, const Curve& g, double from, double to);

/// Bracket for s(n) = prod_{t >= n} (1 - p_t), the probability that the
/// floor-hugger started on the floor at time n never reaches g.
ProbBracket s_tail(const Curve& f, const Curve& g, std::int64_t n, std::int64_t horizon);

/// Bracket for the generalized Ville bound
///   1 - (g(0) - m0)/(g(0) + f(0)) * prod_{n >= 1} (g(n) + f(n-1))/(g(n) + f(n)).
/// `lower` is the bound with the product truncated at the horizon (the exact
/// probability that the floor-hugger crosses by then); `upper` completes the
/// product with the tail integral.
ProbBracket crossing_bound(const BoundQuery& q);

struct ContinuousBound {
  double value = 1.0;
  /// \int_0^\infty f'/(g + f); +inf when divergent.
  double exponent = 0.0;
  bool divergent = false;
};

/// 1 - (g(0) - m0)/(g(0) + f(0)) * exp(-\int_0^\infty f'/(g + f)).
ContinuousBound continuous_bound(const Curve& f, const Curve& g, double m0);

/// b with a*b = 1/(-ln(1 - delta)); rejects 2ab < 1.
double calibrate_quadratic(double delta, double a);

/// Dampener of the same family and (a, c) with h(0) = -ln(1 - delta),
/// obtained by solving for b.
Dampener calibrate_expconcave(const Dampener& h, double delta);

}  // namespace av
