#include "anytime_ville/ville.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "anytime_ville/errors.hpp"
#include "anytime_ville/floorhugger.hpp"
#include "anytime_ville/quadrature.hpp"

namespace av {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Neumaier-compensated running sum.
class Sum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::fabs(sum_) >= std::fabs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void require_closed_form(const Curve& f, const Curve& g, const char* what) {
  if (!f.closed_form() || !g.closed_form()) {
    throw UnsupportedError(std::string(what) + " needs closed-form curves, not Tabulated");
  }
}

// True when f has no increments past time t, so the tail product is exactly 1.
bool floor_flat_after(const Curve& f, double t) {
  if (std::holds_alternative<Curve::Constant>(f.family())) return true;
  if (const auto* tab = std::get_if<Curve::Tabulated>(&f.family())) {
    return tab->extend_constant && t >= tab->x.back();
  }
  return false;
}

// exp(-tail) for the product of factors covering [t, inf), or nullopt when
// it cannot be certified (tabulated curves with a moving floor).
std::optional<double> tail_factor(const Curve& f, const Curve& g, double t) {
  if (floor_flat_after(f, t)) return 1.0;
  if (!f.closed_form() || !g.closed_form()) return std::nullopt;
  const FloorIntegral tail = floor_integral(f, g, t);
  if (tail.divergent) return 0.0;
  if (!tail.converged) return std::nullopt;
  return std::exp(-tail.value);
}

const quad::Options kPanelOptions{1e-14, 1e-13, 20'000};

}  // namespace

void validate_query(const Curve& f, const Curve& g, double m0) {
  const double f0 = f.eval(0.0);
  const double g0 = g.eval(0.0);
  if (!(-f0 < g0)) {
    throw InvalidQuery("need -f(0) < g(0), got f(0)=" + num(f0) + ", g(0)=" + num(g0));
  }
  if (!(m0 >= -f0 && m0 <= g0)) {
    throw InvalidQuery("need m0 in [-f(0), g(0)] = [" + num(-f0) + ", " + num(g0) +
                       "], got m0=" + num(m0));
  }
}

FloorIntegral floor_integral(const Curve& f, const Curve& g, double from, bool allow_closure) {
  require_closed_form(f, g, "floor_integral");
  if (!(from >= 0.0)) throw DomainError("floor_integral from t=" + num(from));
  FloorIntegral r;
  const double u0 = std::log1p(from);
  if (f.limit() == f.eval_log1p(u0)) {
    r.converged = true;
    return r;
  }

  double u_end = kInf;
  if (allow_closure && g.is_threshold_over(f)) {
    const double u_probe = std::log1p(kQuadratureProbe);
    if (u0 >= u_probe) {
      r.value = r.analytic_tail = g.tail_mass(f.eval_log1p(u0));
      r.converged = true;
      return r;
    }
    u_end = u_probe;
    r.analytic_tail = g.tail_mass(f.eval_log1p(u_probe));
  }

  auto integrand = [&](double u) {
    const double df = f.derivative_log1p(u);
    if (df == 0.0) return 0.0;
    return df / (g.eval_log1p(u) + f.eval_log1p(u));
  };

  Sum total;
  double lo = u0;
  double width = 1.0;
  double previous = -1.0;
  for (;;) {
    const double hi = std::min(lo + width, u_end);
    const quad::Result piece = quad::integrate(integrand, lo, hi, kPanelOptions);
    if (!std::isfinite(piece.value)) {
      throw NumericalError("non-finite integrand on log-time panel [" + num(lo) + ", " +
                           num(hi) + "]");
    }
    total.add(piece.value);
    if (total.value() > kDivergenceThreshold) {
      r.value = kInf;
      r.divergent = true;
      return r;
    }
    if (hi >= u_end) {
      r.converged = true;
      break;
    }
    if (piece.value == 0.0 && previous == 0.0) {
      r.converged = true;
      break;
    }
    if (previous > 0.0 && piece.value < previous) {
      // Geometric extrapolation of the remaining panels.
      const double ratio = piece.value / previous;
      if (piece.value * ratio / (1.0 - ratio) < 1e-13) {
        r.converged = true;
        break;
      }
    }
    previous = piece.value;
    lo = hi;
    width *= 2.0;
    if (lo > 1e300) break;
  }
  r.value = total.value() + r.analytic_tail;
  return r;
}

double floor_integral_between(const Curve& f, const Curve& g, double from, double to) {
  require_closed_form(f, g, "floor_integral_between");
  if (!(from >= 0.0 && to >= from)) {
    throw DomainError("floor_integral_between needs 0 <= from <= to");
  }
  auto integrand = [&](double u) {
    const double df = f.derivative_log1p(u);
    if (df == 0.0) return 0.0;
    return df / (g.eval_log1p(u) + f.eval_log1p(u));
  };
  Sum total;
  double lo = std::log1p(from);
  const double end = std::log1p(to);
  double width = 1.0;
  while (lo < end) {
    const double hi = std::min(lo + width, end);
    const quad::Result piece = quad::integrate(integrand, lo, hi, kPanelOptions);
    if (!piece.converged) throw NumericalError("quadrature did not converge");
    total.add(piece.value);
    lo = hi;
    width *= 2.0;
  }
  return total.value();
}

ProbBracket s_tail(const Curve& f, const Curve& g, std::int64_t n, std::int64_t horizon) {
  if (n < 0 || horizon <= n) {
    throw InvalidQuery("s_tail needs 0 <= n < horizon, got n=" + std::to_string(n) +
                       ", horizon=" + std::to_string(horizon));
  }
  validate_query(f, g, -f.eval(0.0));
  Sum log_product;
  double f_prev = f.eval(static_cast<double>(n));
  for (std::int64_t t = n; t <= horizon; ++t) {
    const double f_next = f.eval(static_cast<double>(t + 1));
    const double g_next = g.eval(static_cast<double>(t + 1));
    const double step = f_next - f_prev;
    if (step != 0.0) log_product.add(std::log1p(-step / (g_next + f_next)));
    f_prev = f_next;
  }
  ProbBracket b;
  b.truncation_horizon = horizon;
  b.upper = std::exp(log_product.value());
  const auto tail = tail_factor(f, g, static_cast<double>(horizon + 1));
  b.lower = tail ? b.upper * *tail : 0.0;
  return b;
}

ProbBracket crossing_bound(const BoundQuery& q) {
  validate_query(q.f, q.g, q.m0);
  const std::int64_t horizon = q.horizon.value_or(kDefaultHorizon);
  if (horizon < 1) throw InvalidQuery("horizon must be >= 1");

  const double f0 = q.f.eval(0.0);
  const double g0 = q.g.eval(0.0);
  // Probability of starting high, and of starting on the floor.
  const double start_high = (q.m0 + f0) / (g0 + f0);
  const double start_low = (g0 - q.m0) / (g0 + f0);

  Sum log_product;
  if (!floor_flat_after(q.f, 0.0)) {
    double f_prev = f0;
    for (std::int64_t n = 1; n <= horizon; ++n) {
      const double fn = q.f.eval(static_cast<double>(n));
      const double gn = q.g.eval(static_cast<double>(n));
      // ln((g(n) + f(n-1)) / (g(n) + f(n)))
      if (fn != f_prev) log_product.add(std::log1p(-(fn - f_prev) / (gn + fn)));
      f_prev = fn;
    }
  }
  const double log_p = log_product.value();

  ProbBracket b;
  b.truncation_horizon = horizon;
  b.lower = std::clamp(start_high + start_low * -std::expm1(log_p), 0.0, 1.0);
  const auto tail = tail_factor(q.f, q.g, static_cast<double>(horizon));
  if (!tail || *tail == 0.0) {
    b.upper = 1.0;
  } else {
    b.upper = std::clamp(start_high + start_low * -std::expm1(log_p + std::log(*tail)),
                         b.lower, 1.0);
  }
  return b;
}

ContinuousBound continuous_bound(const Curve& f, const Curve& g, double m0) {
  require_closed_form(f, g, "continuous_bound");
  validate_query(f, g, m0);
  const double f0 = f.eval(0.0);
  const double g0 = g.eval(0.0);
  const FloorIntegral e = floor_integral(f, g, 0.0);
  ContinuousBound r;
  if (e.divergent) {
    r.value = 1.0;
    r.exponent = kInf;
    r.divergent = true;
    return r;
  }
  if (!e.converged) {
    throw NumericalError("improper integral neither converged nor exceeded " +
                         num(kDivergenceThreshold));
  }
  r.exponent = e.value;
  r.value = std::clamp((m0 + f0) / (g0 + f0) + (g0 - m0) / (g0 + f0) * -std::expm1(-e.value),
                       0.0, 1.0);
  return r;
}

double calibrate_quadratic(double delta, double a) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw CalibrationError("delta must be in (0, 1), got " + num(delta));
  }
  if (!(a > 0.0) || !std::isfinite(a)) throw CalibrationError("a must be > 0");
  const double log_term = -std::log1p(-delta);
  const double b = 1.0 / (a * log_term);
  if (2.0 * a * b < 1.0 - 1e-12) {
    throw CalibrationError("calibrated quadratic has 2ab = " + num(2.0 * a * b) +
                           " < 1; needs -ln(1-delta) <= 2");
  }
  return b;
}

Dampener calibrate_expconcave(const Dampener& h, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw CalibrationError("delta must be in (0, 1), got " + num(delta));
  }
  const double target = -std::log1p(-delta);
  const double a = h.a();
  const double c = h.c();
  double b = 0.0;
  if (h.kind() == Dampener::Kind::Polynomial) {
    // h(0) = b^(1-c) / (a (c-1)); exp-concavity a c >= b^(1-c) becomes
    // c >= target (c - 1).
    if (c < target * (c - 1.0) * (1.0 - 1e-12)) {
      throw CalibrationError("Polynomial dampener with c=" + num(c) +
                             " cannot reach h(0)=" + num(target));
    }
    b = std::pow(target * a * (c - 1.0), 1.0 / (1.0 - c));
  } else {
    // h(0) = ln(b)^(1-c); b >= e needs target <= 1.
    if (target > 1.0) {
      throw CalibrationError("FatTail dampener needs -ln(1-delta) <= 1, got " + num(target));
    }
    b = std::exp(std::pow(target, 1.0 / (1.0 - c)));
  }
  if (!std::isfinite(b)) {
    throw CalibrationError("calibrated b overflows for delta=" + num(delta));
  }
  try {
    Dampener out = h.kind() == Dampener::Kind::Polynomial ? Dampener::polynomial(a, b, c)
                                                          : Dampener::fat_tail(a, std::max(b, std::numbers::e), c);
    if (std::fabs(out.value(0.0) - target) > 1e-12) {
      throw CalibrationError("calibrated h(0)=" + num(out.value(0.0)) + " misses target " +
                             num(target));
    }
    return out;
  } catch (const DomainError& e) {
    throw CalibrationError(std::string("calibrated dampener invalid: ") + e.what());
  }
}

}  // namespace av
