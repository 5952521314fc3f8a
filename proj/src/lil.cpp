#include "anytime_ville/lil.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "anytime_ville/errors.hpp"
#include "anytime_ville/quadrature.hpp"

namespace av::lil {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void guard(double x) {
  if (!std::isfinite(x) || std::fabs(x) > kMaxArgument) {
    throw OverflowError("|x| = " + num(std::fabs(x)) + " exceeds " + num(kMaxArgument));
  }
}

double checked(double value, double x) {
  if (!std::isfinite(value)) throw OverflowError("I(" + num(x) + ") overflows a double");
  return value;
}

const quad::Options kTight{0.0, 1e-14, 100'000};

// ln(1 + y) - y/(1 + y), which loses everything to cancellation for small y.
double log1p_gap(double y) {
  if (y > 0.1) return std::log1p(y) - y / (1.0 + y);
  // sum_{k>=2} (-1)^k (k-1)/k y^k
  double sum = 0.0;
  double power = y;
  for (int k = 2; k < 40; ++k) {
    power *= -y;
    const double term = -power * (k - 1) / k;
    sum += term;
    if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
  }
  return sum;
}

double check_n(double n) {
  if (!(n >= 0.0) || !std::isfinite(n)) throw DomainError("n must be finite and >= 0");
  return n;
}

}  // namespace

LilParams::LilParams(double delta, double kappa)
    : delta_(delta), delta_prime_(-std::log1p(-delta)), kappa_(kappa) {
  if (!(delta > 0.0 && delta <= 0.6)) {
    throw InvalidQuery("delta must be in (0, 3/5], got " + num(delta));
  }
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw InvalidQuery("kappa must be > 0, got " + num(kappa));
  }
}

double I_series(double x) {
  guard(x);
  const double x2 = x * x;
  if (x2 == 0.0) return 0.0;
  // a_k = x^{2k+2} / (2k+1)!!, term_k = a_k / (2k+2)
  double a = x2;
  double sum = 0.0;
  for (int k = 0; k < 10'000; ++k) {
    const double term = a / (2.0 * k + 2.0);
    sum += term;
    if (term < 1e-17 * sum && k > x2) break;
    a *= x2 / (2.0 * k + 3.0);
  }
  return checked(kSqrt2OverPi * sum, x);
}

double I_direct(double x) {
  guard(x);
  const double end = std::fabs(x);
  if (end == 0.0) return 0.0;
  std::vector<double> breaks;
  for (double b = 1.0; b < end; b += 1.0) breaks.push_back(b);
  const auto r = quad::integrate(
      [](double u) { return std::exp(0.5 * u * u) * std::erf(u / kSqrt2); }, 0.0, end, breaks,
      kTight);
  if (!r.converged) throw NumericalError("I_direct quadrature did not converge at x=" + num(x));
  return checked(r.value, x);
}

double I_sech(double x) {
  guard(x);
  const double half_x2 = 0.5 * x * x;
  if (half_x2 == 0.0) return 0.0;
  // Past W the integrand is below 1e-17 of its value at w = 0 in relative terms.
  const double w_end = std::acosh(1.0 / std::sqrt(2e-17));
  std::vector<double> breaks;
  for (double b = 0.5 / std::max(1.0, std::fabs(x)); b < w_end; b *= 2.0) breaks.push_back(b);
  const auto r = quad::integrate(
      [half_x2](double w) {
        const double sech = 1.0 / std::cosh(w);
        return std::expm1(half_x2 * sech * sech);
      },
      0.0, w_end, breaks, kTight);
  if (!r.converged) throw NumericalError("I_sech quadrature did not converge at x=" + num(x));
  return checked(kSqrt2OverPi * r.value, x);
}

double ell(double x) {
  if (!std::isfinite(x)) throw DomainError("ell needs finite x");
  const double ax = std::fabs(x);
  if (ax < 1e-4) return x * x / (2.0 * kSqrt2) * (1.0 + x * x / 8.0);
  const double z = 0.5 * x * x;
  if (z < 1.0) {
    const double em1 = std::expm1(z);
    return std::sqrt(em1 * em1 * em1 / (x * x * std::exp(z)));
  }
  // ln(e^z - 1) = z + ln(1 - e^{-z})
  const double log_em1 = z + std::log1p(-std::exp(-z));
  return std::exp(0.5 * (3.0 * log_em1 - 2.0 * std::log(ax) - z));
}

double ell_prime(double x) {
  if (x == 0.0) throw DomainError("ell_prime is undefined at x = 0");
  if (!std::isfinite(x)) throw DomainError("ell_prime needs finite x");
  const double z = 0.5 * x * x;
  // e^z (x^2 - 1) + x^2/2 + 1 = expm1(z)(2z - 1) + 3z
  const double bracket = std::expm1(z) * (2.0 * z - 1.0) + 3.0 * z;
  const double sign = x > 0.0 ? 1.0 : -1.0;
  return sign / (x * x) * std::sqrt(-std::expm1(-z)) * bracket;
}

double remainder_R(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("R needs tau > 0");
  const double y = kSqrt2 * tau;
  const double L = std::log1p(y);
  const double q = y / (1.0 + y);
  const double ratio = q / L;
  const double one_minus_sqrt = log1p_gap(y) / L / (1.0 + std::sqrt(ratio));
  const double slope = (1.0 / (2.0 * L)) * ((1.0 + y) * (2.0 * L - 1.0) + L + 1.0) * std::sqrt(q);
  return tau * one_minus_sqrt / slope;
}

double remainder_R_tangent(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("R needs tau > 0");
  const double xi = std::sqrt(2.0 * std::log1p(kSqrt2 * tau));
  return (tau - ell(xi)) / ell_prime(xi);
}

double invert_threshold(double tau) {
  return std::sqrt(2.0 * std::log1p(kSqrt2 * tau)) + remainder_R(tau);
}

double invert_I(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("invert_I needs tau >= 0");
  if (tau == 0.0) return 0.0;
  double lo = 0.0;
  double hi = std::min(invert_threshold(tau), 37.5);
  if (I_series(hi) < tau) throw OverflowError("I^{-1}(" + num(tau) + ") is beyond range");
  double x = hi;
  for (int it = 0; it < 200; ++it) {
    const double value = I_series(x) - tau;
    if (value > 0.0) hi = x; else lo = x;
    const double slope = std::exp(0.5 * x * x) * std::erf(x / kSqrt2);
    double next = x - value / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 4e-16 * x || hi - lo <= 4e-16 * hi) return next;
    x = next;
  }
  return x;
}

double implicit_rhs(double n, const LilParams& p) {
  const double a = std::log1p(check_n(n)) * kInvSqrt2Pi + std::numbers::e;
  const double log_a = std::log(a);
  return a * log_a * log_a / p.delta_prime();
}

double explicit_bound(double n, const LilParams& p) {
  return invert_threshold(implicit_rhs(n, p));
}

double explicit_bound_expanded(double n, const LilParams& p) {
  const double log_n = std::log1p(check_n(n));
  const double inner = std::log(log_n * kInvSqrt2Pi + std::numbers::e);
  const double arg = (log_n / std::sqrt(std::numbers::pi) + std::numbers::e * kSqrt2) /
                     p.delta_prime() * inner * inner;
  return std::sqrt(2.0 * std::log1p(arg)) + remainder_R(implicit_rhs(n, p));
}

double simpler_bound(double n, const LilParams& p) {
  const double tau = implicit_rhs(n, p);
  return std::sqrt(2.0 * std::log1p(kSqrt2 * tau)) + 1.0 / kSqrt2;
}

double normalized_bound(double n, const LilParams& p, Form form) {
  switch (form) {
    case Form::Explicit: return explicit_bound(n, p);
    case Form::Simpler: return simpler_bound(n, p);
    case Form::Implicit: return invert_I(implicit_rhs(n, p));
  }
  return explicit_bound(n, p);
}

double sum_bound(double n, const LilParams& p, Form form) {
  const double k = p.kappa();
  const double scaled = check_n(n) / (k * k);
  return k * std::sqrt(scaled + 1.0) * normalized_bound(scaled, p, form);
}

double martingale_value(double n, double s) {
  check_n(n);
  return I_series(s / std::sqrt(n + 1.0)) - std::log1p(n) * kInvSqrt2Pi;
}

double martingale_value_quadrature(double n, double s) {
  check_n(n);
  guard(s / std::sqrt(n + 1.0));
  const double a = std::fabs(s);
  // The two halves of the eta integral combine into cosh(eta s).
  auto integrand = [n, a](double eta) {
    if (eta == 0.0) return 0.0;
    const double y = eta * a;
    const double log_cosh = y + std::log1p(std::exp(-2.0 * y)) - std::numbers::ln2;
    const double bracket = std::expm1(log_cosh - 0.5 * eta * eta * n);
    return 2.0 * kInvSqrt2Pi * bracket * std::exp(-0.5 * eta * eta) / eta;
  };
  const double scale = 1.0 / std::sqrt(n + 1.0);
  // e^{-eta^2/2} < 1e-18 past 9.1; the exp(eta s) bump sits at s/(n+1).
  const double end = std::max(9.5, a / (n + 1.0) + 12.0 * scale);
  std::vector<double> breaks;
  for (double b = 0.125 * scale; b < end; b *= 2.0) breaks.push_back(b);
  if (a > 0.0 && a / (n + 1.0) < end) breaks.push_back(a / (n + 1.0));
  std::sort(breaks.begin(), breaks.end());
  const auto r = quad::integrate(integrand, 0.0, end, breaks, quad::Options{1e-13, 1e-12, 200'000});
  if (!r.converged) throw NumericalError("mixture quadrature did not converge");
  return r.value;
}

std::function<double(double)> kappa_rescale(std::function<double(double)> bound, double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be > 0");
  return [bound = std::move(bound), kappa](double n) { return kappa * bound(n / (kappa * kappa)); };
}

}  // namespace av::lil
