#pragma once

#include <functional>

namespace av::lil {

/// Largest |x| accepted by the I(x) routines; I overflows a double near 37.7.
inline constexpr double kMaxArgument = 40.0;

class LilParams {
 public:
  /// Requires 0 < delta <= 3/5 and kappa > 0.
  explicit LilParams(double delta, double kappa = 1.0);

  double delta() const { return delta_; }
  /// -ln(1 - delta)
  double delta_prime() const { return delta_prime_; }
  double kappa() const { return kappa_; }

 private:
  double delta_;
  double delta_prime_;
  double kappa_;
};

/// I(x) = \int_0^x e^{u^2/2} erf(u/sqrt 2) du by its positive power series.
double I_series(double x);
/// I(x) by adaptive quadrature of the defining integral.
double I_direct(double x);
/// I(x) = sqrt(2/pi) \int_0^inf (exp(x^2 sech^2(w) / 2) - 1) dw by quadrature.
double I_sech(double x);

/// l(x) = sqrt((e^{x^2/2} - 1)^3 / (x^2 e^{x^2/2})), l(0) = 0.
double ell(double x);
/// Derivative of l; DomainError at 0.
double ell_prime(double x);

/// Tangent-line remainder R(tau) <= 1/sqrt 2, closed form.
double remainder_R(double tau);
/// (tau - l(xi)) / l'(xi) at xi = sqrt(2 ln(1 + sqrt(2) tau)).
double remainder_R_tangent(double tau);

/// sqrt(2 ln(1 + sqrt(2) tau)) + R(tau): an upper bound on |x| when I(x) <= tau.
double invert_threshold(double tau);
/// The exact x >= 0 with I(x) = tau.
double invert_I(double tau);

/// tau(n) = (ln(n+1)/sqrt(2 pi) + e) ln^2(ln(n+1)/sqrt(2 pi) + e) / delta'.
double implicit_rhs(double n, const LilParams& p);

/// invert_threshold(tau(n)): bound on |S_n| / sqrt(n + 1).
double explicit_bound(double n, const LilParams& p);
/// Same formula with sqrt(2) tau(n) written out, as a cross-check.
double explicit_bound_expanded(double n, const LilParams& p);
/// R replaced by its cap 1/sqrt 2.
double simpler_bound(double n, const LilParams& p);

enum class Form { Explicit, Simpler, Implicit };

/// Bound on |S_n| / sqrt(n + 1) for the given form at unit scale.
/// Implicit inverts I(x) <= tau(n) exactly.
double normalized_bound(double n, const LilParams& p, Form form);

/// Bound on |S_n| itself, rescaled by p.kappa():
/// kappa * sqrt(n/kappa^2 + 1) * normalized_bound(n / kappa^2).
double sum_bound(double n, const LilParams& p, Form form);

/// M_n = I(S_n / sqrt(n + 1)) - ln(1 + n) / sqrt(2 pi).
double martingale_value(double n, double s);
/// M_n from the Gaussian mixture integral over eta, by quadrature.
double martingale_value_quadrature(double n, double s);

/// n -> kappa * bound(n / kappa^2)
std::function<double(double)> kappa_rescale(std::function<double(double)> bound, double kappa);

}  // namespace av::lil
