#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace av::quad {

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::size_t max_subdivisions = 1'000'000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t subdivisions = 0;
  bool converged = false;
};

using Integrand = std::function<double(double)>;

/// Global adaptive Gauss-Kronrod (7/15) on a finite [a, b]: the interval with
/// the largest error estimate is bisected until the total error is below
/// max(abs_tol, rel_tol * |value|) or the subdivision budget runs out.
Result integrate(const Integrand& f, double a, double b, const Options& opts = {});

/// Same, splitting [a, b] at the given interior breakpoints first.
Result integrate(const Integrand& f, double a, double b, const std::vector<double>& breaks,
                 const Options& opts = {});

/// \int_a^\infty f via t = a + x / (1 - x) on [0, 1).
Result integrate_to_infinity(const Integrand& f, double a, const Options& opts = {});

}  // namespace av::quad
