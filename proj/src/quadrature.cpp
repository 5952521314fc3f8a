#include "anytime_ville/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace av::quad {

namespace {

// QUADPACK qk15 nodes and weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod15(const Integrand& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[static_cast<std::size_t>(j)];
    const double sum = f(centre - dx) + f(centre + dx);
    kronrod += kWgk[static_cast<std::size_t>(j)] * sum;
    if (j % 2 == 1) gauss += kWg[static_cast<std::size_t>(j / 2)] * sum;
  }
  const double value = kronrod * half;
  const double err = std::fabs((kronrod - gauss) * half);
  return {a, b, value, err};
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, const std::vector<double>& breaks,
                 const Options& opts) {
  Result r;
  if (a == b) {
    r.converged = true;
    return r;
  }
  std::vector<double> cuts{a};
  for (double c : breaks) {
    if (c > a && c < b) cuts.push_back(c);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  std::priority_queue<Segment> heap;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i] == cuts[i + 1]) continue;
    const Segment s = kronrod15(f, cuts[i], cuts[i + 1]);
    value += s.value;
    error += s.error;
    heap.push(s);
  }
  std::size_t subdivisions = heap.size();
  while (!heap.empty()) {
    if (!std::isfinite(value)) break;
    if (error <= std::max(opts.abs_tol, opts.rel_tol * std::fabs(value))) {
      r.converged = true;
      break;
    }
    if (subdivisions >= opts.max_subdivisions) break;
    const Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval cannot be split further in double precision.
      break;
    }
    heap.pop();
    const Segment left = kronrod15(f, worst.a, mid);
    const Segment right = kronrod15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }
  // Re-sum to shed the drift of the running updates.
  double total = 0.0;
  double total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  r.value = total;
  r.error = total_err;
  r.subdivisions = subdivisions;
  if (!r.converged) {
    r.converged = std::isfinite(total) &&
                  total_err <= std::max(opts.abs_tol, opts.rel_tol * std::fabs(total));
  }
  return r;
}

Result integrate(const Integrand& f, double a, double b, const Options& opts) {
  return integrate(f, a, b, {}, opts);
}

Result integrate_to_infinity(const Integrand& f, double a, const Options& opts) {
  auto mapped = [&](double x) {
    const double one_minus = 1.0 - x;
    const double t = a + x / one_minus;
    const double v = f(t);
    if (v == 0.0) return 0.0;
    return v / (one_minus * one_minus);
  };
  return integrate(mapped, 0.0, 1.0, opts);
}

}  // namespace av::quad
