#include "anytime_ville/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <numbers>
#include <string>

#include "anytime_ville/errors.hpp"

namespace av {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kE = std::numbers::e;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

// 0, then 255 log-spaced points on [1e-4, 1e8].
std::vector<double> exp_concavity_grid() {
  std::vector<double> grid{0.0};
  for (int k = 0; k < 255; ++k) {
    grid.push_back(std::pow(10.0, -4.0 + 12.0 * k / 254.0));
  }
  return grid;
}

double lil_u(double y, double d) {
  const double l = std::log(kE + y);
  return (kE + y) * l * l / d;
}

double lil_u_prime(double y, double d) {
  const double l = std::log(kE + y);
  return (l * l + 2.0 * l) / d;
}

}  // namespace

// ---------------------------------------------------------------- Dampener

Dampener::Dampener(Kind kind, double a, double b, double c)
    : kind_(kind), a_(a), b_(b), c_(c) {}

Dampener Dampener::polynomial(double a, double b, double c) {
  if (!(a > 0.0 && b > 0.0 && c > 1.0) || !std::isfinite(a) ||
      !std::isfinite(b) || !std::isfinite(c)) {
    throw DomainError("Polynomial dampener needs a > 0, b > 0, c > 1 (got a=" +
                      num(a) + ", b=" + num(b) + ", c=" + num(c) + ")");
  }
  if (a * c < std::pow(b, 1.0 - c) * (1.0 - 1e-12)) {
    throw DomainError("Polynomial dampener is not exp-concave: a*c=" +
                      num(a * c) + " < b^(1-c)=" + num(std::pow(b, 1.0 - c)));
  }
  Dampener h(Kind::Polynomial, a, b, c);
  h.validate();
  return h;
}

Dampener Dampener::fat_tail(double a, double b, double c) {
  if (!(a > 0.0 && b >= kE && c > 1.0) || !std::isfinite(a) ||
      !std::isfinite(b) || !std::isfinite(c)) {
    throw DomainError("FatTail dampener needs a > 0, b >= e, c > 1 (got a=" +
                      num(a) + ", b=" + num(b) + ", c=" + num(c) + ")");
  }
  Dampener h(Kind::FatTail, a, b, c);
  h.validate();
  return h;
}

double Dampener::value(double xi) const {
  const double z = a_ * xi + b_;
  if (kind_ == Kind::Polynomial) return std::pow(z, 1.0 - c_) / (a_ * (c_ - 1.0));
  return std::pow(std::log(z), 1.0 - c_);
}

double Dampener::first_derivative(double xi) const {
  const double z = a_ * xi + b_;
  if (kind_ == Kind::Polynomial) return -std::pow(z, -c_);
  const double l = std::log(z);
  return -(c_ - 1.0) * a_ / (z * std::pow(l, c_));
}

double Dampener::second_derivative(double xi) const {
  const double z = a_ * xi + b_;
  if (kind_ == Kind::Polynomial) return a_ * c_ * std::pow(z, -c_ - 1.0);
  const double l = std::log(z);
  return (c_ - 1.0) * a_ * a_ * (l + c_) / (z * z * std::pow(l, c_ + 1.0));
}

double Dampener::inverse_slope(double xi) const {
  const double z = a_ * xi + b_;
  if (kind_ == Kind::Polynomial) return std::pow(z, c_);
  return z * std::pow(std::log(z), c_) / ((c_ - 1.0) * a_);
}

void Dampener::validate() const {
  const double h0 = value(0.0);
  if (!(h0 > 0.0) || !std::isfinite(h0)) {
    throw DomainError("dampener h(0) must be finite and positive, got " + num(h0));
  }
  for (double xi : exp_concavity_grid()) {
    const double d1 = first_derivative(xi);
    const double d2 = second_derivative(xi);
    if (!(d1 < 0.0) || d1 * d1 > d2 * (1.0 + 1e-10)) {
      throw DomainError("dampener fails h'^2 <= h'' at xi=" + num(xi));
    }
  }
  // h -> 0: strictly below h(0) far out, and still decreasing there.
  const double probe = 1e300 / a_;
  if (!(value(probe) < h0) || !(first_derivative(probe) <= 0.0)) {
    throw DomainError("dampener does not decay towards 0");
  }
}

// ------------------------------------------------------------------- Curve

Curve Curve::constant(double c) {
  require(std::isfinite(c), "Constant curve needs a finite value");
  return Curve(Constant{c});
}

Curve Curve::log_floor(double scale, double offset) {
  require(std::isfinite(scale) && scale >= 0.0,
          "LogFloor scale must be finite and >= 0, got " + num(scale));
  require(std::isfinite(offset), "LogFloor offset must be finite");
  return Curve(LogFloor{scale, offset});
}

Curve Curve::quadratic_threshold(double a, double b, const Curve& base) {
  require(std::isfinite(a) && std::isfinite(b) && a > 0.0 && b > 0.0,
          "QuadraticThreshold needs a > 0 and b > 0");
  // Nondecreasing iff 2a(a base + b) >= 1 along the base; base >= 0 at 0.
  require(2.0 * a * b >= 1.0 - 1e-12,
          "QuadraticThreshold needs 2ab >= 1, got 2ab=" + num(2.0 * a * b));
  require(base.eval(0.0) >= 0.0, "QuadraticThreshold base must be >= 0 at 0");
  return Curve(QuadraticThreshold{a, b, std::make_shared<const Curve>(base)});
}

Curve Curve::exp_concave_threshold(const Dampener& h, const Curve& base) {
  require(base.eval(0.0) >= 0.0, "ExpConcaveThreshold base must be >= 0 at 0");
  return Curve(ExpConcaveThreshold{h, std::make_shared<const Curve>(base)});
}

Curve Curve::lil_threshold(double d) {
  require(std::isfinite(d) && d > 0.0 && d <= 1.0,
          "LilThreshold needs 0 < d <= 1, got d=" + num(d));
  return Curve(LilThreshold{d});
}

Curve Curve::lil_floor() { return log_floor(kInvSqrt2Pi, 0.0); }

Curve Curve::tabulated(std::vector<std::pair<double, double>> points,
                       bool extend_constant) {
  require(!points.empty(), "Tabulated curve needs at least one point");
  Tabulated t{{}, {}, extend_constant};
  t.x.reserve(points.size());
  t.value.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [x, v] = points[i];
    require(std::isfinite(x) && std::isfinite(v) && x >= 0.0,
            "Tabulated points must be finite with x >= 0");
    if (i > 0) {
      require(x > t.x.back(), "Tabulated x must be strictly increasing (at x=" +
                                  num(x) + ")");
      require(v >= t.value.back(),
              "Tabulated values must be nondecreasing (at x=" + num(x) + ")");
    }
    t.x.push_back(x);
    t.value.push_back(v);
  }
  return Curve(std::move(t));
}

double Curve::eval(double x) const {
  if (!(x >= 0.0)) throw DomainError("curve evaluated at x=" + num(x) + " < 0");
  if (const auto* t = std::get_if<Tabulated>(&family_)) {
    if (x > t->x.back()) {
      if (t->extend_constant) return t->value.back();
      throw ExtrapolationError("tabulated curve queried at x=" + num(x) +
                               " beyond last knot " + num(t->x.back()));
    }
    if (x < t->x.front()) {
      throw ExtrapolationError("tabulated curve queried at x=" + num(x) +
                               " before first knot " + num(t->x.front()));
    }
    const auto it = std::lower_bound(t->x.begin(), t->x.end(), x);
    if (it == t->x.end() || *it != x) {
      throw DomainError("tabulated curve has no knot at x=" + num(x));
    }
    return t->value[static_cast<std::size_t>(it - t->x.begin())];
  }
  return eval_log1p(std::log1p(x));
}

double Curve::derivative(double x) const {
  if (!(x >= 0.0)) throw DomainError("derivative at x=" + num(x) + " < 0");
  if (!closed_form()) {
    throw UnsupportedError("tabulated curves have no analytic derivative");
  }
  return derivative_log1p(std::log1p(x)) / (1.0 + x);
}

double Curve::eval_log1p(double u) const {
  if (!(u >= 0.0)) throw DomainError("curve evaluated at log1p(x)=" + num(u) + " < 0");
  return std::visit(
      Overloaded{
          [](const Constant& c) { return c.c; },
          [u](const LogFloor& l) { return l.offset + l.scale * u; },
          [u](const QuadraticThreshold& q) {
            const double base = q.base->eval_log1p(u);
            const double s = q.a * base + q.b;
            return s * s - base;
          },
          [u](const ExpConcaveThreshold& e) {
            const double base = e.base->eval_log1p(u);
            return e.h.inverse_slope(base) - base;
          },
          [u](const LilThreshold& l) {
            const double fl = u * kInvSqrt2Pi;
            return lil_u(fl, l.d) - fl;
          },
          [](const Tabulated&) -> double {
            throw UnsupportedError("tabulated curves cannot be evaluated in log time");
          },
      },
      family_);
}

double Curve::derivative_log1p(double u) const {
  if (!(u >= 0.0)) throw DomainError("derivative at log1p(x)=" + num(u) + " < 0");
  return std::visit(
      Overloaded{
          [](const Constant&) { return 0.0; },
          [](const LogFloor& l) { return l.scale; },
          [u](const QuadraticThreshold& q) {
            const double base = q.base->eval_log1p(u);
            return (2.0 * q.a * (q.a * base + q.b) - 1.0) * q.base->derivative_log1p(u);
          },
          [u](const ExpConcaveThreshold& e) {
            const double base = e.base->eval_log1p(u);
            const double d1 = e.h.first_derivative(base);
            const double d2 = e.h.second_derivative(base);
            return (d2 / (d1 * d1) - 1.0) * e.base->derivative_log1p(u);
          },
          [u](const LilThreshold& l) {
            const double fl = u * kInvSqrt2Pi;
            return (lil_u_prime(fl, l.d) - 1.0) * kInvSqrt2Pi;
          },
          [](const Tabulated&) -> double {
            throw UnsupportedError("tabulated curves have no analytic derivative");
          },
      },
      family_);
}

bool Curve::closed_form() const {
  return !std::holds_alternative<Tabulated>(family_);
}

double Curve::limit() const {
  return std::visit(
      Overloaded{
          [](const Constant& c) { return c.c; },
          [](const LogFloor& l) { return l.scale > 0.0 ? kInf : l.offset; },
          [](const QuadraticThreshold& q) {
            const double base = q.base->limit();
            if (std::isinf(base)) return kInf;
            const double s = q.a * base + q.b;
            return s * s - base;
          },
          [](const ExpConcaveThreshold& e) {
            const double base = e.base->limit();
            if (std::isinf(base)) return kInf;
            return e.h.inverse_slope(base) - base;
          },
          [](const LilThreshold&) { return kInf; },
          [](const Tabulated& t) { return t.value.back(); },
      },
      family_);
}

bool Curve::is_threshold_over(const Curve& floor) const {
  return std::visit(
      Overloaded{
          [&](const QuadraticThreshold& q) { return *q.base == floor; },
          [&](const ExpConcaveThreshold& e) { return *e.base == floor; },
          [&](const LilThreshold&) { return floor == lil_floor(); },
          [](const auto&) { return false; },
      },
      family_);
}

double Curve::tail_mass(double y) const {
  return std::visit(
      Overloaded{
          [y](const QuadraticThreshold& q) { return 1.0 / (q.a * (q.a * y + q.b)); },
          [y](const ExpConcaveThreshold& e) { return e.h.value(y); },
          [y](const LilThreshold& l) { return l.d / std::log(kE + y); },
          [](const auto&) -> double {
            throw UnsupportedError("tail_mass needs a threshold family");
          },
      },
      family_);
}

bool Curve::operator==(const Curve& other) const {
  if (family_.index() != other.family_.index()) return false;
  return std::visit(
      Overloaded{
          [&](const Constant& a) { return a.c == std::get<Constant>(other.family_).c; },
          [&](const LogFloor& a) {
            const auto& b = std::get<LogFloor>(other.family_);
            return a.scale == b.scale && a.offset == b.offset;
          },
          [&](const QuadraticThreshold& a) {
            const auto& b = std::get<QuadraticThreshold>(other.family_);
            return a.a == b.a && a.b == b.b && *a.base == *b.base;
          },
          [&](const ExpConcaveThreshold& a) {
            const auto& b = std::get<ExpConcaveThreshold>(other.family_);
            return a.h == b.h && *a.base == *b.base;
          },
          [&](const LilThreshold& a) { return a.d == std::get<LilThreshold>(other.family_).d; },
          [&](const Tabulated& a) {
            const auto& b = std::get<Tabulated>(other.family_);
            return a.x == b.x && a.value == b.value &&
                   a.extend_constant == b.extend_constant;
          },
      },
      family_);
}

}  // namespace av
