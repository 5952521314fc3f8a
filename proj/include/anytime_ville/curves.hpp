#pragma once

#include <memory>
#include <utility>
#include <variant>
#include <vector>

namespace av {

/// A 1-exp-concave dampener h (xi -> exp(-h(xi)) concave) with h -> 0 at
/// infinity. Generates thresholds g = -1/h'(f) - f for which
/// \int_0^\infty f'/(f+g) = h(f(0)) - h(f(\infty)).
class Dampener {
 public:
  enum class Kind { Polynomial, FatTail };

  /// h(xi) = (a xi + b)^(1-c) / (a (c-1)); requires a, b > 0, c > 1,
  /// a c >= b^(1-c).
  static Dampener polynomial(double a, double b, double c);
  /// h(xi) = ln(a xi + b)^(1-c); requires a > 0, b >= e, c > 1.
  static Dampener fat_tail(double a, double b, double c);

  Kind kind() const { return kind_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }

  double value(double xi) const;
  double first_derivative(double xi) const;
  double second_derivative(double xi) const;

  /// -1 / h'(xi): the quantity f + g for a threshold built on this dampener.
  double inverse_slope(double xi) const;

  bool operator==(const Dampener&) const = default;

 private:
  Dampener(Kind kind, double a, double b, double c);
  void validate() const;

  Kind kind_;
  double a_;
  double b_;
  double c_;
};

/// A nondecreasing curve on [0, inf) used either as a lower-bound curve f
/// (the supermartingale stays above -f) or as a threshold g.
///
/// Curves are immutable values; composite thresholds share their base curve.
class Curve {
 public:
  struct Constant {
    double c;
  };
  /// x -> offset + scale * ln(1 + x)
  struct LogFloor {
    double scale;
    double offset;
  };
  /// x -> (a base(x) + b)^2 - base(x)
  struct QuadraticThreshold {
    double a;
    double b;
    std::shared_ptr<const Curve> base;
  };
  /// x -> -1/h'(base(x)) - base(x)
  struct ExpConcaveThreshold {
    Dampener h;
    std::shared_ptr<const Curve> base;
  };
  /// x -> u(fl(x)) - fl(x) with fl(x) = ln(1+x)/sqrt(2 pi) and
  /// u(y) = (e + y) ln^2(e + y) / d.
  struct LilThreshold {
    double d;
  };
  /// Values at knots only; no interpolation.
  struct Tabulated {
    std::vector<double> x;
    std::vector<double> value;
    bool extend_constant;
  };

  using Family = std::variant<Constant, LogFloor, QuadraticThreshold,
                              ExpConcaveThreshold, LilThreshold, Tabulated>;

  static Curve constant(double c);
  static Curve log_floor(double scale, double offset = 0.0);
  static Curve quadratic_threshold(double a, double b, const Curve& base);
  static Curve exp_concave_threshold(const Dampener& h, const Curve& base);
  static Curve lil_threshold(double d);
  static Curve tabulated(std::vector<std::pair<double, double>> points,
                         bool extend_constant = false);

  /// The floor ln(1+x)/sqrt(2 pi) under the Gaussian mixture martingale.
  static Curve lil_floor();

  double eval(double x) const;
  double operator()(double x) const { return eval(x); }

  /// Analytic derivative; throws UnsupportedError for Tabulated.
  double derivative(double x) const;

  /// Every closed-form family depends on x only through u = ln(1 + x). These
  /// evaluate the curve and d/du at a given u without forming x, so they stay
  /// finite far past where x itself would overflow.
  double eval_log1p(double u) const;
  double derivative_log1p(double u) const;

  bool closed_form() const;

  /// Value approached as x -> inf (last value for tabulated curves).
  double limit() const;

  /// True when this curve is a threshold family whose base equals `floor`,
  /// in which case tail_mass() closes the improper integral analytically.
  bool is_threshold_over(const Curve& floor) const;

  /// For a threshold G over base f: \int_y^\infty dz / (G(z) + z), written
  /// in floor-value space (z = f(t)).
  double tail_mass(double y) const;

  const Family& family() const { return family_; }

  bool operator==(const Curve& other) const;

 private:
  explicit Curve(Family family) : family_(std::move(family)) {}

  Family family_;
};

}  // namespace av
