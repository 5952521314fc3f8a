#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "anytime_ville/curve_json.hpp"
#include "anytime_ville/curves.hpp"
#include "anytime_ville/errors.hpp"
#include "oracles.hpp"

using av::Curve;
using av::Dampener;

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

std::vector<Curve> closed_form_curves() {
  const Curve f = Curve::log_floor(1.0);
  return {
      Curve::constant(3.0),
      Curve::log_floor(0.7),
      Curve::log_floor(2.0, 1.0),
      Curve::lil_floor(),
      Curve::quadratic_threshold(1.0, 19.495725, f),
      Curve::quadratic_threshold(0.3, 2.0, Curve::lil_floor()),
      Curve::exp_concave_threshold(Dampener::polynomial(1.0, 1.0, 2.0), f),
      Curve::exp_concave_threshold(Dampener::polynomial(2.0, 0.5, 1.5), f),
      Curve::exp_concave_threshold(Dampener::fat_tail(1.0, std::numbers::e, 1.5), f),
      Curve::exp_concave_threshold(Dampener::fat_tail(0.5, 10.0, 3.0), f),
      Curve::lil_threshold(0.5),
      Curve::lil_threshold(1.0),
      Curve::lil_threshold(0.01),
  };
}

}  // namespace

TEST(CurveEval, ConstantIsConstant) { EXPECT_EQ(Curve::constant(20).eval(7), 20.0); }

TEST(CurveEval, LilFloorVanishesAtZero) { EXPECT_EQ(Curve::lil_floor().eval(0.0), 0.0); }

TEST(CurveEval, QuadraticAtZeroBaseIsBSquared) {
  const Curve g = Curve::quadratic_threshold(1.5, 2.0, Curve::log_floor(1.0));
  EXPECT_DOUBLE_EQ(g.eval(0.0), 4.0);
}

TEST(CurveEval, LogFloorMatchesFormula) {
  const Curve f = Curve::log_floor(0.3, 2.0);
  EXPECT_DOUBLE_EQ(f.eval(9.0), 2.0 + 0.3 * std::log(10.0));
}

TEST(CurveEval, LilThresholdMatchesComposition) {
  const double d = 0.5;
  const double x = 123.0;
  const double y = std::log1p(x) * kInvSqrt2Pi;
  const double l = std::log(std::numbers::e + y);
  EXPECT_NEAR(Curve::lil_threshold(d).eval(x), (std::numbers::e + y) * l * l / d - y, 1e-12);
}

TEST(CurveEval, NegativeArgumentIsDomainError) {
  EXPECT_THROW(Curve::log_floor(1.0).eval(-1.0), av::DomainError);
}

TEST(CurveDerivative, ConstantIsZero) { EXPECT_EQ(Curve::constant(5).derivative(3.0), 0.0); }

TEST(CurveDerivative, LogFloor) {
  EXPECT_DOUBLE_EQ(Curve::log_floor(2.5).derivative(4.0), 2.5 / 5.0);
}

TEST(CurveDerivative, LilThresholdMatchesFiniteDifference) {
  const Curve g = Curve::lil_threshold(0.5);
  const double fd = oracle::central_difference([&](double x) { return g.eval(x); }, 3.7, 1e-5);
  EXPECT_LT(oracle::rel_err(g.derivative(3.7), fd), 1e-6);
}

TEST(CurveDerivative, AllFamiliesMatchFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> log_x(-3.0, 6.0);
  for (const Curve& c : closed_form_curves()) {
    auto fn = [&](double x) { return c.eval(x); };
    for (int i = 0; i < 100; ++i) {
      const double x = std::pow(10.0, log_x(rng));
      const double h = 1e-3 * x;
      const double want = oracle::five_point(fn, x, h);
      const double got = c.derivative(x);
      if (want == 0.0) {
        EXPECT_EQ(got, 0.0);
      } else {
        EXPECT_LT(oracle::rel_err(got, want), 1e-6) << av::curve_to_json(c) << " at x=" << x;
      }
      EXPECT_GE(got, 0.0);
    }
  }
}

TEST(CurveDerivative, TabulatedIsUnsupported) {
  const Curve t = Curve::tabulated({{0, 0}, {1, 1}});
  EXPECT_THROW(t.derivative(0.5), av::UnsupportedError);
}

TEST(CurveMonotone, RandomGridsAreNondecreasing) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> x_dist(0.0, 1e6);
  for (const Curve& c : closed_form_curves()) {
    std::vector<double> grid(1000);
    for (double& x : grid) x = x_dist(rng);
    std::sort(grid.begin(), grid.end());
    for (std::size_t i = 1; i < grid.size(); ++i) {
      ASSERT_LE(c.eval(grid[i - 1]), c.eval(grid[i])) << av::curve_to_json(c);
    }
  }
}

TEST(CurveMonotone, ExpConcaveThresholdsNondecreasingNearZero) {
  const Curve f = Curve::log_floor(1.0);
  for (double c : {1.5, 2.0, 3.0}) {
    const Curve g = Curve::exp_concave_threshold(Dampener::polynomial(1.0, 1.0, c), f);
    double prev = g.eval(0.0);
    for (double x = 1e-3; x < 50.0; x *= 1.05) {
      const double v = g.eval(x);
      ASSERT_LE(prev, v);
      prev = v;
    }
  }
}

TEST(QuadraticThreshold, RejectsTwoAbBelowOne) {
  EXPECT_THROW(Curve::quadratic_threshold(1.0, 0.4, Curve::log_floor(1.0)), av::DomainError);
  EXPECT_NO_THROW(Curve::quadratic_threshold(1.0, 0.5, Curve::log_floor(1.0)));
}

TEST(LilThreshold, DominatesItsFloor) {
  const Curve f = Curve::lil_floor();
  for (double d : {0.01, 0.3, 1.0}) {
    const Curve g = Curve::lil_threshold(d);
    for (double x = 0.0; x < 1e12; x = 2.0 * x + 0.1) ASSERT_GE(g.eval(x), f.eval(x));
  }
}

TEST(LilThreshold, RejectsDOutsideUnitInterval) {
  EXPECT_THROW(Curve::lil_threshold(0.0), av::DomainError);
  EXPECT_THROW(Curve::lil_threshold(1.5), av::DomainError);
}

TEST(Tabulated, ExactKnotsOnly) {
  const Curve t = Curve::tabulated({{0, 0}, {1, 0.5}, {2, 2}});
  EXPECT_EQ(t.eval(1), 0.5);
  EXPECT_THROW(t.eval(1.5), av::DomainError);
  EXPECT_THROW(t.eval(3), av::ExtrapolationError);
}

TEST(Tabulated, ExtendConstantHoldsLastValue) {
  const Curve t = Curve::tabulated({{0, 0}, {1, 0.5}}, true);
  EXPECT_EQ(t.eval(100), 0.5);
}

TEST(Tabulated, RejectsBadOrdering) {
  EXPECT_THROW(Curve::tabulated({{0, 0}, {0, 1}}), av::DomainError);
  EXPECT_THROW(Curve::tabulated({{0, 1}, {1, 0}}), av::DomainError);
}

TEST(Tabulated, ReadsCsv) {
  const std::string path = testing::TempDir() + "tab.csv";
  {
    std::ofstream out(path);
    out << "x,value\n0,0\n1,1\n2,2\n";
  }
  const Curve t = av::tabulated_from_csv(path);
  EXPECT_EQ(t.eval(2), 2.0);
  std::remove(path.c_str());
}

TEST(Dampener, PolynomialConstraint) {
  EXPECT_THROW(Dampener::polynomial(0.1, 0.5, 2.0), av::DomainError);  // ac < b^(1-c)
  EXPECT_NO_THROW(Dampener::polynomial(1.0, 1.0, 2.0));
}

TEST(Dampener, FatTailConstraint) {
  EXPECT_THROW(Dampener::fat_tail(1.0, 2.0, 2.0), av::DomainError);
  EXPECT_THROW(Dampener::fat_tail(1.0, 3.0, 1.0), av::DomainError);
  EXPECT_NO_THROW(Dampener::fat_tail(1.0, std::numbers::e, 2.0));
}

TEST(Dampener, ExpConcaveOnGrid) {
  for (const Dampener& h : {Dampener::polynomial(1.0, 1.0, 1.5), Dampener::polynomial(1.0, 1.0, 3.0),
                            Dampener::fat_tail(1.0, std::numbers::e, 1.5),
                            Dampener::fat_tail(1.0, std::numbers::e, 2.0)}) {
    for (int k = 0; k < 256; ++k) {
      const double xi = k == 0 ? 0.0 : std::pow(10.0, -4.0 + 12.0 * (k - 1) / 254.0);
      const double d1 = h.first_derivative(xi);
      EXPECT_LE(d1 * d1, h.second_derivative(xi) * (1.0 + 1e-10));
    }
    EXPECT_LT(h.value(1e12), 0.2 * h.value(0.0));
  }
}

TEST(Dampener, DerivativesMatchFiniteDifferences) {
  for (const Dampener& h : {Dampener::polynomial(1.0, 1.0, 2.0), Dampener::fat_tail(1.0, 3.0, 2.0)}) {
    for (double xi : {0.5, 3.0, 40.0}) {
      const double d1 = oracle::five_point([&](double x) { return h.value(x); }, xi, 1e-3);
      const double d2 =
          oracle::five_point([&](double x) { return h.first_derivative(x); }, xi, 1e-3);
      EXPECT_LT(oracle::rel_err(h.first_derivative(xi), d1), 1e-8);
      EXPECT_LT(oracle::rel_err(h.second_derivative(xi), d2), 1e-8);
    }
  }
}

TEST(DampenerValues, ClosedFormsAtZero) {
  EXPECT_DOUBLE_EQ(Dampener::polynomial(2.0, 3.0, 2.0).value(0.0), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(Dampener::fat_tail(1.0, std::numbers::e, 2.0).value(0.0), 1.0);
}

TEST(CurveJson, RoundTripsEveryFamily) {
  auto curves = closed_form_curves();
  curves.push_back(Curve::tabulated({{0, 0}, {1, 0.25}, {3, 1}}, true));
  for (const Curve& c : curves) {
    const std::string text = av::curve_to_json(c);
    EXPECT_EQ(av::curve_from_json(text), c) << text;
    EXPECT_EQ(av::curve_to_json(av::curve_from_json(text)), text);
  }
}

TEST(CurveJson, ParsesSpecForm) {
  const Curve c = av::curve_from_json(R"({"kind":"Constant","params":{"c":20}})");
  EXPECT_EQ(c, Curve::constant(20));
  const Curve q = av::curve_from_json(
      R"({"kind":"QuadraticThreshold","params":{"a":1,"b":2,"base":{"kind":"LogFloor","params":{"scale":1}}}})");
  EXPECT_EQ(q, Curve::quadratic_threshold(1, 2, Curve::log_floor(1)));
}

TEST(CurveJson, MalformedInputIsParseError) {
  EXPECT_THROW(av::curve_from_json("{"), av::ParseError);
  EXPECT_THROW(av::curve_from_json(R"({"kind":"Nope","params":{}})"), av::ParseError);
  EXPECT_THROW(av::curve_from_json(R"({"kind":"Constant","params":{}})"), av::ParseError);
}
