#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "anytime_ville/errors.hpp"
#include "anytime_ville/lil.hpp"
#include "anytime_ville/ville.hpp"
#include "oracles.hpp"

namespace lil = av::lil;
using oracle::Big;

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

Big big_I(double xd) {
  const Big x = xd;
  const Big x2 = x * x;
  Big a = x2;
  Big sum = 0;
  for (int k = 0; k < 4000; ++k) {
    const Big term = a / (2 * k + 2);
    sum += term;
    if (term < sum * Big("1e-45") && k > xd * xd) break;
    a *= x2 / (2 * k + 3);
  }
  return sqrt(2 / oracle::pi()) * sum;
}

Big big_ell(const Big& x) {
  const Big z = x * x / 2;
  const Big em1 = exp(z) - 1;
  return sqrt(em1 * em1 * em1 / (x * x * exp(z)));
}

Big big_ell_prime(const Big& x) {
  const Big z = x * x / 2;
  return 1 / (x * x) * sqrt((exp(z) - 1) / exp(z)) * (exp(z) * (x * x - 1) + z + 1);
}

Big big_tau(double n, double delta) {
  const Big a = log(Big(n) + 1) / sqrt(2 * oracle::pi()) + oracle::e();
  return a * log(a) * log(a) / -log(1 - Big(delta));
}

Big big_R(const Big& tau) {
  const Big xi = sqrt(2 * log(1 + sqrt(Big(2)) * tau));
  return (tau - big_ell(xi)) / big_ell_prime(xi);
}

std::vector<double> grid(double lo, double hi, int count) {
  std::vector<double> xs;
  for (int i = 0; i < count; ++i) xs.push_back(lo + (hi - lo) * i / (count - 1));
  return xs;
}

}  // namespace

TEST(LilParams, Validation) {
  EXPECT_NO_THROW(lil::LilParams(0.6));
  EXPECT_THROW(lil::LilParams(0.61), av::InvalidQuery);
  EXPECT_THROW(lil::LilParams(0.0), av::InvalidQuery);
  EXPECT_THROW(lil::LilParams(0.05, -1.0), av::InvalidQuery);
  EXPECT_NEAR(lil::LilParams(0.05).delta_prime(), -std::log(0.95), 1e-16);
}

TEST(SpecialI, ZeroAndEvenness) {
  EXPECT_EQ(lil::I_direct(0.0), 0.0);
  EXPECT_EQ(lil::I_sech(0.0), 0.0);
  EXPECT_EQ(lil::I_series(0.0), 0.0);
  EXPECT_DOUBLE_EQ(lil::I_direct(-1.3), lil::I_direct(1.3));
  EXPECT_DOUBLE_EQ(lil::I_series(-1.3), lil::I_series(1.3));
}

TEST(SpecialI, DirectAgreesWithSech) {
  for (double x : grid(0.1, 8.0, 100)) {
    EXPECT_LT(oracle::rel_err(lil::I_direct(x), lil::I_sech(x)), 1e-9) << x;
  }
  EXPECT_LT(oracle::rel_err(lil::I_direct(2.0), lil::I_sech(2.0)), 1e-9);
  EXPECT_LT(oracle::rel_err(lil::I_sech(1.0), lil::I_direct(1.0)), 1e-9);
}

TEST(SpecialI, SeriesMatchesHighPrecision) {
  for (double x : {1e-3, 0.5, 1.0, 3.0, 8.0, 20.0, 35.0}) {
    EXPECT_LT(oracle::rel_err(lil::I_series(x), big_I(x).convert_to<double>()), 1e-14) << x;
  }
}

TEST(SpecialI, OverflowGuard) {
  EXPECT_THROW(lil::I_direct(41.0), av::OverflowError);
  EXPECT_THROW(lil::I_sech(-41.0), av::OverflowError);
  EXPECT_THROW(lil::I_series(39.0), av::OverflowError);  // finite x, result overflows
}

TEST(Ell, ValuesAndLimit) {
  EXPECT_EQ(lil::ell(0.0), 0.0);
  EXPECT_LT(oracle::rel_err(lil::ell(1.0), big_ell(1).convert_to<double>()), 1e-15);
  for (double x : {1e-5, 1e-3, 0.3, 4.0, 30.0}) {
    EXPECT_LT(oracle::rel_err(lil::ell(x), big_ell(x).convert_to<double>()), 1e-13) << x;
  }
}

TEST(Ell, BelowI) {
  for (double x : grid(0.0, 10.0, 100)) {
    EXPECT_LE(lil::ell(x), lil::I_direct(x)) << x;
    EXPECT_LE(lil::ell(x), lil::I_sech(x)) << x;
  }
}

TEST(Ell, Convex) {
  const double h = 1e-3;
  for (double x : grid(0.01, 8.0, 200)) {
    const double second = lil::ell(x + h) - 2 * lil::ell(x) + lil::ell(x - h);
    EXPECT_GE(second, -1e-9) << x;
  }
}

TEST(EllPrime, MatchesFiniteDifference) {
  const double fd = oracle::central_difference(lil::ell, 2.0, 1e-5);
  EXPECT_LT(oracle::rel_err(lil::ell_prime(2.0), fd), 1e-6);
  for (double x : {0.01, 0.5, 3.0, 7.0}) {
    EXPECT_LT(oracle::rel_err(lil::ell_prime(x), big_ell_prime(x).convert_to<double>()), 1e-12);
  }
}

TEST(EllPrime, PositiveAndSpecialPoint) {
  for (double x : grid(0.01, 20.0, 300)) EXPECT_GT(lil::ell_prime(x), 0.0);
  const double e_half = std::exp(0.5);
  EXPECT_NEAR(lil::ell_prime(1.0), 1.5 * std::sqrt((e_half - 1.0) / e_half), 1e-15);
  EXPECT_THROW(lil::ell_prime(0.0), av::DomainError);
}

TEST(Remainder, ClosedFormEqualsTangentGap) {
  for (double tau = 1e-2; tau <= 1e8; tau *= 1.7) {
    EXPECT_NEAR(lil::remainder_R(tau), lil::remainder_R_tangent(tau), 1e-9) << tau;
  }
}

TEST(Remainder, MatchesHighPrecision) {
  for (double tau : {0.01, 0.1, 1.0, 10.0, 1e3, 1e6, 1e8}) {
    EXPECT_LT(oracle::rel_err(lil::remainder_R(tau), big_R(tau).convert_to<double>()), 1e-12) << tau;
  }
}

TEST(Remainder, CappedAndIncreasing) {
  double prev = 0.0;
  for (double tau = 1e-2; tau <= 1e8; tau *= 1.2) {
    const double r = lil::remainder_R(tau);
    EXPECT_LE(r, kInvSqrt2);
    EXPECT_GT(r, prev) << tau;
    prev = r;
  }
}

TEST(Remainder, AsymptoticRatio) {
  const double tau = 1e8;
  const double ratio = lil::remainder_R(tau) / (kInvSqrt2 * (1.0 - 1.0 / std::sqrt(std::log(tau))));
  EXPECT_GE(ratio, 0.9);
  EXPECT_LE(ratio, 1.1);
}

TEST(InvertThreshold, SoundOnDirectSweep) {
  for (int i = 1; i <= 200; ++i) {
    const double x = 8.0 * i / 200.0;
    EXPECT_GE(lil::invert_threshold(lil::I_direct(x)), x) << x;
  }
}

TEST(InvertThreshold, SoundOnEll) {
  for (double x : grid(0.05, 20.0, 200)) EXPECT_GE(lil::invert_threshold(lil::ell(x)), x - 1e-12);
}

TEST(InvertThreshold, VanishesAtZero) { EXPECT_LT(lil::invert_threshold(1e-12), 1e-5); }

TEST(InvertI, ExactInverse) {
  for (double tau : {1e-6, 0.3, 2.0, 50.0, 1e6, 1e20}) {
    const double x = lil::invert_I(tau);
    EXPECT_LT(oracle::rel_err(lil::I_series(x), tau), 1e-12);
    EXPECT_LE(x, lil::invert_threshold(tau));
  }
}

TEST(ImplicitRhs, Values) {
  const lil::LilParams p(0.05);
  EXPECT_NEAR(lil::implicit_rhs(0, p), std::numbers::e / p.delta_prime(), 1e-12);
  EXPECT_LT(oracle::rel_err(lil::implicit_rhs(1e4, p), big_tau(1e4, 0.05).convert_to<double>()),
            1e-14);
  double prev = 0.0;
  for (double n = 0; n <= 1e6; n = n < 10 ? n + 1 : n * 1.1) {
    const double t = lil::implicit_rhs(n, p);
    EXPECT_GT(t, prev);
    prev = t;
  }
}

TEST(ExplicitBound, FormsAgreeAndOrder) {
  for (double delta : {0.01, 0.05, 0.3, 0.6}) {
    const lil::LilParams p(delta);
    for (double n : {0.0, 1.0, 10.0, 1e3, 1e6, 1e12}) {
      EXPECT_NEAR(lil::explicit_bound(n, p), lil::explicit_bound_expanded(n, p), 1e-12);
      EXPECT_LE(lil::explicit_bound(n, p), lil::simpler_bound(n, p));
      EXPECT_LE(lil::normalized_bound(n, p, lil::Form::Implicit), lil::explicit_bound(n, p));
    }
  }
}

TEST(ExplicitBound, AtZero) {
  const lil::LilParams p(0.05);
  const double tau = std::numbers::e / p.delta_prime();
  EXPECT_NEAR(lil::explicit_bound(0, p),
              std::sqrt(2 * std::log(1 + std::numbers::sqrt2 * tau)) + lil::remainder_R(tau), 1e-14);
}

TEST(ExplicitBound, MatchesHighPrecisionAtMillion) {
  const double n = 1e6;
  const Big tau = big_tau(n, 0.05);
  const Big want = sqrt(2 * log(1 + sqrt(Big(2)) * tau)) + big_R(tau);
  EXPECT_LT(oracle::rel_err(lil::explicit_bound(n, lil::LilParams(0.05)), want.convert_to<double>()),
            1e-13);
}

TEST(ExplicitBound, SoundAgainstImplicitEvent) {
  for (double delta : {0.05, 0.5}) {
    const lil::LilParams p(delta);
    for (double n : {0.0, 5.0, 1e3, 1e7}) {
      const double tau = lil::implicit_rhs(n, p);
      const double root = std::sqrt(n + 1.0);
      for (double s = 0.0; s <= 10.0 * root; s += 0.01 * root) {
        if (lil::I_series(s / root) <= tau) {
          ASSERT_LE(s / root, lil::explicit_bound(n, p)) << n << " " << s;
        }
      }
    }
  }
}

TEST(ExplicitBound, RatioToIteratedLogDecreases) {
  const lil::LilParams p(0.05);
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 3; k <= 15; ++k) {
    const double n = std::pow(10.0, k);
    const double ratio = lil::explicit_bound(n, p) / std::sqrt(2.0 * std::log(std::log(n)));
    EXPECT_GT(ratio, 1.0);
    EXPECT_LT(ratio, prev) << k;
    prev = ratio;
  }
}

TEST(MartingaleValue, ClosedFormCases) {
  EXPECT_EQ(lil::martingale_value(0, 0), 0.0);
  EXPECT_NEAR(lil::martingale_value(99, 0), -std::log(100.0) * kInvSqrt2Pi, 1e-15);
}

TEST(MartingaleValue, AgreesWithMixtureQuadrature) {
  EXPECT_LT(oracle::rel_err(lil::martingale_value_quadrature(10, 5), lil::martingale_value(10, 5)),
            1e-6);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double n = std::floor(std::pow(10.0, 6.0 * u(rng)));
    const double s = (12.0 * u(rng) - 6.0) * std::sqrt(n + 1.0);
    EXPECT_LT(oracle::rel_err(lil::martingale_value_quadrature(n, s), lil::martingale_value(n, s)),
              1e-6)
        << n << " " << s;
  }
}

TEST(KappaRescale, Substitution) {
  const lil::LilParams p(0.05);
  auto bound = [&](double n) { return lil::explicit_bound(n, p); };
  const auto same = lil::kappa_rescale(bound, 1.0);
  EXPECT_EQ(same(17.0), bound(17.0));
  const auto doubled = lil::kappa_rescale(bound, 2.0);
  EXPECT_EQ(doubled(4.0), 2.0 * bound(1.0));
}

TEST(KappaRescale, SumBoundUsesRescaling) {
  const lil::LilParams p(0.05, 2.0);
  const double n = 400.0;
  EXPECT_NEAR(lil::sum_bound(n, p, lil::Form::Explicit),
              2.0 * std::sqrt(n / 4.0 + 1.0) * lil::explicit_bound(n / 4.0, p), 1e-12);
}

TEST(LilThreshold, GoodThresholdProperties) {
  const av::Curve f = av::Curve::lil_floor();
  for (double d : {0.1, 0.5, 1.0}) {
    const av::Curve g = av::Curve::lil_threshold(d);
    double prev = -1.0;
    for (int i = 0; i < 10'000; ++i) {
      const double x = std::expm1(i * 0.005);
      const double v = g.eval(x);
      ASSERT_GE(v, f.eval(x));
      ASSERT_GE(v, prev);
      prev = v;
    }
    EXPECT_NEAR(av::floor_integral(f, g, 0.0).value, d, 1e-8);
    const double probe = 1e12;
    EXPECT_NEAR(av::floor_integral_between(f, g, 0.0, probe) + g.tail_mass(f.eval(probe)), d, 1e-8);
  }
}
