#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "qlap/qspecial.hpp"

using namespace qlap;

namespace {

// Oracles are written from the definitions, independently of the library.

double fact_q(int n, double q) {
  double f = 1.0;
  for (int k = 1; k <= n; ++k) f *= (1.0 - std::pow(q, k)) / (1.0 - q);
  return f;
}

// e_q(z) = 1 / ((1-q) z; q)_inf
double eq_product(double z, double q) {
  double p = 1.0;
  for (int k = 0; k < 400; ++k) p *= 1.0 - (1.0 - q) * z * std::pow(q, k);
  return 1.0 / p;
}

// E_q(z) = (-(1-q) z; q)_inf
double Eq_product(double z, double q) {
  double p = 1.0;
  for (int k = 0; k < 400; ++k) p *= 1.0 + (1.0 - q) * z * std::pow(q, k);
  return p;
}

// sum over n of sign * q^{C(n,2) if capital} z^n / [n]!, restricted by parity
double trig_series(double z, double q, int parity, bool alternating, bool capital) {
  double s = 0.0;
  for (int n = parity; n < 400; n += 2) {
    double term = std::pow(z, n) / fact_q(n, q);
    if (capital) term *= std::pow(q, 0.5 * n * (n - 1));
    if (alternating && (n / 2) % 2 == 1) term = -term;
    s += term;
  }
  return s;
}

}  // namespace

TEST(EqExp, Examples) {
  const QContext ctx(0.5);
  EXPECT_EQ(eq_exp(0.0, ctx).value, 1.0);
  EXPECT_NEAR(eq_exp(-1.0, ctx).value, 0.419422, 1e-6);
  EXPECT_NEAR(eq_exp(-1.0, ctx).value, eq_product(-1.0, 0.5), 1e-14);
}

TEST(EqExp, ComplexArgumentIsUnimodularBounded) {
  const QContext ctx(0.5);
  const auto v = eq_exp(std::complex<double>(0.0, 1.0), ctx).value;
  EXPECT_LE(std::abs(v), 1.0);
  EXPECT_NEAR(v.real(), cos_q(1.0, ctx).value, 1e-13);
  EXPECT_NEAR(v.imag(), sin_q(1.0, ctx).value, 1e-13);
  for (int i = 0; i <= 100; ++i) {
    const double t = 0.37 * i;
    EXPECT_LE(std::abs(eq_exp(std::complex<double>(0.0, 2.0 * t), ctx).value), 1.0 + 1e-15);
  }
}

TEST(EqExp, SeriesProductAgreement) {
  std::mt19937 rng(3);
  for (double q : {0.3, 0.5, 0.8}) {
    const QContext ctx(q);
    std::uniform_real_distribution<double> u(-0.9 / (1.0 - q), 0.9 / (1.0 - q));
    for (int i = 0; i < 200; ++i) {
      const double z = u(rng);
      const double a = eq_exp(z, ctx, Force::Series).value;
      const double b = eq_exp(z, ctx, Force::Product).value;
      EXPECT_NEAR(a / b, 1.0, 1e-9) << "z=" << z << " q=" << q;
      const double c = Eq_exp(z, ctx, Force::Series).value;
      const double d = Eq_exp(z, ctx, Force::Product).value;
      EXPECT_NEAR(c / d, 1.0, 1e-9) << "z=" << z << " q=" << q;
    }
  }
}

TEST(EqExp, NearPoleIsFlagged) {
  const QContext ctx(0.5);
  // Poles of e_q at z = q^{-k}/(1-q).
  const double pole = 4.0 / 0.5;
  EXPECT_THROW(eq_exp(pole, ctx), PoleError);
  EXPECT_TRUE(eq_exp(pole * (1.0 + 1e-10), ctx).near_pole());
  EXPECT_FALSE(eq_exp(pole * 1.01, ctx).near_pole());
}

TEST(EqExp, ReciprocalOfCapital) {
  for (double q : {0.3, 0.5, 0.8}) {
    const QContext ctx(q);
    for (double z : {-3.0, -0.4, 0.7, 1.9})
      EXPECT_NEAR(eq_exp(z, ctx).value * Eq_exp(-z, ctx).value, 1.0, 1e-12);
  }
}

TEST(CapEqExp, Examples) {
  const QContext ctx(0.5);
  EXPECT_EQ(Eq_exp(0.0, ctx).value, 1.0);
  EXPECT_NEAR(Eq_exp(-1.0, ctx).value, 0.2887881, 1e-7);
  EXPECT_NEAR(Eq_exp(3.7, ctx).value, Eq_product(3.7, 0.5), 1e-12 * Eq_product(3.7, 0.5));
}

TEST(CapEqExp, ScaledAvoidsOverflow) {
  const QContext ctx(0.9);
  const auto big = Eq_exp_scaled(1e6, ctx);
  double log_oracle = 0.0;
  for (int k = 0; k < 2000; ++k) log_oracle += std::log1p((1.0 - 0.9) * 1e6 * std::pow(0.9, k));
  EXPECT_NEAR(big.log_scale + std::log(big.mantissa), log_oracle, 1e-9 * log_oracle);
}

TEST(KernelFunctionalEquation, KFold) {
  for (double q : {0.3, 0.5, 0.8}) {
    const QContext ctx(q);
    for (double st : {0.2, 1.5, 6.0})
      for (int k = 1; k <= 5; ++k) {
        double den = 1.0;
        for (int j = 0; j < k; ++j) den *= 1.0 + (q - 1.0) * std::pow(q, j) * st;
        const double lhs = Eq_exp(-std::pow(q, k) * st, ctx).value;
        const double rhs = Eq_exp(-st, ctx).value / den;
        EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(std::abs(lhs), 1e-300));
      }
  }
}

TEST(Trig, Examples) {
  const QContext ctx(0.5);
  EXPECT_EQ(cos_q(0.0, ctx).value, 1.0);
  EXPECT_EQ(sin_q(0.0, ctx).value, 0.0);
  EXPECT_EQ(Cos_q(0.0, ctx).value, 1.0);
  EXPECT_EQ(Sin_q(0.0, ctx).value, 0.0);
  EXPECT_EQ(cosh_q(0.0, ctx).value, 1.0);
  EXPECT_EQ(sinh_q(0.0, ctx).value, 0.0);
  // Four series terms: 0.1 - 1e-3/[3]! + 1e-5/[5]! - 1e-7/[7]!.
  const double four = 0.1 - 1e-3 / fact_q(3, 0.5) + 1e-5 / fact_q(5, 0.5) - 1e-7 / fact_q(7, 0.5);
  EXPECT_NEAR(sin_q(0.1, ctx).value, four, 1e-11);
  EXPECT_NEAR(sin_q(0.1, ctx).value, 0.0996200936, 1e-10);
  // Sin_q(z) = z - q^3 z^3/[3]! + ...
  EXPECT_NEAR(Sin_q(0.01, ctx).value, 0.01 - 0.125 * 1e-6 / 2.625, 1e-13);
}

TEST(Trig, MatchSeriesOracle) {
  for (double q : {0.3, 0.5, 0.8}) {
    const QContext ctx(q);
    for (double z : {0.05, 0.5, 1.0, 1.2}) {
      EXPECT_NEAR(cos_q(z, ctx).value, trig_series(z, q, 0, true, false), 1e-12);
      EXPECT_NEAR(sin_q(z, ctx).value, trig_series(z, q, 1, true, false), 1e-12);
      EXPECT_NEAR(Cos_q(z, ctx).value, trig_series(z, q, 0, true, true), 1e-12);
      EXPECT_NEAR(Sin_q(z, ctx).value, trig_series(z, q, 1, true, true), 1e-12);
      EXPECT_NEAR(cosh_q(z, ctx).value, trig_series(z, q, 0, false, false), 1e-12);
      EXPECT_NEAR(sinh_q(z, ctx).value, trig_series(z, q, 1, false, false), 1e-12);
    }
  }
}

TEST(Trig, ProductRegionMatchesDefinition) {
  const QContext ctx(0.5);
  for (double z : {3.0, 10.0, 40.0}) {
    // cos_q, sin_q from e_q(iz) = 1 / prod (1 - i (1-q) z q^k)
    std::complex<double> p = 1.0;
    for (int k = 0; k < 400; ++k) p *= 1.0 - std::complex<double>(0.0, (1.0 - 0.5) * z * std::pow(0.5, k));
    const std::complex<double> e = 1.0 / p;
    EXPECT_NEAR(cos_q(z, ctx).value, e.real(), 1e-13);
    EXPECT_NEAR(sin_q(z, ctx).value, e.imag(), 1e-13);
  }
}

TEST(Trig, ClassicalLimit) {
  const QContext ctx(0.999);
  for (double z : {0.1, 0.5, 1.0}) {
    EXPECT_NEAR(eq_exp(z, ctx).value / std::exp(z), 1.0, 0.01);
    EXPECT_NEAR(cos_q(z, ctx).value / std::cos(z), 1.0, 0.01);
    EXPECT_NEAR(sin_q(z, ctx).value / std::sin(z), 1.0, 0.01);
  }
}

TEST(Heaviside, Definition) {
  EXPECT_EQ(heaviside(1.0, 1.0), 1.0);
  EXPECT_EQ(heaviside(0.0, 1.0), 0.0);
  EXPECT_EQ(heaviside(0.0, 0.0), 1.0);
  EXPECT_EQ(heaviside(5.0, 0.0), 1.0);
  EXPECT_THROW(heaviside(1.0, -1.0), DomainError);
}

TEST(Kernels, Values) {
  const QContext ctx(0.5);
  EXPECT_EQ(kernel_first(2.0, 0.0, ctx).value, 1.0);
  EXPECT_EQ(kernel_second(2.0, 0.0, ctx).value, 1.0);
  EXPECT_NEAR(kernel_first(2.0, 0.7, ctx).value, Eq_product(-0.5 * 2.0 * 0.7, 0.5), 1e-14);
  EXPECT_NEAR(kernel_second(2.0, 0.7, ctx).value, eq_product(-2.0 * 0.7, 0.5), 1e-14);
}
