#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "qlap/qcalc.hpp"
#include "qlap/qspecial.hpp"
#include "qlap/time_expr.hpp"

using namespace qlap;

namespace {

double fact_q(int n, double q) {
  double f = 1.0;
  for (int k = 1; k <= n; ++k) f *= (1.0 - std::pow(q, k)) / (1.0 - q);
  return f;
}

}  // namespace

TEST(QDerivative, Examples) {
  const QContext ctx(0.5);
  EXPECT_EQ(q_derivative([](double) { return 3.0; }, 1.3, ctx), 0.0);
  EXPECT_NEAR(q_derivative([](double t) { return t * t; }, 1.0, ctx), 1.5, 1e-14);
  EXPECT_NEAR(q_derivative([](double t) { return t * t * t; }, 2.0, ctx), 7.0, 1e-13);
  EXPECT_THROW(q_derivative([](double t) { return t; }, 0.0, ctx), DomainError);
}

TEST(QDerivative, Higher) {
  const QContext ctx(0.5);
  EXPECT_NEAR(q_derivative_n([](double t) { return t * t * t; }, 1.0, 2, ctx), 2.625, 1e-13);
  EXPECT_NEAR(q_derivative_n([](double t) { return t * t; }, 1.7, 3, ctx), 0.0, 1e-12);
}

TEST(QDerivative, ProductRule) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (double q : {0.3, 0.5, 0.8}) {
    const QContext ctx(q);
    for (int trial = 0; trial < 20; ++trial) {
      const double a0 = u(rng), a1 = u(rng), a2 = u(rng), b0 = u(rng), b1 = u(rng), b2 = u(rng);
      auto f = [&](double t) { return a0 + t * (a1 + t * a2); };
      auto g = [&](double t) { return b0 + t * (b1 + t * b2); };
      auto fg = [&](double t) { return f(t) * g(t); };
      const double x = 0.2 + std::abs(u(rng));
      const double lhs = q_derivative(fg, x, ctx);
      const double rhs = q_derivative(f, x, ctx) * g(x) + f(q * x) * q_derivative(g, x, ctx);
      EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST(JacksonIntegral, Examples) {
  const QContext ctx(0.5);
  EXPECT_NEAR(jackson_integral([](double) { return 1.0; }, 2.5, ctx).value, 2.5, 1e-14);
  EXPECT_NEAR(jackson_integral([](double t) { return t; }, 1.0, ctx).value, 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(jackson_integral([](double t) { return t * t; }, 1.0, ctx).value, 1.0 / 1.75, 1e-14);
}

TEST(JacksonIntegral, FundamentalTheorem) {
  for (double q : {0.3, 0.5, 0.8}) {
    const QContext ctx(q);
    const TimeExpr fs[] = {TimeExpr(make_atom(1.0, 3.0)), TimeExpr(make_atom(1.0, 0.0, Base::EqExp, 0.3)),
                           TimeExpr(make_atom(1.0, 0.0, Base::SinQ, 0.5))};
    for (const auto& f : fs) {
      for (double x : {0.5, 1.0, 2.0}) {
        // Numeric q-derivative of the pointwise evaluator, then the Jackson sum.
        auto df = [&](double t) {
          return q_derivative([&](double y) { return evaluate(f, y, ctx); }, t, ctx);
        };
        const double lhs = jackson_integral(df, x, ctx).value;
        const double rhs = evaluate(f, x, ctx) - evaluate(f, 0.0, ctx);
        EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std::abs(rhs))) << print(f) << " x=" << x;
      }
    }
  }
}

TEST(JacksonIntegral, IntegrationByParts) {
  // int_0^x f(qt) D g(t) d_qt = f(x)g(x) - f(0)g(0) - int_0^x g(t) D f(t) d_qt
  for (double q : {0.3, 0.5, 0.8}) {
    const QContext ctx(q);
    auto f = [](double t) { return 1.0 + 2.0 * t * t; };
    auto g = [](double t) { return 3.0 - t + t * t * t; };
    const double x = 1.4;
    const double lhs = jackson_integral(
        [&](double t) { return f(q * t) * q_derivative(g, t, ctx); }, x, ctx).value;
    const double rhs = f(x) * g(x) - f(0) * g(0) -
                       jackson_integral([&](double t) { return g(t) * q_derivative(f, t, ctx); }, x, ctx).value;
    EXPECT_NEAR(lhs, rhs, 1e-9 * std::abs(rhs));
  }
}

TEST(ImproperIntegral, Examples) {
  const QContext ctx(0.5);
  const auto g3 = improper_integral(
      [&](double t) { return t * t * Eq_exp(-0.5 * t, ctx).value; }, ctx);
  EXPECT_TRUE(g3.converged);
  EXPECT_NEAR(g3.value, 1.5, 1e-12);
  EXPECT_NEAR(improper_integral([&](double t) { return Eq_exp(-0.5 * t, ctx).value; }, ctx).value, 1.0, 1e-12);
  EXPECT_NEAR(improper_integral([&](double t) { return eq_exp(-t, ctx).value; }, ctx).value, 1.0, 1e-12);
}

TEST(Gamma, FirstKindMatchesFactorial) {
  for (double q : {0.3, 0.5, 0.8}) {
    const QContext ctx(q);
    for (int n = 0; n <= 10; ++n) EXPECT_NEAR(q_gamma_first(n + 1.0, ctx) / fact_q(n, q), 1.0, 1e-9);
  }
  EXPECT_NEAR(q_gamma_first(1.0, QContext(0.5)), 1.0, 1e-12);
  EXPECT_NEAR(q_gamma_first(4.0, QContext(0.5)), 2.625, 1e-12);
}

TEST(Gamma, FirstKindMatchesClosedFormAtRealArguments) {
  for (double q : {0.3, 0.5, 0.8}) {
    const QContext ctx(q);
    for (double t : {0.5, 1.5, 2.25}) EXPECT_NEAR(q_gamma_first(t, ctx) / q_gamma_jackson(t, ctx), 1.0, 1e-9);
  }
}

TEST(Gamma, SecondKindRelation) {
  for (double q : {0.3, 0.5, 0.8}) {
    const QContext ctx(q);
    for (int n = 1; n <= 8; ++n) {
      const double expected = std::pow(q, -0.5 * n * (n - 1)) * fact_q(n - 1, q);
      EXPECT_NEAR(q_gamma_second(n, ctx) / expected, 1.0, 1e-8) << "n=" << n << " q=" << q;
    }
  }
  EXPECT_NEAR(q_gamma_second(1.0, QContext(0.5)), 1.0, 1e-12);
  EXPECT_NEAR(q_gamma_second(3.0, QContext(0.5)), 12.0, 1e-10);
}

TEST(Beta, Examples) {
  const QContext ctx(0.5);
  EXPECT_NEAR(q_beta(1.0, 1.0, ctx), 1.0, 1e-13);
  EXPECT_NEAR(q_beta(2.0, 2.0, ctx), 1.0 / 2.625, 1e-12);
  EXPECT_NEAR(q_beta(1.0, 3.0, ctx), 1.0 / 1.75, 1e-12);
}

TEST(Beta, GammaRatio) {
  for (double q : {0.3, 0.5, 0.8}) {
    const QContext ctx(q);
    for (int t = 1; t <= 5; ++t)
      for (int s = 1; s <= 5; ++s) {
        const double expected = fact_q(t - 1, q) * fact_q(s - 1, q) / fact_q(t + s - 1, q);
        EXPECT_NEAR(q_beta(t, s, ctx) / expected, 1.0, 1e-8);
      }
  }
}

TEST(FractionalIntegral, Examples) {
  const QContext ctx(0.5);
  EXPECT_NEAR(fractional_integral([](double s) { return s; }, 1.0, 1.0, ctx), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(fractional_integral([](double) { return 1.0; }, 2.0, 1.0, ctx), 1.0 / 1.5, 1e-12);
  EXPECT_THROW(fractional_integral([](double) { return 1.0; }, 1.0, 0.0, ctx), DomainError);
}

TEST(FractionalIntegral, OrderOneIsJacksonIntegral) {
  const QContext ctx(0.8);
  auto f = [](double s) { return std::cos(s) + s * s; };
  for (double t : {0.3, 1.0, 2.2})
    EXPECT_NEAR(fractional_integral(f, 1.0, t, ctx), jackson_integral(f, t, ctx).value, 1e-12);
}

TEST(Convolution, Examples) {
  const QContext ctx(0.5);
  EXPECT_NEAR(q_convolution({{1.0, 1.0}}, 2.0, 1.0, ctx), 1.0 / 2.625, 1e-12);
  EXPECT_NEAR(q_convolution({{1.0, 0.0}}, 1.0, 1.7, ctx), 1.7, 1e-12);
  // t^{1/2} with beta = 1/2 against the direct lattice sum.
  const double direct = fractional_integral([](double s) { return std::sqrt(s); }, 0.5, 1.0, ctx);
  EXPECT_NEAR(q_convolution({{1.0, 0.5}}, 0.5, 1.0, ctx), direct, 1e-10);
  EXPECT_THROW(q_convolution({{1.0, -1.5}}, 1.0, 1.0, ctx), DomainError);
}

TEST(Convolution, PowerRule) {
  // t^alpha * t^{beta-1} = [alpha]! [beta-1]! / [alpha+beta]! t^{alpha+beta} for integer orders
  for (double q : {0.3, 0.5, 0.8}) {
    const QContext ctx(q);
    for (int alpha = 0; alpha <= 3; ++alpha)
      for (int beta = 1; beta <= 3; ++beta) {
        const double t = 1.3;
        const double expected = fact_q(alpha, q) * fact_q(beta - 1, q) / fact_q(alpha + beta, q) *
                                std::pow(t, alpha + beta);
        EXPECT_NEAR(q_convolution({{1.0, static_cast<double>(alpha)}}, beta, t, ctx) / expected, 1.0, 1e-9);
      }
  }
}

TEST(LatticeSum, ReportsNonConvergence) {
  const QContext ctx = QContext(0.5).with_max_terms(64);
  const auto r = improper_integral([](double t) { return 1.0 / (t * t); }, ctx);
  EXPECT_FALSE(r.converged);
}
