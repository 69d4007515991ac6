#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qlap/qexpr.hpp"
#include "qlap/qlaplace.hpp"

using namespace qlap;

namespace {

constexpr auto kFirst = TransformKind::First;
constexpr auto kSecond = TransformKind::Second;

double fact_q(int n, double q) {
  double f = 1.0;
  for (int k = 1; k <= n; ++k) f *= (1.0 - std::pow(q, k)) / (1.0 - q);
  return f;
}

double rel(double a, double e) { return std::abs(a - e) / std::max(std::abs(e), 1e-300); }

double numeric(const std::string& text, double s, TransformKind k, const QContext& ctx) {
  const auto r = transform_numeric(parse_expr(text), s, k, ctx);
  EXPECT_TRUE(r.converged) << text << " s=" << s;
  return r.value;
}

double symbolic(const std::string& text, double s, TransformKind k, const QContext& ctx) {
  return evaluate(transform_symbolic(parse_expr(text), k, ctx), s, ctx);
}

}  // namespace

TEST(TransformNumeric, Examples) {
  const QContext ctx(0.5, 1e-13);
  for (double s : {0.3, 1.0, 4.0}) EXPECT_LT(rel(numeric("1", s, kFirst, ctx), 1.0 / s), 1e-10);
  EXPECT_LT(rel(numeric("t^2", 2.0, kFirst, ctx), 0.1875), 1e-10);
  EXPECT_LT(rel(numeric("t^2", 1.0, kSecond, ctx), 12.0), 1e-10);
}

TEST(TransformNumeric, RejectsNonPositiveS) {
  const QContext ctx(0.5);
  EXPECT_THROW(transform_numeric(parse_expr("t"), 0.0, kFirst, ctx), DomainError);
}

TEST(TransformNumeric, LatticePointsAreExactPowers) {
  const QContext ctx(0.5);
  EXPECT_EQ(lattice_point(-4, 2.0, ctx), 16.0);
  EXPECT_EQ(lattice_point(3, 1.0, ctx), 0.25);
}

TEST(TransformSymbolic, FirstKindTable) {
  for (double q : {0.3, 0.5, 0.8}) {
    const QContext ctx(q);
    for (double s : {0.7, 1.0, 2.5}) {
      EXPECT_LT(rel(symbolic("sin_q(2*t)", s, kFirst, ctx), 2.0 / (s * s + 4.0)), 1e-13);
      EXPECT_LT(rel(symbolic("cos_q(2*t)", s, kFirst, ctx), s / (s * s + 4.0)), 1e-13);
      EXPECT_LT(rel(symbolic("1 + 5*t", s, kFirst, ctx), 1.0 / s + 5.0 / (s * s)), 1e-13);
      EXPECT_LT(rel(symbolic("e_q(-3*t)", s, kFirst, ctx), 1.0 / (s + 3.0)), 1e-13);
      EXPECT_LT(rel(symbolic("t^3", s, kFirst, ctx), fact_q(3, q) / std::pow(s, 4)), 1e-13);
    }
  }
}

TEST(TransformSymbolic, ProductExamples) {
  const QContext ctx(0.5);
  EXPECT_NEAR(symbolic("t*e_q(-1*t)", 1.0, kFirst, ctx), 1.0 / 3.0, 1e-12);
  // Outside the recorded validity the lattice still meets the zeros of E_q,
  // so the closed form and the sum agree here.
  EXPECT_NEAR(symbolic("t*E_q(-1*t)", 1.0, kSecond, ctx), 0.25 / 1.875, 1e-12);
  EXPECT_NEAR(numeric("t*E_q(-1*t)", 1.0, kSecond, ctx), 0.25 / 1.875, 1e-12);
}

TEST(TransformSymbolic, TableAgreesWithLatticeSum) {
  const std::vector<std::string> first = {"1", "t", "t^3", "e_q(-0.5*t)", "e_q(0.4*t)", "cos_q(2*t)",
                                          "sin_q(0.5*t)", "cosh_q(0.5*t)", "sinh_q(0.5*t)", "t^2*e_q(-1*t)"};
  const std::vector<std::string> second = {"1", "t^2", "Cos_q(0.5*t)", "Sin_q(1*t)", "t*E_q(-1*t)"};
  for (double q : {0.3, 0.5, 0.8}) {
    const QContext ctx(q, 1e-12);
    for (double s : {0.7, 1.0, 2.5}) {
      for (const auto* list : {&first, &second}) {
        const auto kind = list == &first ? kFirst : kSecond;
        for (const auto& text : *list) {
          const auto F = transform_symbolic(parse_expr(text), kind, ctx);
          if (!valid_at(F, s, ctx)) continue;
          EXPECT_LT(rel(numeric(text, s, kind, ctx), evaluate(F, s, ctx)), 1e-7)
              << text << " q=" << q << " s=" << s << " " << kind_name(kind);
        }
      }
    }
  }
}

TEST(TransformSymbolic, SecondKindExpIsAsymptotic) {
  const QContext ctx(0.5);
  const auto F = transform_symbolic(parse_expr("e_q(0.5*t)"), kSecond, ctx);
  EXPECT_TRUE(F.has_asymptotic());
  EXPECT_THROW(evaluate(F, 2.0, ctx), AsymptoticSeriesError);
  const auto mags = term_log_magnitudes(F.series.front(), 2.0, 30);
  EXPECT_GT(mags.back(), mags[10]);
}

TEST(TransformSymbolic, NonIntegerPowerOnLattice) {
  for (double q : {0.3, 0.5, 0.8}) {
    const QContext ctx(q, 1e-12);
    for (double alpha : {-0.5, 0.5})
      for (int k = -2; k <= 1; ++k) {
        const double s = std::pow(q, k);
        const auto r = transform_numeric(TimeExpr(make_atom(1.0, alpha)), s, kFirst, ctx);
        EXPECT_LT(rel(r.value * std::pow(s, alpha + 1.0), q_gamma_jackson(alpha + 1.0, ctx)), 1e-7);
      }
  }
}

TEST(TransformSymbolic, HeavisideOnLattice) {
  const QContext ctx(0.5, 1e-12);
  const double a = 4.0;  // q^{-2}
  for (double s : {0.5, 1.0, 2.0}) {
    double expected = 1.0 / s;
    for (int k = 0; k < 200; ++k) expected *= 1.0 - (1.0 - 0.5) * 0.5 * a * s * std::pow(0.5, k);
    const auto r = transform_numeric(TimeExpr(make_atom(1.0, 0.0, Base::Heaviside, a)), s, kFirst, ctx);
    EXPECT_NEAR(r.value, expected, 1e-7 * std::max(1.0, std::abs(expected)));
  }
}

TEST(TransformSymbolic, Linearity) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const std::vector<std::string> atoms = {"t", "t^2", "e_q(-1*t)", "sin_q(0.5*t)", "cos_q(0.5*t)"};
  const QContext ctx(0.5, 1e-13);
  for (int trial = 0; trial < 10; ++trial) {
    const auto& f = atoms[rng() % atoms.size()];
    const auto& g = atoms[rng() % atoms.size()];
    const double a = u(rng), b = u(rng), s = 1.5;
    const TimeExpr h = a * parse_expr(f) + b * parse_expr(g);
    const double lhs = transform_numeric(h, s, kFirst, ctx).value;
    const double rhs = a * numeric(f, s, kFirst, ctx) + b * numeric(g, s, kFirst, ctx);
    EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(DerivativeRule, Examples) {
  const QContext ctx(0.5);
  const auto F = transform_symbolic(parse_expr("t^3"), kFirst, ctx);
  const auto G = derivative_rule(F, {0.0}, 1, kFirst, ctx);
  // D_q t^3 = [3] t^2, so the transform is [3][2]!/s^3.
  for (double s : {0.7, 2.0}) EXPECT_LT(rel(evaluate(G, s, ctx), 1.75 * 1.5 / std::pow(s, 3)), 1e-13);

  const auto C = derivative_rule(transform_symbolic(parse_expr("3"), kFirst, ctx), {3.0}, 1, kFirst, ctx);
  EXPECT_NEAR(evaluate(C, 1.3, ctx), 0.0, 1e-14);

  const auto E = derivative_rule(transform_symbolic(parse_expr("e_q(-1*t)"), kFirst, ctx), {1.0, -1.0}, 2,
                                 kFirst, ctx);
  EXPECT_LT(rel(evaluate(E, 1.0, ctx), 1.0 / 2.0), 1e-13);
  EXPECT_THROW(derivative_rule(F, {}, 1, kFirst, ctx), ArityError);
}

TEST(DerivativeRule, AgainstNumericTransformOfDerivative) {
  for (auto kind : {kFirst, kSecond}) {
    const QContext ctx(0.5, 1e-13);
    for (const std::string text : {"t^3", "e_q(-1*t)", "sin_q(1*t)"}) {
      const auto f = parse_expr(text);
      if (kind == kSecond && text != "t^3") continue;
      for (unsigned n = 1; n <= 3; ++n) {
        const auto dn = q_derivative(f, n, ctx);
        const auto init = initial_values(f, n, ctx);
        const double s = 2.5;
        const double lhs = transform_numeric(dn, s, kind, ctx).value;
        auto Fs = [&](double x) { return transform_numeric(f, x, kind, ctx).value; };
        const double rhs = derivative_rule_numeric(Fs, init, n, s, kind, ctx);
        EXPECT_NEAR(lhs, rhs, 1e-7 * std::max(1.0, std::abs(rhs))) << text << " n=" << n;
      }
    }
  }
}

TEST(TMultiplication, Examples) {
  const QContext ctx(0.5);
  auto inv = [](double s) { return 1.0 / s; };
  EXPECT_LT(rel(t_multiplication_rule(inv, 1, 1.7, kFirst, ctx), 1.0 / (1.7 * 1.7)), 1e-12);
  EXPECT_LT(rel(t_multiplication_rule(inv, 1, 1.7, kSecond, ctx), 2.0 / (1.7 * 1.7)), 1e-12);
  EXPECT_EQ(t_multiplication_rule(inv, 0, 1.7, kFirst, ctx), 1.0 / 1.7);
}

TEST(TMultiplication, MatchesNumericTransform) {
  for (auto kind : {kFirst, kSecond}) {
    for (double q : {0.3, 0.5, 0.8}) {
      const QContext ctx(q, 1e-13);
      for (const std::string text : {"1", "e_q(-1*t)"}) {
        if (kind == kSecond && text != "1") continue;
        const auto f = parse_expr(text);
        auto Fs = [&](double x) { return transform_numeric(f, x, kind, ctx).value; };
        for (unsigned n = 1; n <= 2; ++n) {
          TimeExpr tn = f;
          for (auto& a : tn.atoms) a.t_power += n;
          const double s = 2.0;
          EXPECT_LT(rel(t_multiplication_rule(Fs, n, s, kind, ctx), transform_numeric(tn, s, kind, ctx).value),
                    1e-7)
              << text << " n=" << n << " q=" << q;
        }
      }
    }
  }
}

TEST(EqMultiplication, Examples) {
  const QContext ctx(0.5);
  EXPECT_LT(rel(eq_multiplication_rule([](double s) { return 1.0 / s; }, -0.5, 2.0, kFirst, ctx), 0.4), 1e-9);
  EXPECT_LT(rel(eq_multiplication_rule([](double s) { return 1.0 / (s * s); }, -0.5, 2.0, kFirst, ctx),
                2.0 / (2.5 * 4.5)),
            1e-9);
  EXPECT_EQ(eq_multiplication_rule([](double s) { return 1.0 / s; }, 0.0, 2.0, kFirst, ctx), 0.5);
}

TEST(Convolution, ProductOfTransforms) {
  for (double q : {0.3, 0.5, 0.8}) {
    const QContext ctx(q, 1e-13);
    for (const std::string text : {"t", "t^2 + t"})
      for (double beta : {1.0, 2.0})
        for (double s : {1.0, 2.0}) {
          const auto f = parse_expr(text);
          const double lhs = transform_numeric(TimeExpr(make_fractional(1.0, beta, f)), s, kFirst, ctx).value;
          const double rhs = evaluate(convolution_rule(f, beta, kFirst, ctx), s, ctx);
          EXPECT_LT(rel(lhs, rhs), 1e-7) << text << " beta=" << beta << " q=" << q;
        }
  }
}

TEST(Convolution, IntegralOfSine) {
  const QContext ctx(0.5);
  for (double s : {1.5, 3.0}) {
    const double ss = s * s;
    EXPECT_LT(rel(evaluate(convolution_rule(parse_expr("sin_q(1*t)"), 1.0, kFirst, ctx), s, ctx), 1.0 / (s * (ss + 1))),
              1e-12);
    EXPECT_LT(rel(evaluate(convolution_rule(parse_expr("1 - cos_q(1*t)"), 1.0, kFirst, ctx), s, ctx),
                  1.0 / (ss * (ss + 1))),
              1e-12);
    EXPECT_LT(rel(evaluate(convolution_rule(parse_expr("t - sin_q(1*t)"), 1.0, kFirst, ctx), s, ctx),
                  1.0 / (ss * s * (ss + 1))),
              1e-12);
  }
  EXPECT_THROW(convolution_rule(parse_expr("t"), 1.0, kSecond, ctx), UnsupportedAtom);
}

TEST(ClassicalLimit, PowersApproachFactorials) {
  const QContext ctx(0.999, 1e-10);
  for (int n = 0; n <= 4; ++n) {
    const double s = 1.0;
    const auto r = transform_numeric(TimeExpr(make_atom(1.0, n)), s, kFirst, ctx);
    EXPECT_NEAR(r.value / std::tgamma(n + 1.0), 1.0, 0.01) << "n=" << n;
  }
}

TEST(GrowthCheck, Examples) {
  const QContext ctx(0.5);
  EXPECT_TRUE(growth_check([](double t) { return t * t; }, {1.0, 3.0, 1.0}, ctx).ok);
  EXPECT_TRUE(growth_check([&](double t) { return sin_q(t, ctx).value; }, {0.0, 2.0, 1.0}, ctx).ok);
  const auto near = growth_check([&](double t) { return detail::checked(eq_exp(2.0 * t, ctx), t); },
                                 {1.0, 1.0, 0.5}, ctx);
  EXPECT_FALSE(near.ok);
  EXPECT_FALSE(growth_check([](double t) { return std::exp(2.0 * t); }, {1.0, 1.0, 1.0}, ctx).ok);
}
