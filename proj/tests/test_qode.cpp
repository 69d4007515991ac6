#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "qlap/qexpr.hpp"
#include "qlap/qode.hpp"

using namespace qlap;

namespace {

double eq_product(double z, double q) {
  double p = 1.0;
  for (int k = 0; k < 400; ++k) p *= 1.0 - (1.0 - q) * z * std::pow(q, k);
  return 1.0 / p;
}

double dq(const std::function<double(double)>& f, double t, double q) {
  return (f(t) - f(q * t)) / ((1.0 - q) * t);
}

}  // namespace

TEST(SolveLinearQode, ExponentialDecay) {
  const QContext ctx(0.5);
  const auto sol = solve_linear_qode(1, {-3.0}, TimeExpr{}, {1.0}, ctx);
  EXPECT_EQ(print(sol.y), print(parse_expr("e_q(-3*t)")));
  for (double t : {0.1, 0.5, 1.0, 3.0}) EXPECT_NEAR(evaluate(sol.y, t, ctx), eq_product(-3.0 * t, 0.5), 1e-13);
  EXPECT_LE(sol.max_residual, 1e-8);
  EXPECT_EQ(sol.trace.size(), 4u);
}

TEST(SolveLinearQode, Sine) {
  const QContext ctx(0.5);
  const auto sol = solve_linear_qode(2, {-4.0, 0.0}, TimeExpr{}, {0.0, 2.0}, ctx);
  EXPECT_EQ(print(sol.y), print(parse_expr("sin_q(2*t)")));
  EXPECT_LE(sol.max_residual, 1e-8);
  // Independent residual: D^2 y + 4 y at a few lattice points.
  auto y = [&](double t) { return evaluate(sol.y, t, ctx); };
  auto dy = [&](double t) { return dq(y, t, 0.5); };
  for (double t : {0.25, 1.0, 2.0}) EXPECT_NEAR(dq(dy, t, 0.5) + 4.0 * y(t), 0.0, 1e-10);
}

TEST(SolveLinearQode, Constant) {
  const QContext ctx(0.5);
  const auto sol = solve_linear_qode(1, {0.0}, TimeExpr{}, {2.5}, ctx);
  for (double t : {0.0, 1.0, 7.0}) EXPECT_NEAR(evaluate(sol.y, t, ctx), 2.5, 1e-14);
}

TEST(SolveLinearQode, HyperbolicPair) {
  const QContext ctx(0.5);
  const auto sol = solve_linear_qode(2, {4.0, 0.0}, TimeExpr{}, {1.0, 0.0}, ctx);
  EXPECT_EQ(print(sol.y), print(parse_expr("cosh_q(2*t)")));
  EXPECT_LE(sol.max_residual, 1e-8);
}

TEST(SolveLinearQode, ForcedFirstOrder) {
  // D y = y + sin_q(2t), y(0) = 0.
  const QContext ctx(0.5);
  const auto sol = solve_linear_qode(1, {1.0}, parse_expr("sin_q(2*t)"), {0.0}, ctx);
  EXPECT_LE(sol.max_residual, 1e-8);
  auto y = [&](double t) { return evaluate(sol.y, t, ctx); };
  for (double t : {0.25, 0.5, 1.5})
    EXPECT_NEAR(dq(y, t, 0.5), y(t) + sin_q(2.0 * t, ctx).value, 1e-10);
  EXPECT_NEAR(y(0.0), 0.0, 1e-14);
}

TEST(SolveLinearQode, ForcedSecondOrder) {
  const QContext ctx(0.8);
  const auto sol = solve_linear_qode(2, {-3.0, -4.0}, parse_expr("2*t"), {1.0, 0.0}, ctx);
  EXPECT_LE(sol.max_residual, 1e-8);
}

TEST(SolveLinearQode, Rejections) {
  const QContext ctx(0.5);
  // Repeated root: rhs shares the root of p.
  EXPECT_THROW(solve_linear_qode(1, {-3.0}, parse_expr("e_q(-3*t)"), {1.0}, ctx), NoInversionPattern);
  // Damped oscillation s^2 + 2s + 2.
  EXPECT_THROW(solve_linear_qode(2, {-2.0, -2.0}, TimeExpr{}, {1.0, 0.0}, ctx), NoInversionPattern);
  EXPECT_THROW(solve_linear_qode(3, {0, 0, 0}, TimeExpr{}, {0, 0, 0}, ctx), DomainError);
  EXPECT_THROW(solve_linear_qode(2, {1.0}, TimeExpr{}, {0, 0}, ctx), ArityError);
  EXPECT_THROW(solve_linear_qode(1, {1.0}, TimeExpr{}, {0, 0}, ctx), ArityError);
}
