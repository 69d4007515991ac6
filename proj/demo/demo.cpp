// Walk-through of the library: special functions, transforms of both kinds,
// one derivative rule and a q-ODE solved end to end.

#include <cstdio>

#include "qlap/qexpr.hpp"
#include "qlap/qlaplace.hpp"
#include "qlap/qode.hpp"

using namespace qlap;

int main() {
  const QContext ctx(0.5, 1e-12);

  std::printf("q = %g\n", ctx.q());
  std::printf("e_q(-1) = %.10f   E_q(-1) = %.10f\n", eq_exp(-1.0, ctx).value, Eq_exp(-1.0, ctx).value);
  std::printf("sin_q(0.1) = %.10f   Gamma_q(4) = %.10f\n\n", sin_q(0.1, ctx).value, q_gamma_first(4.0, ctx));

  for (const char* text : {"sin_q(2*t)", "1 + 5*t", "t*e_q(-1*t)"}) {
    const TimeExpr f = parse_expr(text);
    const SExpr F = transform_symbolic(f, TransformKind::First, ctx);
    const LatticeSum L = transform_numeric(f, 1.0, TransformKind::First, ctx);
    std::printf("L_first(%s) = %s\n", print(f).c_str(), print(F).c_str());
    std::printf("  at s = 1: closed form %.12f, lattice sum %.12f\n", evaluate(F, 1.0, ctx), L.value);
  }

  const TimeExpr t2 = parse_expr("t^2");
  const SExpr G = transform_symbolic(t2, TransformKind::Second, ctx);
  std::printf("L_second(t^2) = %s, at s = 1: %.12f\n\n", print(G).c_str(), evaluate(G, 1.0, ctx));

  // L(D_q t^3) = s L(t^3) - 0.
  const SExpr D = derivative_rule(transform_symbolic(parse_expr("t^3"), TransformKind::First, ctx), {0.0}, 1,
                                  TransformKind::First, ctx);
  std::printf("L_first(D_q t^3) = %s\n\n", print(D).c_str());

  const QodeSolution sol = solve_linear_qode(2, {-4.0, 0.0}, TimeExpr{}, {0.0, 2.0}, ctx);
  for (const auto& line : sol.trace) std::printf("%s\n", line.c_str());
  std::printf("max residual %.3g over %zu lattice points\n", sol.max_residual, sol.check_points.size());
  return sol.max_residual <= 1e-8 ? 0 : 1;
}
