#pragma once

/**
 * @file verify.hpp
 * @brief Property grids comparing closed forms with the lattice oracle.
 *        Used by `qlaplace verify`.
 */

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qcalc.hpp"
#include "qcore.hpp"
#include "qexpr.hpp"
#include "qlaplace.hpp"
#include "qspecial.hpp"
#include "sexpr.hpp"
#include "time_expr.hpp"

namespace qlap {

struct CheckRecord {
  std::string description;
  double expected = 0.0;
  double actual = 0.0;
  double rel_err = 0.0;
  double tol = 0.0;
  bool pass = false;
};

/// |a - e| / |e|, with absolute differences below 1e-14 counted as zero.
inline double relative_error(double actual, double expected) {
  const double diff = std::abs(actual - expected);
  if (diff <= 1e-14) return 0.0;
  if (!std::isfinite(diff)) return std::numeric_limits<double>::infinity();
  return expected == 0.0 ? std::numeric_limits<double>::infinity() : diff / std::abs(expected);
}

inline constexpr unsigned kVerifySeed = 20240611;

class Checker {
 public:
  explicit Checker(std::optional<double> tol_override) : override_(tol_override) {}

  void check(std::string description, double expected, double actual, double tol) {
    CheckRecord r;
    r.description = std::move(description);
    r.expected = expected;
    r.actual = actual;
    r.tol = override_.value_or(tol);
    r.rel_err = relative_error(actual, expected);
    r.pass = r.rel_err <= r.tol;
    records_.push_back(std::move(r));
  }

  /// Runs `body`; an exception becomes a failed record.
  void guarded(const std::string& description, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      CheckRecord r;
      r.description = description + ": " + e.what();
      r.expected = 0.0;
      r.actual = std::numeric_limits<double>::quiet_NaN();
      r.rel_err = std::numeric_limits<double>::infinity();
      r.tol = override_.value_or(0.0);
      records_.push_back(std::move(r));
    }
  }

  std::vector<CheckRecord>& records() { return records_; }

 private:
  std::optional<double> override_;
  std::vector<CheckRecord> records_;
};

namespace detail {

inline std::string at_q(double q) { return " [q=" + format_number(q) + "]"; }
inline std::string at_qs(double q, double s) {
  return " [q=" + format_number(q) + ", s=" + format_number(s) + "]";
}

inline void verify_core(Checker& c, const std::vector<double>& qs) {
  std::mt19937 rng(kVerifySeed);
  std::uniform_real_distribution<double> u03(0.0, 3.0), ux(-0.5, 0.5), uxy(-2.0, 2.0);
  for (double q : qs) {
    const QContext ctx(q);
    for (unsigned n = 1; n <= 30; n += 29)
      c.check("[n]! = [n][n-1]!, n=" + std::to_string(n) + at_q(q),
              q_bracket(n, ctx) * q_factorial(n - 1, ctx), q_factorial(n, ctx), 1e-14);
    for (unsigned n = 2; n <= 12; n += 5)
      for (unsigned k = 1; k < n; k += 2)
        c.check("Gaussian Pascal rule C(" + std::to_string(n) + "," + std::to_string(k) + ")" + at_q(q),
                q_binomial_coef(n - 1, k - 1, ctx) + std::pow(q, k) * q_binomial_coef(n - 1, k, ctx),
                q_binomial_coef(n, k, ctx), 1e-12);
    for (int i = 0; i < 5; ++i) {
      const double s = u03(rng), t = u03(rng), x = ux(rng);
      c.check("addition law s=" + format_number(s) + " t=" + format_number(t) + at_q(q),
              q_power_real(x, s, ctx) * q_power_real(std::pow(q, s) * x, t, ctx), q_power_real(x, s + t, ctx),
              1e-9);
    }
    for (unsigned n : {3u, 10u}) {
      const double x = uxy(rng), y = uxy(rng);
      c.check("q-binomial theorem n=" + std::to_string(n) + at_q(q), q_binomial_power(x, y, n, ctx),
              q_binomial_expansion(x, y, n, ctx), 1e-11);
    }
    for (double r : {-0.6, 0.2, 0.6}) {
      const double z = r / (1.0 - q);
      c.check("e_q series = product at z=" + format_number(z) + at_q(q),
              eq_exp(z, ctx, Force::Product).value, eq_exp(z, ctx, Force::Series).value, 1e-9);
      c.check("E_q series = product at z=" + format_number(z) + at_q(q),
              Eq_exp(z, ctx, Force::Product).value, Eq_exp(z, ctx, Force::Series).value, 1e-9);
    }
    for (unsigned k = 1; k <= 5; k += 2) {
      const double st = 0.7;
      double den = 1.0;
      for (unsigned j = 0; j < k; ++j) den *= 1.0 + (q - 1.0) * std::pow(q, j) * st;
      c.check("kernel functional equation k=" + std::to_string(k) + at_q(q), Eq_exp(-st, ctx).value / den,
              Eq_exp(-std::pow(q, k) * st, ctx).value, 1e-9);
    }
    const char* fs[] = {"t^3", "e_q(0.3*t)", "sin_q(0.5*t)"};
    for (const char* text : fs) {
      const TimeExpr f = parse_expr(text);
      const TimeExpr df = q_derivative(f, ctx);
      for (double x : {0.5, 2.0}) {
        const double lhs = jackson_integral([&](double t) { return evaluate(df, t, ctx); }, x, ctx).value;
        c.check(std::string("fundamental theorem f=") + text + " x=" + format_number(x) + at_q(q),
                evaluate(f, x, ctx) - evaluate(f, 0.0, ctx), lhs, 1e-9);
      }
    }
    {
      auto f = [](double t) { return 1.0 + 2.0 * t - t * t * t; };
      auto g = [](double t) { return 3.0 - t + 0.5 * t * t; };
      auto fg = [&](double t) { return f(t) * g(t); };
      const double x = 1.3;
      c.check("product rule" + at_q(q),
              q_derivative(f, x, ctx) * g(x) + f(q * x) * q_derivative(g, x, ctx), q_derivative(fg, x, ctx),
              1e-12);
    }
    for (unsigned n = 0; n <= 10; n += 5)
      c.check("Gamma_q(" + std::to_string(n + 1) + ") = [" + std::to_string(n) + "]!" + at_q(q),
              q_factorial(n, ctx), q_gamma_first(n + 1.0, ctx), 1e-9);
    for (unsigned n = 1; n <= 8; n += 3)
      c.check("gamma_q(" + std::to_string(n) + ") = q^{-C(n,2)} Gamma_q" + at_q(q),
              q_pow_binom2(1.0 / q, n) * q_factorial(n - 1, ctx), q_gamma_second(n, ctx), 1e-8);
    for (int t = 1; t <= 5; t += 2)
      for (int s = 1; s <= 5; s += 2)
        c.check("B_q(" + std::to_string(t) + "," + std::to_string(s) + ") gamma ratio" + at_q(q),
                q_factorial(t - 1, ctx) * q_factorial(s - 1, ctx) / q_factorial(t + s - 1, ctx), q_beta(t, s, ctx),
                1e-8);
  }
}

/// Symbolic vs numeric transform of each text at every s of the grid that is
/// inside the closed form's validity region.
inline void table_grid(Checker& c, const std::vector<std::string>& texts, TransformKind kind, double q,
                       const std::vector<double>& svals, double tol) {
  const QContext ctx(q);
  for (const auto& text : texts) {
    const TimeExpr f = parse_expr(text);
    const SExpr F = transform_symbolic(f, kind, ctx);
    for (double s : svals) {
      if (!valid_at(F, s, ctx)) continue;
      const std::string d = std::string(kind_name(kind)) + "-kind L(" + text + ")" + at_qs(q, s);
      c.guarded(d, [&] { c.check(d, evaluate(F, s, ctx), transform_numeric(f, s, kind, ctx).value, tol); });
    }
  }
}

inline const std::vector<double>& default_s() {
  static const std::vector<double> s{0.7, 1.0, 2.5};
  return s;
}

inline void verify_first(Checker& c, const std::vector<double>& qs) {
  std::vector<std::string> texts;
  for (int n = 0; n <= 6; ++n) texts.push_back(n == 0 ? "1" : "t^" + std::to_string(n));
  for (const char* a : {"-3", "-0.5", "0.4"}) texts.push_back(std::string("e_q(") + a + "*t)");
  for (const char* a : {"0.5", "2"}) {
    texts.push_back(std::string("cos_q(") + a + "*t)");
    texts.push_back(std::string("sin_q(") + a + "*t)");
  }
  texts.push_back("cosh_q(0.5*t)");
  texts.push_back("sinh_q(0.5*t)");
  for (double q : qs) {
    table_grid(c, texts, TransformKind::First, q, default_s(), 1e-7);
    const QContext ctx(q);
    for (double s : default_s()) {
      // Steps placed on the lattice of s.
      for (int m = 0; m <= 3; ++m) {
        const double a = lattice_point(m, s, ctx);
        table_grid(c, {"u(t-" + format_number(a) + ")"}, TransformKind::First, q, {s}, 1e-7);
      }
    }
    for (double alpha : {-0.5, 0.5})
      for (int k = -2; k <= 1; ++k) {
        const double s = std::pow(q, k);
        const std::string d = "L(t^" + format_number(alpha) + ") s^(alpha+1) = Gamma_q" + at_qs(q, s);
        c.guarded(d, [&] {
          const TimeExpr f(make_atom(1.0, alpha));
          c.check(d, q_gamma_first(alpha + 1.0, ctx),
                  transform_numeric(f, s, TransformKind::First, ctx).value * std::pow(s, alpha + 1.0), 1e-7);
        });
      }
  }
}

inline void verify_second(Checker& c, const std::vector<double>& qs) {
  std::vector<std::string> texts;
  for (int n = 0; n <= 6; ++n) texts.push_back(n == 0 ? "1" : "t^" + std::to_string(n));
  for (const char* a : {"0.5", "1"}) {
    texts.push_back(std::string("Cos_q(") + a + "*t)");
    texts.push_back(std::string("Sin_q(") + a + "*t)");
  }
  for (double q : qs) {
    table_grid(c, texts, TransformKind::Second, q, default_s(), 1e-7);
    for (double s : default_s()) {
      // |a| = qs/2 keeps the closed form well inside qs > |a|.
      for (double sign : {-1.0, 1.0}) {
        const double a = sign * q * s / 2.0;
        table_grid(c, {"E_q(" + format_number(a) + "*t)"}, TransformKind::Second, q, {s}, 1e-7);
      }
    }
    table_grid(c, {"t*E_q(-1*t)", "t^2*E_q(0.1*t)"}, TransformKind::Second, q, default_s(), 1e-7);
  }
}

inline void verify_theorems(Checker& c, const std::vector<double>& qs) {
  for (double q : qs) {
    const QContext ctx(q);
    for (TransformKind kind : {TransformKind::First, TransformKind::Second}) {
      const char* fs[] = {"t^3", "e_q(-1*t)", "sin_q(1*t)"};
      for (const char* text : fs) {
        const TimeExpr f = parse_expr(text);
        for (unsigned n = 1; n <= 3; ++n)
          for (double s : {1.0, 2.5}) {
            const std::string d = std::string(kind_name(kind)) + "-kind derivative rule n=" + std::to_string(n) +
                                  " f=" + text + at_qs(q, s);
            c.guarded(d, [&] {
              auto F = [&](double x) { return transform_numeric(f, x, kind, ctx).value; };
              const TimeExpr df = q_derivative(f, n, ctx);
              c.check(d, derivative_rule_numeric(F, initial_values(f, n, ctx), n, s, kind, ctx),
                      transform_numeric(df, s, kind, ctx).value, 1e-7);
            });
          }
      }
      for (const char* text : {"1", "e_q(-1*t)"}) {
        const TimeExpr f = parse_expr(text);
        for (unsigned n = 0; n <= 2; ++n)
          for (double s : {1.0, 2.5}) {
            const std::string d = std::string(kind_name(kind)) + "-kind t^" + std::to_string(n) +
                                  " multiplication f=" + text + at_qs(q, s);
            c.guarded(d, [&] {
              auto F = [&](double x) { return transform_numeric(f, x, kind, ctx).value; };
              TimeExpr tf = f;
              for (auto& a : tf.atoms) a.t_power += n;
              c.check(d, t_multiplication_rule(F, n, s, kind, ctx), transform_numeric(tf, s, kind, ctx).value,
                      1e-7);
            });
          }
      }
    }
    // The multiplication series converge geometrically with ratio |a|/s
    // (e_q, first kind) and |a|/(q^2 s) (E_q, second kind); high-order
    // q-differences run out of precision near ratio 1, so the grid keeps
    // the ratio at 1/4 and 1/8.
    const double a = -0.5;
    for (double r : {4.0, 8.0}) {
      const double s1 = r * std::abs(a);
      const std::string d = "e_q(-0.5 t) multiplication of t, first kind" + at_qs(q, s1);
      c.guarded(d, [&] {
        auto F = [](double x) { return 1.0 / (x * x); };
        const TimeExpr g = parse_expr("t*e_q(-0.5*t)");
        c.check(d, eq_multiplication_rule(F, a, s1, TransformKind::First, ctx),
                transform_numeric(g, s1, TransformKind::First, ctx).value, 1e-7);
      });
      const double s2 = r * std::abs(a) / (q * q);
      const std::string d2 = "E_q(-0.5 t) multiplication of t, second kind" + at_qs(q, s2);
      c.guarded(d2, [&] {
        auto F = [q](double x) { return 1.0 / (q * x * x); };
        const TimeExpr g = parse_expr("t*E_q(-0.5*t)");
        c.check(d2, Eq_multiplication_rule(F, a, s2, TransformKind::Second, ctx),
                transform_numeric(g, s2, TransformKind::Second, ctx).value, 1e-7);
      });
    }
    for (const char* text : {"t", "t^2 + t"})
      for (double beta : {1.0, 2.0})
        for (double s : {1.0, 2.5}) {
          const std::string d = std::string("convolution f=") + text + " beta=" + format_number(beta) + at_qs(q, s);
          c.guarded(d, [&] {
            const TimeExpr f = parse_expr(text);
            const TimeExpr conv(make_fractional(1.0, beta, f));
            c.check(d, evaluate(convolution_rule(f, beta, TransformKind::First, ctx), s, ctx),
                    transform_numeric(conv, s, TransformKind::First, ctx).value, 1e-7);
          });
        }
    for (double s : {1.0, 2.0}) {
      const std::string d1 = "L(1 - cos_q t convolved with 1) = 1/(s^2(s^2+1))" + at_qs(q, s);
      c.guarded(d1, [&] {
        const TimeExpr f = parse_expr("1 - cos_q(1*t)");
        c.check(d1, 1.0 / (s * s * (s * s + 1.0)),
                transform_numeric(TimeExpr(make_fractional(1.0, 1.0, f)), s, TransformKind::First, ctx).value, 1e-6);
      });
      const std::string d2 = "L(t - sin_q t convolved with 1) = 1/(s^3(s^2+1))" + at_qs(q, s);
      c.guarded(d2, [&] {
        const TimeExpr f = parse_expr("t - sin_q(1*t)");
        c.check(d2, 1.0 / (s * s * s * (s * s + 1.0)),
                transform_numeric(TimeExpr(make_fractional(1.0, 1.0, f)), s, TransformKind::First, ctx).value, 1e-6);
      });
    }
    {
      std::mt19937 rng(kVerifySeed);
      const char* atoms[] = {"t^2", "e_q(-1*t)", "cos_q(0.5*t)", "sin_q(0.5*t)", "t"};
      std::uniform_int_distribution<int> pick(0, 4);
      for (int i = 0; i < 3; ++i) {
        const std::string f = atoms[pick(rng)], g = atoms[pick(rng)];
        const double s = 1.0;
        const std::string d = "linearity 2*" + f + " + 3*" + g + at_qs(q, s);
        c.guarded(d, [&] {
          const TimeExpr fe = parse_expr(f), ge = parse_expr(g);
          const double F = transform_numeric(fe, s, TransformKind::First, ctx).value;
          const double G = transform_numeric(ge, s, TransformKind::First, ctx).value;
          c.check(d, 2.0 * F + 3.0 * G,
                  transform_numeric(2.0 * fe + 3.0 * ge, s, TransformKind::First, ctx).value, 1e-9);
        });
      }
    }
  }
  const QContext near1(0.999, 1e-10);
  for (unsigned n = 0; n <= 4; ++n)
    for (double s : {1.0, 2.0}) {
      const std::string d = "classical limit L(t^" + std::to_string(n) + ")" + at_qs(0.999, s);
      c.guarded(d, [&] {
        const double fact = std::tgamma(n + 1.0);
        c.check(d, fact / std::pow(s, n + 1.0),
                transform_numeric(TimeExpr(make_atom(1.0, n)), s, TransformKind::First, near1).value, 1e-2);
      });
    }
}

}  // namespace detail

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"core", "first", "second", "theorems", "all"};
  return names;
}

/// Runs one suite (or "all") over the q list; an empty list means {0.3, 0.5, 0.8}.
inline std::vector<CheckRecord> run_suite(const std::string& suite, std::vector<double> qs,
                                          std::optional<double> tol_override = std::nullopt) {
  if (qs.empty()) qs = {0.3, 0.5, 0.8};
  Checker c(tol_override);
  const bool all = suite == "all";
  bool known = all;
  if (all || suite == "core") {
    detail::verify_core(c, qs);
    known = true;
  }
  if (all || suite == "first") {
    detail::verify_first(c, qs);
    known = true;
  }
  if (all || suite == "second") {
    detail::verify_second(c, qs);
    known = true;
  }
  if (all || suite == "theorems") {
    detail::verify_theorems(c, qs);
    known = true;
  }
  if (!known) throw DomainError("unknown suite '" + suite + "'");
  return std::move(c.records());
}

}  // namespace qlap
