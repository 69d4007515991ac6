#pragma once

/**
 * @file time_expr.hpp
 * @brief Time-domain expressions: sums of coef * t^alpha * base(a t).
 */

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "qcalc.hpp"
#include "qspecial.hpp"

namespace qlap {

enum class Base {
  One,
  EqExp,
  CapEqExp,
  CosQ,
  SinQ,
  CapCosQ,
  CapSinQ,
  CoshQ,
  SinhQ,
  Heaviside,
  FractionalIntegral,
};

struct TimeExpr;

struct Atom {
  double coef = 1.0;
  double t_power = 0.0;
  Base base = Base::One;
  /// `a` of base(a t), or the step location of u(t - a).
  double param = 0.0;
  /// Order of T_q^beta for FractionalIntegral.
  double beta = 0.0;
  std::shared_ptr<const TimeExpr> inner;
};

struct TimeExpr {
  std::vector<Atom> atoms;

  TimeExpr() = default;
  explicit TimeExpr(std::vector<Atom> a) : atoms(std::move(a)) {}
  explicit TimeExpr(Atom a) : atoms{std::move(a)} {}
};

inline Atom make_atom(double coef, double t_power, Base base = Base::One, double param = 0.0) {
  Atom a;
  a.coef = coef;
  a.t_power = t_power;
  a.base = base;
  a.param = param;
  return a;
}

/// T_q^beta applied to `inner`.
inline Atom make_fractional(double coef, double beta, TimeExpr inner) {
  Atom a;
  a.coef = coef;
  a.base = Base::FractionalIntegral;
  a.beta = beta;
  a.inner = std::make_shared<const TimeExpr>(std::move(inner));
  return a;
}

inline TimeExpr operator+(TimeExpr a, const TimeExpr& b) {
  a.atoms.insert(a.atoms.end(), b.atoms.begin(), b.atoms.end());
  return a;
}

inline TimeExpr operator*(double c, TimeExpr e) {
  for (auto& a : e.atoms) a.coef *= c;
  return e;
}

inline const char* base_name(Base b) {
  switch (b) {
    case Base::One: return "1";
    case Base::EqExp: return "e_q";
    case Base::CapEqExp: return "E_q";
    case Base::CosQ: return "cos_q";
    case Base::SinQ: return "sin_q";
    case Base::CapCosQ: return "Cos_q";
    case Base::CapSinQ: return "Sin_q";
    case Base::CoshQ: return "cosh_q";
    case Base::SinhQ: return "sinh_q";
    case Base::Heaviside: return "u";
    case Base::FractionalIntegral: return "T_q";
  }
  return "?";
}

/// True when every atom is c * t^alpha.
inline bool is_power_class(const TimeExpr& e) {
  return std::all_of(e.atoms.begin(), e.atoms.end(), [](const Atom& a) {
    return a.base == Base::One || (a.base == Base::Heaviside && a.param == 0.0);
  });
}

inline std::vector<PowerTerm> power_terms(const TimeExpr& e) {
  std::vector<PowerTerm> out;
  for (const auto& a : e.atoms) {
    if (!(a.base == Base::One || (a.base == Base::Heaviside && a.param == 0.0)))
      throw UnsupportedAtom(std::string("not a power-class atom: ") + base_name(a.base));
    out.push_back({a.coef, a.t_power});
  }
  return out;
}

double evaluate(const TimeExpr& e, double t, const QContext& ctx);

namespace detail {

inline double checked(const EvalResult<double>& r, double t) {
  if (r.near_pole()) throw PoleError("evaluation within 1e-8 of a pole", t);
  return r.value;
}

inline double eval_base(const Atom& a, double t, const QContext& ctx) {
  const double z = a.param * t;
  switch (a.base) {
    case Base::One: return 1.0;
    case Base::EqExp: return checked(eq_exp(z, ctx), t);
    case Base::CapEqExp: return Eq_exp(z, ctx).value;
    case Base::CosQ: return cos_q(z, ctx).value;
    case Base::SinQ: return sin_q(z, ctx).value;
    case Base::CapCosQ: return Cos_q(z, ctx).value;
    case Base::CapSinQ: return Sin_q(z, ctx).value;
    case Base::CoshQ: return checked(cosh_q(z, ctx), t);
    case Base::SinhQ: return checked(sinh_q(z, ctx), t);
    case Base::Heaviside: return heaviside(t, a.param);
    case Base::FractionalIntegral: {
      if (t == 0.0) return 0.0;
      if (is_power_class(*a.inner)) return q_convolution(power_terms(*a.inner), a.beta, t, ctx);
      return fractional_integral([&](double x) { return evaluate(*a.inner, x, ctx); }, a.beta, t,
                                 ctx);
    }
  }
  return 0.0;
}

inline double t_power(double t, double alpha) {
  if (alpha == 0.0) return 1.0;
  return std::pow(t, alpha);
}

}  // namespace detail

inline double evaluate(const Atom& a, double t, const QContext& ctx) {
  if (t < 0.0) throw DomainError("evaluate: t must be nonnegative");
  if (a.coef == 0.0) return 0.0;
  return a.coef * detail::t_power(t, a.t_power) * detail::eval_base(a, t, ctx);
}

/// Sum of the atoms at t. Throws PoleError when an atom is within 1e-8 of a pole.
inline double evaluate(const TimeExpr& e, double t, const QContext& ctx) {
  double sum = 0.0;
  for (const auto& a : e.atoms) sum += evaluate(a, t, ctx);
  return sum;
}

/// evaluate() without overflow: E_q, Cos_q and Sin_q grow like exp(c log^2 t).
inline Scaled<double> evaluate_scaled(const TimeExpr& e, double t, const QContext& ctx) {
  std::vector<Scaled<double>> parts;
  for (const auto& a : e.atoms) {
    if (a.coef == 0.0) continue;
    Scaled<double> p;
    switch (a.base) {
      case Base::CapEqExp: p = Eq_exp_scaled(a.param * t, ctx); break;
      case Base::CapCosQ:
      case Base::CapSinQ: {
        const auto c = Eq_exp_scaled(Complex(0.0, a.param * t), ctx);
        p.mantissa = a.base == Base::CapCosQ ? c.mantissa.real() : c.mantissa.imag();
        p.log_scale = c.log_scale;
        break;
      }
      default: p.mantissa = detail::eval_base(a, t, ctx); break;
    }
    p.mantissa *= a.coef;
    if (a.t_power != 0.0) {
      if (t == 0.0) {
        p.mantissa = 0.0;
      } else {
        p.log_scale += a.t_power * std::log(t);
      }
    }
    p.normalize();
    parts.push_back(p);
  }
  Scaled<double> out;
  out.mantissa = 0.0;
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& p : parts)
    if (p.mantissa != 0.0) top = std::max(top, p.log_scale);
  if (!std::isfinite(top)) return out;
  for (const auto& p : parts)
    if (p.mantissa != 0.0) out.mantissa += p.mantissa * std::exp(p.log_scale - top);
  out.log_scale = top;
  return out;
}

/// Exact Jackson derivative D_q of an expression, atom by atom:
/// D(t^alpha g) = [alpha] t^{alpha-1} g(t) + q^alpha t^alpha (D g)(t).
inline TimeExpr q_derivative(const TimeExpr& e, const QContext& ctx) {
  const double q = ctx.q();
  TimeExpr out;
  for (const auto& a : e.atoms) {
    if (a.coef == 0.0) continue;
    if (a.base == Base::FractionalIntegral) {
      if (a.beta != 1.0 || a.t_power != 0.0)
        throw UnsupportedAtom("q-derivative of T_q^beta is only available for beta = 1");
      for (auto inner : a.inner->atoms) {
        inner.coef *= a.coef;
        out.atoms.push_back(inner);
      }
      continue;
    }
    if (a.base == Base::Heaviside && a.param > 0.0)
      throw UnsupportedAtom("q-derivative of u(t - a) with a > 0");

    if (a.t_power != 0.0) {
      Atom d = a;
      d.coef *= q_bracket(a.t_power, ctx);
      d.t_power -= 1.0;
      out.atoms.push_back(d);
    }
    const double lead = a.coef * std::pow(q, a.t_power) * a.param;
    auto push = [&](Base b, double c, double param) {
      Atom d = a;
      d.base = b;
      d.coef = c;
      d.param = param;
      out.atoms.push_back(d);
    };
    switch (a.base) {
      case Base::One:
      case Base::Heaviside: break;
      case Base::EqExp: push(Base::EqExp, lead, a.param); break;
      case Base::CapEqExp: push(Base::CapEqExp, lead, q * a.param); break;
      case Base::CosQ: push(Base::SinQ, -lead, a.param); break;
      case Base::SinQ: push(Base::CosQ, lead, a.param); break;
      case Base::CapCosQ: push(Base::CapSinQ, -lead, q * a.param); break;
      case Base::CapSinQ: push(Base::CapCosQ, lead, q * a.param); break;
      case Base::CoshQ: push(Base::SinhQ, lead, a.param); break;
      case Base::SinhQ: push(Base::CoshQ, lead, a.param); break;
      case Base::FractionalIntegral: break;
    }
  }
  return out;
}

inline TimeExpr q_derivative(const TimeExpr& e, unsigned n, const QContext& ctx) {
  TimeExpr out = e;
  for (unsigned i = 0; i < n; ++i) out = q_derivative(out, ctx);
  return out;
}

/// Coefficient of t^k in the Maclaurin expansion. Throws DomainError when an
/// atom has a non-integer power.
inline double taylor_coefficient(const TimeExpr& e, unsigned k, const QContext& ctx) {
  const double q = ctx.q();
  double sum = 0.0;
  for (const auto& a : e.atoms) {
    if (a.coef == 0.0) continue;
    if (a.base == Base::FractionalIntegral) {
      if (std::floor(a.beta) != a.beta)
        throw DomainError("non-integer order fractional integral has no Taylor expansion");
      if (k < a.beta) continue;
      const unsigned j = k - static_cast<unsigned>(a.beta);
      sum += a.coef * q_beta(a.beta, j + 1.0, ctx) * taylor_coefficient(*a.inner, j, ctx);
      continue;
    }
    if (std::floor(a.t_power) != a.t_power)
      throw DomainError("non-integer power has no Taylor expansion at 0");
    if (a.t_power > k) continue;
    const unsigned m = k - static_cast<unsigned>(a.t_power);
    const double fact = q_factorial(m, ctx);
    const double am = std::pow(a.param, m);
    const double cap = q_pow_binom2(q, m);
    const double alt = (m / 2) % 2 == 0 ? 1.0 : -1.0;
    double b = 0.0;
    switch (a.base) {
      case Base::One: b = m == 0 ? 1.0 : 0.0; break;
      case Base::Heaviside: b = (a.param == 0.0 && m == 0) ? 1.0 : 0.0; break;
      case Base::EqExp: b = am / fact; break;
      case Base::CapEqExp: b = cap * am / fact; break;
      case Base::CosQ: b = m % 2 == 0 ? alt * am / fact : 0.0; break;
      case Base::SinQ: b = m % 2 == 1 ? alt * am / fact : 0.0; break;
      case Base::CapCosQ: b = m % 2 == 0 ? alt * cap * am / fact : 0.0; break;
      case Base::CapSinQ: b = m % 2 == 1 ? alt * cap * am / fact : 0.0; break;
      case Base::CoshQ: b = m % 2 == 0 ? am / fact : 0.0; break;
      case Base::SinhQ: b = m % 2 == 1 ? am / fact : 0.0; break;
      case Base::FractionalIntegral: break;
    }
    sum += a.coef * b;
  }
  return sum;
}

/// f^{(i)}(0) = [i]_q! c_i for i < n, read off the Maclaurin coefficients.
inline std::vector<double> initial_values(const TimeExpr& e, unsigned n, const QContext& ctx) {
  std::vector<double> out(n);
  for (unsigned i = 0; i < n; ++i) out[i] = q_factorial(i, ctx) * taylor_coefficient(e, i, ctx);
  return out;
}

inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  // Prefer the shortest representation that round-trips.
  for (int p = 1; p <= 17; ++p) {
    char tmp[40];
    std::snprintf(tmp, sizeof tmp, "%.*g", p, x);
    if (std::strtod(tmp, nullptr) == x) return tmp;
  }
  return buf;
}

inline std::string print(const TimeExpr& e);

/// Atom without its sign, in the input grammar.
inline std::string print_magnitude(const Atom& a) {
  std::vector<std::string> parts;
  const double c = std::abs(a.coef);
  const bool bare = a.t_power == 0.0 && a.base == Base::One;
  if (c != 1.0 || bare) parts.push_back(format_number(c));
  if (a.t_power == 1.0)
    parts.push_back("t");
  else if (a.t_power != 0.0)
    parts.push_back("t^" + format_number(a.t_power));
  switch (a.base) {
    case Base::One: break;
    case Base::Heaviside: parts.push_back("u(t-" + format_number(a.param) + ")"); break;
    case Base::FractionalIntegral:
      parts.push_back("T_q^" + format_number(a.beta) + "[" + print(*a.inner) + "]");
      break;
    default:
      parts.push_back(std::string(base_name(a.base)) + "(" + format_number(a.param) + "*t)");
  }
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "*" : "") + parts[i];
  return out;
}

/// Printed in the input grammar, e.g. "1 + 5*t - 2*t^2*e_q(-1*t)".
inline std::string print(const TimeExpr& e) {
  if (e.atoms.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < e.atoms.size(); ++i) {
    const Atom& a = e.atoms[i];
    const bool neg = std::signbit(a.coef);
    if (i == 0)
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    out += print_magnitude(a);
  }
  return out;
}

namespace detail {

inline bool same_shape(const Atom& x, const Atom& y) {
  if (x.t_power != y.t_power || x.base != y.base) return false;
  if (x.base == Base::One) return true;
  if (x.base == Base::FractionalIntegral)
    return x.beta == y.beta && x.inner == y.inner;
  return x.param == y.param;
}

inline bool atom_less(const Atom& x, const Atom& y) {
  if (x.t_power != y.t_power) return x.t_power < y.t_power;
  if (x.base != y.base) return x.base < y.base;
  if (x.param != y.param) return x.param < y.param;
  return x.beta < y.beta;
}

}  // namespace detail

/// Merges like atoms, drops zero coefficients, orders by power then base.
/// u(t - 0) becomes the constant 1 and any base at parameter 0 that is
/// constant (e_q(0 t) = 1) is folded into a power atom.
inline TimeExpr canonicalize(const TimeExpr& e) {
  std::vector<Atom> atoms;
  for (Atom a : e.atoms) {
    if (a.base == Base::Heaviside && a.param == 0.0) a.base = Base::One;
    if (a.param == 0.0) {
      switch (a.base) {
        case Base::EqExp:
        case Base::CapEqExp:
        case Base::CosQ:
        case Base::CapCosQ:
        case Base::CoshQ: a.base = Base::One; break;
        case Base::SinQ:
        case Base::CapSinQ:
        case Base::SinhQ: a.coef = 0.0; break;
        default: break;
      }
    }
    if (a.base == Base::One) a.param = 0.0;
    auto it = std::find_if(atoms.begin(), atoms.end(),
                           [&](const Atom& b) { return detail::same_shape(a, b); });
    if (it == atoms.end())
      atoms.push_back(a);
    else
      it->coef += a.coef;
  }
  atoms.erase(std::remove_if(atoms.begin(), atoms.end(), [](const Atom& a) { return a.coef == 0.0; }),
              atoms.end());
  std::stable_sort(atoms.begin(), atoms.end(), detail::atom_less);
  return TimeExpr(std::move(atoms));
}

}  // namespace qlap
