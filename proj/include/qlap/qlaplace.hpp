#pragma once

/**
 * @file qlaplace.hpp
 * @brief The q-Laplace transforms of the first kind (kernel E_q(-qst)) and
 *        second kind (kernel e_q(-st)): lattice oracle, closed-form table and
 *        the operational rules.
 *
 * Numeric transforms sum over t_n = q^n / ((1-q)s). On this lattice the
 * first-kind kernel is (q^{n+1};q)_inf, which vanishes for n < 0, and the
 * second-kind kernel is 1/(-q^n;q)_inf. The weight (1-q)t_n is q^n/s. Since
 * s -> q^k s maps the lattice onto itself, the s-scaling rules hold exactly.
 */

#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <type_traits>
#include <vector>

#include "qcalc.hpp"
#include "sexpr.hpp"
#include "time_expr.hpp"

namespace qlap {

enum class TransformKind { First, Second };

inline const char* kind_name(TransformKind k) { return k == TransformKind::First ? "first" : "second"; }

/// Lattice point t_n = q^n / ((1-q) s).
inline double lattice_point(long n, double s, const QContext& ctx) {
  return std::pow(ctx.q(), static_cast<double>(n)) / ((1.0 - ctx.q()) * s);
}

namespace detail {

inline Scaled<double> as_scaled(double v) {
  Scaled<double> r;
  r.mantissa = v;
  return r;
}
inline Scaled<double> as_scaled(const Scaled<double>& v) { return v; }

}  // namespace detail

/// Lattice-sum transform of an evaluator returning double or Scaled<double>.
template <class F>
  requires std::invocable<F&, double>
LatticeSum transform_numeric(F&& f, double s, TransformKind kind, const QContext& ctx) {
  if (!(s > 0.0)) throw DomainError("transform_numeric: s must be positive");
  const double lq = std::log(ctx.q());
  const double ls = std::log(s);
  auto weight_term = [&](long n, double log_kernel) {
    const double t = lattice_point(n, s, ctx);
    // Running off the end of the lattice means the sum never settled.
    if (!std::isfinite(t)) return std::numeric_limits<double>::quiet_NaN();
    const Scaled<double> v = detail::as_scaled(f(t));
    if (v.mantissa == 0.0) return 0.0;
    return v.mantissa * std::exp(n * lq - ls + log_kernel + v.log_scale);
  };
  if (kind == TransformKind::First) {
    const LogKernelFirst kernel(ctx.q());
    auto term = [&](long n) { return n < 0 ? 0.0 : weight_term(n, kernel(n)); };
    return detail::lattice_sum(term, false, 1.0, ctx, static_cast<std::size_t>(kernel.ramp()));
  }
  const LogKernelSecond kernel(ctx.q());
  auto term = [&](long n) { return weight_term(n, kernel(n)); };
  return detail::lattice_sum(term, true, 1.0, ctx, static_cast<std::size_t>(kernel.ramp()));
}

inline LatticeSum transform_numeric(const TimeExpr& f, double s, TransformKind kind, const QContext& ctx) {
  return transform_numeric([&](double t) { return evaluate_scaled(f, t, ctx); }, s, kind, ctx);
}

namespace detail {

/// Cached log [k]_q!.
class LogFactorials {
 public:
  explicit LogFactorials(double q) : ctx_(q) {}
  double operator()(unsigned k) {
    while (table_.size() <= k) {
      const double n = static_cast<double>(table_.size());
      table_.push_back(table_.empty() ? 0.0 : table_.back() + std::log(q_bracket(n, ctx_)));
    }
    return table_[k];
  }

 private:
  QContext ctx_;
  std::vector<double> table_;
};

inline bool is_capital(Base b) { return b == Base::CapEqExp || b == Base::CapCosQ || b == Base::CapSinQ; }

/// Series transform of coef * t^n * base(a t), term by term in the Maclaurin
/// coefficients of the base.
inline InvPowerSeries taylor_series_transform(const Atom& atom, TransformKind kind, const QContext& ctx) {
  const unsigned n = static_cast<unsigned>(atom.t_power);
  const double a = atom.param;
  const Base base = atom.base;
  const bool capital = is_capital(base);
  const bool second = kind == TransformKind::Second;
  const double lq = std::log(ctx.q());
  const double la = std::log(std::abs(a));
  auto facts = std::make_shared<LogFactorials>(ctx.q());

  InvPowerSeries p;
  p.coef = atom.coef;
  p.shift = n + 1.0;
  p.asymptotic = second && !capital;
  p.log_coef = [=](unsigned m) -> std::pair<double, int> {
    int parity = -1;  // -1: every m, else only m % 2 == parity
    bool alternating = false;
    switch (base) {
      case Base::CosQ:
      case Base::CapCosQ: parity = 0; alternating = true; break;
      case Base::SinQ:
      case Base::CapSinQ: parity = 1; alternating = true; break;
      case Base::CoshQ: parity = 0; break;
      case Base::SinhQ: parity = 1; break;
      default: break;
    }
    if (parity >= 0 && static_cast<int>(m % 2) != parity) return {0.0, 0};
    if (a == 0.0 && m > 0) return {0.0, 0};
    int sign = (a < 0 && m % 2 == 1) ? -1 : 1;
    if (alternating && (m / 2) % 2 == 1) sign = -sign;
    double lc = (m > 0 ? m * la : 0.0) + (*facts)(n + m) - (*facts)(m);
    if (capital) lc += 0.5 * m * (m - 1.0) * lq;
    if (second) lc -= 0.5 * (n + m + 1.0) * (n + m) * lq;
    return {lc, sign};
  };
  std::string w = "a^m [n+m]_q!/[m]_q!";
  if (capital) w = "q^C(m,2) " + w;
  if (second) w += " q^-C(n+m+1,2)";
  p.label = w + " restricted to the " + std::string(base_name(base)) + " coefficients (a=" +
            format_number(a) + ", n=" + std::to_string(n) + ")";
  return p;
}

inline bool integer_power(const Atom& a) { return a.t_power >= 0.0 && std::floor(a.t_power) == a.t_power; }

inline SExpr series_sexpr(const Atom& atom, TransformKind kind, double s_min, const QContext& ctx) {
  SExpr e;
  e.series.push_back(taylor_series_transform(atom, kind, ctx));
  e.validity.s_min = s_min;
  return e;
}

SExpr transform_symbolic_atom(const Atom& atom, TransformKind kind, const QContext& ctx);

}  // namespace detail

/// Closed-form transform, atom by atom (linearity).
inline SExpr transform_symbolic(const TimeExpr& f, TransformKind kind, const QContext& ctx) {
  SExpr out;
  for (const auto& a : f.atoms) out = out + detail::transform_symbolic_atom(a, kind, ctx);
  return out;
}

/// L_q(f) * Gamma_q(beta) / s^beta: the transform of f * t^{beta-1}, i.e. of
/// T_q^beta f. First kind only.
inline SExpr convolution_rule(const TimeExpr& f, double beta, TransformKind kind, const QContext& ctx) {
  if (kind != TransformKind::First)
    throw UnsupportedAtom("the convolution rule is only available for the first kind");
  if (!(beta > 0.0)) throw DomainError("convolution_rule: beta must be positive");
  for (const auto& a : f.atoms) {
    if (a.base == Base::FractionalIntegral || (a.base == Base::Heaviside && a.param > 0.0))
      throw UnsupportedAtom(std::string("convolution rule needs a power series, got ") + base_name(a.base));
  }
  return scale(times_s_power(transform_symbolic(f, kind, ctx), -beta), q_gamma_jackson(beta, ctx));
}

namespace detail {

inline SExpr transform_symbolic_atom(const Atom& atom, TransformKind kind, const QContext& ctx) {
  const double q = ctx.q();
  const double a = atom.param;
  const double n = atom.t_power;
  const bool first = kind == TransformKind::First;
  if (!(n > -1.0)) throw DomainError("transform_symbolic: powers must exceed -1");

  auto power = [&](double alpha) {
    RationalTerm t;
    t.s_den_power = alpha + 1.0;
    if (std::floor(alpha) == alpha) {
      t.coef = q_factorial(static_cast<unsigned>(alpha), ctx);
      if (!first) t.coef *= std::pow(q, -0.5 * (alpha + 1.0) * alpha);
    } else if (first) {
      t.coef = q_gamma_jackson(alpha + 1.0, ctx);
    } else {
      t.coef = q_gamma_second(alpha + 1.0, ctx);
    }
    t.coef *= atom.coef;
    return rational_sexpr(t);
  };

  switch (atom.base) {
    case Base::One: return power(n);
    case Base::Heaviside: {
      if (a == 0.0) return power(n);
      if (!first || n != 0.0)
        throw UnsupportedAtom("u(t-a) has a table entry only for the first kind, without powers of t");
      SExpr e;
      e.kernels.push_back({atom.coef, a, 1.0});
      e.validity.anchors.push_back(a);
      return e;
    }
    case Base::FractionalIntegral: {
      if (n != 0.0) throw UnsupportedAtom("t^n * T_q^beta f has no table entry");
      return scale(convolution_rule(*atom.inner, atom.beta, kind, ctx), atom.coef);
    }
    default: break;
  }
  if (!integer_power(atom))
    throw UnsupportedAtom(std::string("t^alpha * ") + base_name(atom.base) + " needs an integer power");
  if (a == 0.0) {
    Atom b = atom;
    b.base = Base::One;
    const bool vanishes = atom.base == Base::SinQ || atom.base == Base::CapSinQ || atom.base == Base::SinhQ;
    if (vanishes) b.coef = 0.0;
    return transform_symbolic_atom(b, kind, ctx);
  }
  const unsigned k = static_cast<unsigned>(n);
  const double abs_a = std::abs(a);

  if (first) {
    switch (atom.base) {
      case Base::EqExp: {
        // q^{-C(k+1,2)} [k]! / prod_{j=0..k} (q^{-j}s - a)
        RationalTerm t;
        t.coef = atom.coef * q_factorial(k, ctx) * std::pow(q, -0.5 * (k + 1.0) * k);
        for (unsigned j = 0; j <= k; ++j) t.lin.push_back({std::pow(q, -static_cast<double>(j)), a});
        return rational_sexpr(t, std::max(a, 0.0));
      }
      case Base::CosQ:
      case Base::SinQ:
      case Base::CoshQ:
      case Base::SinhQ: {
        if (k > 0) return series_sexpr(atom, kind, abs_a, ctx);
        const bool trig = atom.base == Base::CosQ || atom.base == Base::SinQ;
        const bool even = atom.base == Base::CosQ || atom.base == Base::CoshQ;
        RationalTerm t;
        t.coef = atom.coef * (even ? 1.0 : a);
        t.s_num_power = even ? 1 : 0;
        t.quad.push_back({1.0, trig ? a * a : -a * a});
        // cos_q, sin_q are bounded (|e_q(ix)| <= 1), so the lattice sum is
        // analytic in s and equals the closed form for every s > 0.
        return rational_sexpr(t, trig ? 0.0 : abs_a);
      }
      case Base::CapEqExp:
      case Base::CapCosQ:
      case Base::CapSinQ: return series_sexpr(atom, kind, 0.0, ctx);
      default: break;
    }
  } else {
    switch (atom.base) {
      case Base::CapEqExp: {
        // q^{k+1} [k]! / prod_{j=1..k+1} (q^j s - a)
        RationalTerm t;
        t.coef = atom.coef * q_factorial(k, ctx) * std::pow(q, k + 1.0);
        for (unsigned j = 1; j <= k + 1; ++j) t.lin.push_back({std::pow(q, j), a});
        return rational_sexpr(t, abs_a * std::pow(q, -(k + 1.0)));
      }
      case Base::CapCosQ:
      case Base::CapSinQ: {
        if (k > 0) return series_sexpr(atom, kind, abs_a * std::pow(q, -(k + 1.0)), ctx);
        const bool even = atom.base == Base::CapCosQ;
        RationalTerm t;
        t.coef = atom.coef * (even ? q * q : q * a);
        t.s_num_power = even ? 1 : 0;
        t.quad.push_back({q, a * a});
        return rational_sexpr(t, abs_a / q);
      }
      case Base::EqExp:
      case Base::CosQ:
      case Base::SinQ:
      case Base::CoshQ:
      case Base::SinhQ: return series_sexpr(atom, kind, 0.0, ctx);
      default: break;
    }
  }
  throw UnsupportedAtom(std::string("no ") + kind_name(kind) + "-kind table entry for " + base_name(atom.base));
}

}  // namespace detail

/// Transform of the n-th q-derivative from F and f^{(i)}(0), i < n.
///   first:  s^n F(s) - sum s^{n-1-i} f^{(i)}(0)
///   second: s^n q^{-C(n+1,2)} F(q^{-n}s) - sum s^{n-1-i} q^{-C(n-i,2)} f^{(i)}(0)
inline SExpr derivative_rule(const SExpr& F, const std::vector<double>& init, unsigned n, TransformKind kind,
                             const QContext& ctx) {
  if (init.size() != n)
    throw ArityError("derivative_rule: expected " + std::to_string(n) + " initial values, got " +
                     std::to_string(init.size()));
  const double q = ctx.q();
  SExpr out;
  if (kind == TransformKind::First) {
    out = times_s_power(F, n);
  } else {
    out = scale(times_s_power(rescale(F, -static_cast<int>(n), ctx), n), std::pow(q, -0.5 * (n + 1.0) * n));
  }
  for (unsigned i = 0; i < n; ++i) {
    if (init[i] == 0.0) continue;
    RationalTerm t;
    t.coef = -init[i];
    if (kind == TransformKind::Second) t.coef *= std::pow(q, -0.5 * (n - i) * (n - i - 1.0));
    t.s_num_power = static_cast<int>(n - 1 - i);
    out.rational.push_back(t);
  }
  return out;
}

/// Numeric form of derivative_rule for an evaluator F.
template <class F>
double derivative_rule_numeric(F&& Fs, const std::vector<double>& init, unsigned n, double s, TransformKind kind,
                               const QContext& ctx) {
  if (init.size() != n) throw ArityError("derivative_rule: wrong number of initial values");
  const double q = ctx.q();
  double v = kind == TransformKind::First
                 ? std::pow(s, n) * Fs(s)
                 : std::pow(s, n) * std::pow(q, -0.5 * (n + 1.0) * n) * Fs(s * std::pow(q, -static_cast<double>(n)));
  for (unsigned i = 0; i < n; ++i) {
    double c = init[i] * std::pow(s, n - 1.0 - i);
    if (kind == TransformKind::Second) c *= std::pow(q, -0.5 * (n - i) * (n - i - 1.0));
    v -= c;
  }
  return v;
}

namespace detail {

/// D_q^n g(x) from the values g(q^j x), j = 0..n.
inline double q_difference_from_values(std::vector<double> v, double x, double q) {
  const std::size_t n = v.size() - 1;
  for (std::size_t m = 1; m <= n; ++m)
    for (std::size_t j = 0; j + m <= n; ++j) v[j] = (v[j] - v[j + 1]) / ((1.0 - q) * x * std::pow(q, j));
  return v[0];
}

/// Values F(q^i s) for i in an integer range, computed once each.
template <class F>
class ScaledCache {
 public:
  ScaledCache(F& f, double s, double q) : f_(f), s_(s), q_(q) {}
  double at(int i) {
    auto it = values_.find(i);
    if (it != values_.end()) return it->second;
    const double v = f_(s_ * std::pow(q_, i));
    values_.emplace(i, v);
    return v;
  }

 private:
  F& f_;
  double s_;
  double q_;
  std::map<int, double> values_;
};

/// L(t^n f)(s) from F through the q-difference rule, reading F from the cache.
template <class Cache>
double t_multiplication_from_cache(Cache& cache, unsigned n, double s, TransformKind kind, const QContext& ctx) {
  const double q = ctx.q();
  std::vector<double> v(n + 1);
  if (kind == TransformKind::First) {
    // g(x) = F(q^{-n} x); g(q^j s) = F(q^{j-n} s)
    for (unsigned j = 0; j <= n; ++j) v[j] = cache.at(static_cast<int>(j) - static_cast<int>(n));
    const double sign = n % 2 ? -1.0 : 1.0;
    return sign * q_pow_binom2(q, n) * q_difference_from_values(v, s, q);
  }
  for (unsigned j = 0; j <= n; ++j) v[j] = cache.at(static_cast<int>(j));
  const double sign = n % 2 ? -1.0 : 1.0;
  return sign * q_difference_from_values(v, s, q);
}

}  // namespace detail

/// L(t^n f)(s) = (-1)^n q^{C(n,2)} D_s^n [F(q^{-n}s)] (first kind) or
/// (-1)^n D_s^n F(s) (second kind).
template <class F>
double t_multiplication_rule(F&& Fs, unsigned n, double s, TransformKind kind, const QContext& ctx) {
  if (!(s > 0.0)) throw DomainError("t_multiplication_rule: s must be positive");
  auto f = [&](double x) { return Fs(x); };
  detail::ScaledCache<decltype(f)> cache(f, s, ctx.q());
  return detail::t_multiplication_from_cache(cache, n, s, kind, ctx);
}

namespace detail {

/// sum_n w_n L(t^n f)(s) with w_n supplied as a ratio w_{n+1}/w_n.
template <class F, class Ratio>
double multiplication_series(F&& Fs, Ratio ratio, double s, TransformKind kind, const QContext& ctx,
                             unsigned max_order) {
  auto f = [&](double x) { return Fs(x); };
  ScaledCache<decltype(f)> cache(f, s, ctx.q());
  double w = 1.0;
  CompensatedSum sum;
  double prev = std::numeric_limits<double>::infinity();
  int small = 0;
  int growing = 0;
  for (unsigned n = 0; n <= max_order; ++n) {
    const double term = w * t_multiplication_from_cache(cache, n, s, kind, ctx);
    sum.add(term);
    const double mag = std::abs(term);
    if (!std::isfinite(mag)) throw ConvergenceError("multiplication rule: non-finite term");
    if (mag <= ctx.tol() * std::abs(sum.value())) {
      if (++small >= 3) return sum.value();
    } else {
      small = 0;
    }
    growing = (n >= 3 && mag > prev) ? growing + 1 : 0;
    if (growing >= 4)
      throw ConvergenceError("multiplication rule: terms grow from order " + std::to_string(n - 4) +
                             " on; the series diverges at s = " + format_number(s));
    prev = mag;
    w *= ratio(n);
  }
  throw ConvergenceError("multiplication rule: no convergence within " + std::to_string(max_order) +
                         " orders (precision of high q-differences is exhausted)");
}

}  // namespace detail

/// L(e_q(at) f)(s) = sum_n a^n/[n]_q! L(t^n f)(s), each term through the
/// t-multiplication rule (Corollary form for the first kind).
template <class F>
double eq_multiplication_rule(F&& Fs, double a, double s, TransformKind kind, const QContext& ctx,
                              unsigned max_order = 60) {
  return detail::multiplication_series(
      Fs, [&](unsigned n) { return a / q_bracket(n + 1.0, ctx); }, s, kind, ctx, max_order);
}

/// L(E_q(at) f)(s) = sum_n q^{C(n,2)} a^n/[n]_q! L(t^n f)(s).
template <class F>
double Eq_multiplication_rule(F&& Fs, double a, double s, TransformKind kind, const QContext& ctx,
                              unsigned max_order = 60) {
  return detail::multiplication_series(
      Fs, [&](unsigned n) { return a * std::pow(ctx.q(), n) / q_bracket(n + 1.0, ctx); }, s, kind, ctx,
      max_order);
}

struct GrowthBound {
  double c = 0.0;
  double M = 1.0;
  double T = 1.0;
};

struct GrowthReport {
  bool ok = true;
  bool pole = false;
  double worst_t = 0.0;
  double worst_ratio = 0.0;
  std::size_t samples = 0;
  explicit operator bool() const { return ok; }
};

/// Heuristic check of |f(t)| <= M e^{ct} at t = q^{-k} > T, up to t ~ 1e4.
/// A pole met on the way fails the check.
template <class F>
GrowthReport growth_check(F&& f, const GrowthBound& bound, const QContext& ctx) {
  if (!(bound.M > 0.0) || !(bound.T > 0.0)) throw DomainError("growth_check: M and T must be positive");
  GrowthReport r;
  const double lq = std::log(ctx.q());
  const long kmax = std::min<long>(400, static_cast<long>(std::ceil(std::log(1e4) / -lq)));
  for (long k = 0; k <= kmax; ++k) {
    const double t = std::exp(-k * lq);
    if (t <= bound.T) continue;
    double v;
    try {
      v = f(t);
    } catch (const PoleError&) {
      r.ok = false;
      r.pole = true;
      r.worst_t = t;
      return r;
    }
    ++r.samples;
    const double ratio = std::abs(v) / (bound.M * std::exp(bound.c * t));
    if (ratio > r.worst_ratio) {
      r.worst_ratio = ratio;
      r.worst_t = t;
    }
    if (!(ratio <= 1.0)) r.ok = false;
  }
  return r;
}

}  // namespace qlap
