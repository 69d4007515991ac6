#pragma once

/**
 * @file qcore.hpp
 * @brief q-arithmetic primitives: brackets, factorials, Gaussian binomials,
 *        shifted factorials and the q-power identities.
 *
 * Everything here is numeric at a fixed base q held in a QContext. Values are
 * plain doubles (or std::complex<double> where the argument is complex); the
 * infinite products additionally report a truncation bound.
 */

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <type_traits>

#include "errors.hpp"

namespace qlap {

/// Evaluation parameters shared by every routine.
///
/// `lattice_scale` is the `a` selecting the Jackson lattice {q^n / a} used by
/// the generic improper integral.
class QContext {
 public:
  explicit QContext(double q, double tol = 1e-14, std::size_t max_terms = 200000,
                    double lattice_scale = 1.0)
      : q_(q), tol_(tol), max_terms_(max_terms), lattice_scale_(lattice_scale) {
    if (!(q > 0.0 && q < 1.0))
      throw DomainError("QContext: q must lie strictly inside (0,1), got " +
                        std::to_string(q));
    if (!(tol > 0.0)) throw DomainError("QContext: tol must be positive");
    if (max_terms < 16) throw DomainError("QContext: max_terms must be >= 16");
    if (!(lattice_scale > 0.0))
      throw DomainError("QContext: lattice_scale must be positive");
  }

  double q() const noexcept { return q_; }
  double tol() const noexcept { return tol_; }
  std::size_t max_terms() const noexcept { return max_terms_; }
  double lattice_scale() const noexcept { return lattice_scale_; }

  QContext with_q(double q) const { return QContext(q, tol_, max_terms_, lattice_scale_); }
  QContext with_tol(double tol) const { return QContext(q_, tol, max_terms_, lattice_scale_); }
  QContext with_max_terms(std::size_t n) const { return QContext(q_, tol_, n, lattice_scale_); }
  QContext with_lattice_scale(double a) const { return QContext(q_, tol_, max_terms_, a); }

 private:
  double q_;
  double tol_;
  std::size_t max_terms_;
  double lattice_scale_;
};

/// A value held as mantissa * exp(log_scale) so long products neither
/// overflow nor underflow.
template <class T>
struct Scaled {
  T mantissa{1};
  double log_scale = 0.0;

  void normalize() {
    const double mag = std::abs(mantissa);
    if (mag == 0.0 || !std::isfinite(mag)) return;
    if (mag > 1e100 || mag < 1e-100) {
      mantissa /= mag;
      log_scale += std::log(mag);
    }
  }

  Scaled& operator*=(const T& f) {
    mantissa *= f;
    normalize();
    return *this;
  }

  Scaled& operator*=(const Scaled& other) {
    mantissa *= other.mantissa;
    log_scale += other.log_scale;
    normalize();
    return *this;
  }

  Scaled reciprocal() const {
    Scaled r;
    r.mantissa = T(1) / mantissa;
    r.log_scale = -log_scale;
    r.normalize();
    return r;
  }

  T value() const {
    if (mantissa == T(0)) return T(0);
    return mantissa * std::exp(log_scale);
  }
};

/// Tag selecting the infinite shifted factorial (a;q)_inf.
struct Infinity {};
inline constexpr Infinity infinity{};

namespace detail {

inline bool is_integer(double x) { return std::floor(x) == x; }

template <class T>
double magnitude(const T& v) {
  return std::abs(v);
}

}  // namespace detail

/// [x]_q = (1 - q^x) / (1 - q).
inline double q_bracket(double x, const QContext& ctx) {
  const double q = ctx.q();
  return -std::expm1(x * std::log(q)) / (1.0 - q);
}

/// [n]_q! = [n]_q [n-1]_q ... [1]_q, with [0]_q! = 1.
inline double q_factorial(unsigned n, const QContext& ctx) {
  double r = 1.0;
  for (unsigned k = 2; k <= n; ++k) r *= q_bracket(k, ctx);
  return r;
}

/// Gaussian binomial coefficient [n choose k]_q.
inline double q_binomial_coef(unsigned n, unsigned k, const QContext& ctx) {
  if (k > n) throw DomainError("q_binomial_coef: k > n");
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (unsigned j = 1; j <= k; ++j)
    r *= q_bracket(n - k + j, ctx) / q_bracket(j, ctx);
  return r;
}

/// Finite shifted factorial (a;q)_n = prod_{i<n} (1 - a q^i).
template <class T>
T q_pochhammer(T a, std::size_t n, const QContext& ctx) {
  T r(1);
  double qi = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    r *= T(1) - a * qi;
    qi *= ctx.q();
  }
  return r;
}

template <class T>
struct PochhammerResult {
  T value{};
  Scaled<T> scaled{};
  double abs_err_est = 0.0;
  /// Relative truncation bound on the dropped tail.
  double rel_err_est = 0.0;
  std::size_t factors = 0;
  bool converged = false;
  /// Smallest |1 - a q^i| met; a tiny value means a zero (or pole if inverted).
  double min_factor = std::numeric_limits<double>::infinity();
};

/// Infinite shifted factorial (a;q)_inf.
///
/// Factors are taken until |a q^i| < tol (and at least 16 of them); the
/// dropped tail satisfies |log tail| <= x / ((1-q)(1-x)) with x = |a q^i|,
/// which is what `rel_err_est` reports.
template <class T>
PochhammerResult<T> q_pochhammer(T a, Infinity, const QContext& ctx) {
  PochhammerResult<T> out;
  const double q = ctx.q();
  T aqi = a;
  for (std::size_t i = 0; i < ctx.max_terms(); ++i) {
    const double x = detail::magnitude(aqi);
    if (i >= 16 && x < ctx.tol()) {
      out.converged = true;
      const double tail = x / ((1.0 - q) * (1.0 - x));
      out.rel_err_est = std::expm1(tail);
      break;
    }
    const T f = T(1) - aqi;
    out.min_factor = std::min(out.min_factor, detail::magnitude(f));
    out.scaled *= f;
    aqi *= q;
    out.factors = i + 1;
  }
  if (!out.converged) {
    const double x = detail::magnitude(aqi);
    out.rel_err_est = x < 1.0 ? std::expm1(x / ((1.0 - q) * (1.0 - x)))
                              : std::numeric_limits<double>::infinity();
  }
  out.value = out.scaled.value();
  out.abs_err_est = detail::magnitude(out.value) * out.rel_err_est;
  return out;
}

/// (x + y)_q^n = prod_{j<n} (x + q^j y), the product side of the q-binomial
/// theorem.
inline double q_binomial_power(double x, double y, unsigned n, const QContext& ctx) {
  double r = 1.0;
  double qj = 1.0;
  for (unsigned j = 0; j < n; ++j) {
    r *= x + qj * y;
    qj *= ctx.q();
  }
  return r;
}

/// Sum side of the q-binomial theorem:
/// sum_k [n choose k]_q x^{n-k} q^{k(k-1)/2} y^k.
inline double q_binomial_expansion(double x, double y, unsigned n, const QContext& ctx) {
  double s = 0.0;
  for (unsigned k = 0; k <= n; ++k) {
    s += q_binomial_coef(n, k, ctx) * std::pow(x, n - k) *
         std::pow(ctx.q(), 0.5 * k * (k - 1.0)) * std::pow(y, k);
  }
  return s;
}

/// (1 + x)_q^t for real t, as (-x;q)_inf / (-q^t x;q)_inf.
inline double q_power_real(double x, double t, const QContext& ctx) {
  if (t == 0.0) return 1.0;
  if (t > 0.0 && detail::is_integer(t) && t < 64.0)
    return q_binomial_power(1.0, x, static_cast<unsigned>(t), ctx);
  const auto num = q_pochhammer(-x, infinity, ctx);
  const auto den = q_pochhammer(-std::pow(ctx.q(), t) * x, infinity, ctx);
  if (den.min_factor < 1e3 * std::numeric_limits<double>::epsilon())
    throw PoleError("q_power_real: denominator product vanishes", x);
  if (!num.converged || !den.converged)
    throw ConvergenceError("q_power_real: product did not converge");
  Scaled<double> r = num.scaled;
  r *= den.scaled.reciprocal();
  return r.value();
}

/// 1 / (x - y)_q^n expanded as sum_k [n+k-1 choose k]_q x^{-n-k} y^k.
inline double q_negative_power_series(double x, double y, unsigned n, const QContext& ctx) {
  if (n == 0) throw DomainError("q_negative_power_series: n must be positive");
  if (x == 0.0) throw DomainError("q_negative_power_series: x must be nonzero");
  const double u = y / x;
  if (std::abs(u) >= 1.0)
    throw ConvergenceError("q_negative_power_series: diverges for |y/x| >= 1");
  double coef = 1.0;  // [n+k-1 choose k]_q
  double upow = 1.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < ctx.max_terms(); ++k) {
    const double term = coef * upow;
    sum += term;
    if (k >= 2 && std::abs(term) <= ctx.tol() * std::abs(sum))
      return sum * std::pow(x, -static_cast<double>(n));
    coef *= q_bracket(n + k, ctx) / q_bracket(k + 1, ctx);
    upow *= u;
  }
  throw ConvergenceError("q_negative_power_series: term cap reached");
}

/// q^{k(k-1)/2}.
inline double q_pow_binom2(double q, double k) { return std::pow(q, 0.5 * k * (k - 1.0)); }

}  // namespace qlap
