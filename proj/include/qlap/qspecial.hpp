#pragma once

/**
 * @file qspecial.hpp
 * @brief The q-exponentials e_q and E_q, q-trigonometric and hyperbolic
 *        functions, the Heaviside step and the two transform kernels.
 *
 * e_q(z) = 1/((1-q)z; q)_inf has simple poles at z = q^{-k}/(1-q); E_q is
 * entire. Cos_q/Sin_q are the real and imaginary parts of E_q(iz).
 */

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>

#include "qcore.hpp"

namespace qlap {

enum class Method { Series, Product };

enum EvalFlag : unsigned {
  kNone = 0,
  kNearPole = 1u << 0,
  kTruncatedAtCap = 1u << 1,
  kOverflow = 1u << 2,
};

template <class T>
struct EvalResult {
  T value{};
  double abs_err_est = 0.0;
  Method method = Method::Series;
  unsigned flags = kNone;

  bool near_pole() const { return (flags & kNearPole) != 0; }
  bool truncated() const { return (flags & kTruncatedAtCap) != 0; }
  bool overflow() const { return (flags & kOverflow) != 0; }
};

using Complex = std::complex<double>;

/// Force a representation when a function has both.
enum class Force { Auto, Series, Product };

namespace detail {

/// Factors with |1 - x| below this raise NEAR_POLE.
inline constexpr double kNearPoleThreshold = 1e-8;
/// Factors at or below this are treated as an exact pole.
inline constexpr double kPoleThreshold = 64 * std::numeric_limits<double>::epsilon();

/// sum_n c_n z^n with c_{n+1}/c_n = ratio(n) supplied by the caller.
template <class T, class Ratio>
EvalResult<T> power_series(T z, Ratio ratio, const QContext& ctx) {
  EvalResult<T> r;
  r.method = Method::Series;
  T term(1);
  T sum(1);
  int small = 0;
  for (std::size_t n = 0; n < ctx.max_terms(); ++n) {
    term *= z * ratio(n);
    sum += term;
    const double mag = std::abs(term);
    if (mag <= ctx.tol() * std::abs(sum) || mag == 0.0) {
      if (++small >= 3) {
        r.value = sum;
        r.abs_err_est = 2.0 * mag + 4 * std::numeric_limits<double>::epsilon() * std::abs(sum);
        return r;
      }
    } else {
      small = 0;
    }
  }
  r.value = sum;
  r.abs_err_est = std::abs(term);
  r.flags |= kTruncatedAtCap;
  return r;
}

template <class T>
void check_factor(const PochhammerResult<T>& p, double where, unsigned& flags) {
  if (p.min_factor <= kPoleThreshold)
    throw PoleError("q-exponential evaluated at a pole", where);
  if (p.min_factor < kNearPoleThreshold) flags |= kNearPole;
}

}  // namespace detail

/// Scaled product ((1-q) c z; q)_inf used by every product-form evaluation.
template <class T>
PochhammerResult<T> exp_product(T z, double c, const QContext& ctx) {
  return q_pochhammer(T(c * (1.0 - ctx.q())) * z, infinity, ctx);
}

/// e_q(z) = sum z^n/[n]_q! = 1/((1-q)z; q)_inf.
///
/// The series is used for |z|(1-q) < 0.5 and |z| < 4; past |z| = 4 the
/// alternating terms lose too many digits when q is close to 1.
template <class T>
EvalResult<T> eq_exp(T z, const QContext& ctx, Force force = Force::Auto) {
  const double mag = std::abs(z);
  const bool series = force == Force::Series ||
                      (force == Force::Auto && mag * (1.0 - ctx.q()) < 0.5 && mag < 4.0);
  if (series) {
    if (mag * (1.0 - ctx.q()) >= 1.0)
      throw DomainError("eq_exp: series outside its radius 1/(1-q)");
    return detail::power_series<T>(
        z, [&](std::size_t n) { return 1.0 / q_bracket(n + 1.0, ctx); }, ctx);
  }
  EvalResult<T> r;
  r.method = Method::Product;
  const auto p = exp_product(z, 1.0, ctx);
  detail::check_factor(p, std::abs(z), r.flags);
  if (!p.converged) r.flags |= kTruncatedAtCap;
  const auto inv = p.scaled.reciprocal();
  if (inv.log_scale > 700.0) r.flags |= kOverflow;
  r.value = inv.value();
  const double rel = p.rel_err_est + 16 * std::numeric_limits<double>::epsilon() *
                                         static_cast<double>(p.factors);
  r.abs_err_est = std::abs(r.value) * rel;
  if (r.near_pole()) r.abs_err_est += std::abs(r.value) * 1e-8 / p.min_factor;
  return r;
}

/// E_q(z) = sum q^{C(n,2)} z^n/[n]_q! = ((1-q)(-z); q)_inf.
template <class T>
EvalResult<T> Eq_exp(T z, const QContext& ctx, Force force = Force::Auto) {
  if (force == Force::Series) {
    const double q = ctx.q();
    return detail::power_series<T>(
        z, [&](std::size_t n) { return std::pow(q, static_cast<double>(n)) / q_bracket(n + 1.0, ctx); },
        ctx);
  }
  EvalResult<T> r;
  r.method = Method::Product;
  const auto p = exp_product(z, -1.0, ctx);
  if (p.min_factor <= detail::kPoleThreshold) return r;  // a zero of E_q
  if (!p.converged) r.flags |= kTruncatedAtCap;
  if (p.scaled.log_scale > 700.0) r.flags |= kOverflow;
  r.value = p.value;
  r.abs_err_est = std::abs(r.value) * (p.rel_err_est + 16 * std::numeric_limits<double>::epsilon() *
                                                           static_cast<double>(p.factors));
  return r;
}

/// E_q(z) as mantissa * exp(log_scale); never overflows.
template <class T>
Scaled<T> Eq_exp_scaled(T z, const QContext& ctx) {
  auto p = exp_product(z, -1.0, ctx);
  if (p.min_factor <= detail::kPoleThreshold) p.scaled.mantissa = T(0);
  return p.scaled;
}

/// e_q(z) as mantissa * exp(log_scale).
template <class T>
Scaled<T> eq_exp_scaled(T z, const QContext& ctx) {
  const auto p = exp_product(z, 1.0, ctx);
  if (p.min_factor <= detail::kPoleThreshold)
    throw PoleError("q-exponential evaluated at a pole", std::abs(z));
  if (p.min_factor < detail::kNearPoleThreshold)
    throw PoleError("q-exponential evaluated within 1e-8 of a pole", std::abs(z));
  return p.scaled.reciprocal();
}

namespace detail {

inline EvalResult<double> real_part(const EvalResult<Complex>& c) {
  return {c.value.real(), c.abs_err_est, c.method, c.flags};
}

inline EvalResult<double> imag_part(const EvalResult<Complex>& c) {
  return {c.value.imag(), c.abs_err_est, c.method, c.flags};
}

/// Even (parity 0) or odd (parity 1) part of sum w_n z^n/[n]_q!, where
/// w_n = (-1)^{floor(n/2)} (trig) or 1 (hyperbolic), times q^{C(n,2)} if capital.
inline EvalResult<double> parity_series(double z, int parity, bool alternating, bool capital,
                                        const QContext& ctx) {
  const double q = ctx.q();
  EvalResult<double> r;
  r.method = Method::Series;
  double term = parity == 0 ? 1.0 : z;
  double sum = term;
  int small = 0;
  for (std::size_t n = parity; n < ctx.max_terms(); n += 2) {
    // term_{n+2} / term_n
    double f = z * z / (q_bracket(n + 1.0, ctx) * q_bracket(n + 2.0, ctx));
    if (alternating) f = -f;
    if (capital) f *= std::pow(q, 2.0 * n + 1.0);
    term *= f;
    sum += term;
    if (std::abs(term) <= ctx.tol() * std::abs(sum) || term == 0.0) {
      if (++small >= 3) {
        r.value = sum;
        r.abs_err_est = 2.0 * std::abs(term) + 4 * std::numeric_limits<double>::epsilon() * std::abs(sum);
        return r;
      }
    } else {
      small = 0;
    }
  }
  r.value = sum;
  r.abs_err_est = std::abs(term);
  r.flags |= kTruncatedAtCap;
  return r;
}

inline bool in_series_region(double z, const QContext& ctx) {
  return std::abs(z) * (1.0 - ctx.q()) < 0.5 && std::abs(z) < 4.0;
}

}  // namespace detail

/// cos_q(z) = (e_q(iz) + e_q(-iz))/2 = sum (-1)^n z^{2n}/[2n]_q!.
inline EvalResult<double> cos_q(double z, const QContext& ctx, Force force = Force::Auto) {
  if (force == Force::Series || (force == Force::Auto && detail::in_series_region(z, ctx)))
    return detail::parity_series(z, 0, true, false, ctx);
  return detail::real_part(eq_exp(Complex(0.0, z), ctx, Force::Product));
}

/// sin_q(z) = (e_q(iz) - e_q(-iz))/(2i) = sum (-1)^n z^{2n+1}/[2n+1]_q!.
inline EvalResult<double> sin_q(double z, const QContext& ctx, Force force = Force::Auto) {
  if (force == Force::Series || (force == Force::Auto && detail::in_series_region(z, ctx)))
    return detail::parity_series(z, 1, true, false, ctx);
  return detail::imag_part(eq_exp(Complex(0.0, z), ctx, Force::Product));
}

/// Cos_q(z) = (E_q(iz) + E_q(-iz))/2 = sum (-1)^n q^{C(2n,2)} z^{2n}/[2n]_q!.
inline EvalResult<double> Cos_q(double z, const QContext& ctx, Force force = Force::Auto) {
  if (force == Force::Series) return detail::parity_series(z, 0, true, true, ctx);
  return detail::real_part(Eq_exp(Complex(0.0, z), ctx));
}

/// Sin_q(z) = (E_q(iz) - E_q(-iz))/(2i) = sum (-1)^n q^{C(2n+1,2)} z^{2n+1}/[2n+1]_q!.
inline EvalResult<double> Sin_q(double z, const QContext& ctx, Force force = Force::Auto) {
  if (force == Force::Series) return detail::parity_series(z, 1, true, true, ctx);
  return detail::imag_part(Eq_exp(Complex(0.0, z), ctx));
}

namespace detail {

inline EvalResult<double> hyperbolic(double z, int parity, const QContext& ctx, Force force) {
  if (force == Force::Series || (force == Force::Auto && in_series_region(z, ctx)))
    return parity_series(z, parity, false, false, ctx);
  const auto p = eq_exp(z, ctx, Force::Product);
  const auto m = eq_exp(-z, ctx, Force::Product);
  EvalResult<double> r;
  r.method = Method::Product;
  r.flags = p.flags | m.flags;
  r.value = parity == 0 ? 0.5 * (p.value + m.value) : 0.5 * (p.value - m.value);
  r.abs_err_est = 0.5 * (p.abs_err_est + m.abs_err_est);
  return r;
}

}  // namespace detail

/// cosh_q(z) = (e_q(z) + e_q(-z))/2.
inline EvalResult<double> cosh_q(double z, const QContext& ctx, Force force = Force::Auto) {
  return detail::hyperbolic(z, 0, ctx, force);
}

/// sinh_q(z) = (e_q(z) - e_q(-z))/2.
inline EvalResult<double> sinh_q(double z, const QContext& ctx, Force force = Force::Auto) {
  return detail::hyperbolic(z, 1, ctx, force);
}

/// u(t - a): 1 for t >= a, else 0.
inline double heaviside(double t, double a) {
  if (a < 0.0) throw DomainError("heaviside: step location must be nonnegative");
  // Lattice points are computed in floating point; a point within rounding of
  // the step counts as on it.
  return t >= a * (1.0 - 1e-12) ? 1.0 : 0.0;
}

/// First-kind kernel E_q(-qst).
inline EvalResult<double> kernel_first(double s, double t, const QContext& ctx) {
  if (!(s > 0.0)) throw DomainError("kernel_first: s must be positive");
  return Eq_exp(-ctx.q() * s * t, ctx);
}

/// Second-kind kernel e_q(-st).
inline EvalResult<double> kernel_second(double s, double t, const QContext& ctx) {
  if (!(s > 0.0)) throw DomainError("kernel_second: s must be positive");
  return eq_exp(-s * t, ctx);
}

}  // namespace qlap
