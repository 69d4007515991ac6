#pragma once

/**
 * @file qcalc.hpp
 * @brief Jackson q-derivative and q-integrals, q-gamma of both kinds, q-beta,
 *        the fractional integral T_q^alpha and the power-class q-convolution.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "qcore.hpp"
#include "qspecial.hpp"

namespace qlap {

struct LatticeSum {
  double value = 0.0;
  std::size_t pos_terms = 0;
  std::size_t neg_terms = 0;
  double tail_bound = 0.0;
  bool converged = false;
};

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {

struct DirectionResult {
  std::size_t count = 0;
  double tail = 0.0;
  double abs_sum = 0.0;
  bool converged = false;
};

/// Adds term(start), term(start + step), ... into `acc` until the last
/// eight terms are negligible and the geometric tail estimate is below tol.
/// The tail rate comes from the envelope of two consecutive windows of eight
/// terms, so oscillating terms do not stall the walk. The first `warmup`
/// terms never stop it (kernels that start out vanishingly small).
template <class Term>
DirectionResult sum_direction(Term&& term, long start, long step, const QContext& ctx,
                              CompensatedSum& acc, std::size_t warmup = 0) {
  constexpr std::size_t kWindow = 8;
  DirectionResult out;
  std::array<double, 2 * kWindow> last{};
  double peak = 0.0;
  for (std::size_t i = 0; i < ctx.max_terms(); ++i) {
    const double v = term(start + step * static_cast<long>(i));
    if (!std::isfinite(v)) {
      out.count = i;
      out.tail = std::numeric_limits<double>::infinity();
      return out;
    }
    acc.add(v);
    const double mag = std::abs(v);
    out.abs_sum += mag;
    peak = std::max(peak, mag);
    last[i % (2 * kWindow)] = mag;
    out.count = i + 1;
    if (i < warmup || i + 1 < 2 * kWindow) continue;

    double recent = 0.0;
    double older = 0.0;
    for (std::size_t j = 0; j < kWindow; ++j) {
      recent = std::max(recent, last[(i - j) % (2 * kWindow)]);
      older = std::max(older, last[(i - j - kWindow) % (2 * kWindow)]);
    }
    const double scale = std::max(std::abs(acc.value()), 1e-3 * peak);
    if (recent > ctx.tol() * scale) continue;
    if (recent == 0.0) {
      out.tail = 0.0;
      out.converged = true;
      return out;
    }
    if (!(recent < older)) continue;
    const double ratio = std::pow(recent / older, 1.0 / kWindow);
    out.tail = recent * ratio / (1.0 - ratio);
    if (out.tail <= 0.25 * ctx.tol() * scale) {
      out.converged = true;
      return out;
    }
  }
  out.tail = std::numeric_limits<double>::infinity();
  return out;
}

/// Sum over n >= 0 (and n < 0 when two_sided), scaled by `factor`.
template <class Term>
LatticeSum lattice_sum(Term&& term, bool two_sided, double factor, const QContext& ctx,
                       std::size_t warmup = 0) {
  CompensatedSum acc;
  LatticeSum out;
  const auto up = sum_direction(term, 0, 1, ctx, acc, warmup);
  out.pos_terms = up.count;
  bool ok = up.converged;
  double tail = up.tail;
  double abs_sum = up.abs_sum;
  if (two_sided) {
    const auto down = sum_direction(term, -1, -1, ctx, acc);
    out.neg_terms = down.count;
    ok = ok && down.converged;
    tail += down.tail;
    abs_sum += down.abs_sum;
  }
  // Rounding in the terms themselves: cancellation among large terms leaves
  // an error of order eps * sum |term| that no tail estimate sees.
  constexpr double eps = std::numeric_limits<double>::epsilon();
  out.value = factor * acc.value();
  out.tail_bound = std::abs(factor) * (tail + eps * abs_sum);
  out.converged = ok && out.tail_bound <= std::max(ctx.tol(), 1e3 * eps) * std::max(std::abs(out.value), 1.0);
  return out;
}

}  // namespace detail

/// (f(x) - f(qx)) / ((1-q)x).
template <class F>
double q_derivative(F&& f, double x, const QContext& ctx) {
  if (x == 0.0) throw DomainError("q_derivative: x = 0 (use series coefficients)");
  const double q = ctx.q();
  return (f(x) - f(q * x)) / ((1.0 - q) * x);
}

/// n-fold Jackson derivative from the n+1 values f(q^j x).
template <class F>
double q_derivative_n(F&& f, double x, unsigned n, const QContext& ctx) {
  if (x == 0.0) throw DomainError("q_derivative_n: x = 0 (use series coefficients)");
  const double q = ctx.q();
  std::vector<double> v(n + 1);
  for (unsigned j = 0; j <= n; ++j) v[j] = f(x * std::pow(q, j));
  // After m passes, v[j] holds D^m f at q^j x.
  for (unsigned m = 1; m <= n; ++m)
    for (unsigned j = 0; j + m <= n; ++j) {
      const double xj = x * std::pow(q, j);
      v[j] = (v[j] - v[j + 1]) / ((1.0 - q) * xj);
    }
  return v[0];
}

/// Definite Jackson integral over [0, x]: (1-q) sum_{k>=0} f(q^k x) x q^k.
template <class F>
LatticeSum jackson_integral(F&& f, double x, const QContext& ctx) {
  if (x == 0.0) return {0.0, 0, 0, 0.0, true};
  const double lq = std::log(ctx.q());
  auto term = [&](long k) {
    const double xk = x * std::exp(k * lq);
    return xk * f(xk);
  };
  return detail::lattice_sum(term, false, 1.0 - ctx.q(), ctx);
}

/// Improper integral over the lattice {q^n / a : n in Z}, a = ctx.lattice_scale().
template <class F>
LatticeSum improper_integral(F&& f, const QContext& ctx) {
  const double lq = std::log(ctx.q());
  const double a = ctx.lattice_scale();
  auto term = [&](long n) {
    const double t = std::exp(n * lq) / a;
    return t * f(t);
  };
  return detail::lattice_sum(term, true, 1.0 - ctx.q(), ctx);
}

/// Integral over [x, inf): x(1-q) sum_{n>=0} q^{-n} f(q^{-n} x).
template <class F>
LatticeSum integral_from(F&& f, double x, const QContext& ctx) {
  if (!(x > 0.0)) throw DomainError("integral_from: x must be positive");
  const double lq = std::log(ctx.q());
  auto term = [&](long n) {
    const double t = x * std::exp(-n * lq);
    return t * f(t);
  };
  return detail::lattice_sum(term, false, 1.0 - ctx.q(), ctx);
}

/// log (q^{n+1}; q)_inf, the log of E_q(-q t_n s) on the lattice
/// t_n = q^n / ((1-q)s). Minus infinity for n < 0, where a factor vanishes.
class LogKernelFirst {
 public:
  explicit LogKernelFirst(double q) : lq_(std::log(q)), q_(q) {
    top_ = static_cast<long>(std::ceil(std::log(1e-18) / lq_)) + 2;
    table_.resize(top_ + 1);
    table_[top_] = -std::exp((top_ + 1) * lq_) / (1.0 - q);
    for (long n = top_ - 1; n >= 0; --n) table_[n] = table_[n + 1] + std::log1p(-std::exp((n + 1) * lq_));
  }

  double operator()(long n) const {
    if (n < 0) return -std::numeric_limits<double>::infinity();
    if (n <= top_) return table_[n];
    return -std::exp((n + 1) * lq_) / (1.0 - q_);
  }

  /// Index where the kernel has essentially switched on; before it the
  /// lattice terms may underflow to zero.
  long ramp() const { return static_cast<long>(std::ceil(std::log(1.0 - q_) / lq_)) + 8; }

 private:
  double lq_;
  double q_;
  long top_;
  std::vector<double> table_;
};

/// -log (-q^n; q)_inf, the log of e_q(-s t_n) on the lattice
/// t_n = q^n / ((1-q)s), for every integer n.
class LogKernelSecond {
 public:
  explicit LogKernelSecond(double q) : lq_(std::log(q)), q_(q) {
    top_ = static_cast<long>(std::ceil(std::log(1e-18) / lq_)) + 2;
    pos_.resize(top_ + 1);
    pos_[top_] = std::exp(top_ * lq_) / (1.0 - q);
    for (long n = top_ - 1; n >= 0; --n) pos_[n] = pos_[n + 1] + std::log1p(std::exp(n * lq_));
  }

  double operator()(long n) const {
    if (n > top_) return -std::exp(n * lq_) / (1.0 - q_);
    if (n >= 0) return -pos_[n];
    const std::size_t k = static_cast<std::size_t>(-n);
    while (neg_.size() < k) {
      const long m = -static_cast<long>(neg_.size()) - 1;
      const double prev = neg_.empty() ? pos_[0] : neg_.back();
      // log1p(q^m) for m < 0, written to avoid overflow of q^m.
      neg_.push_back(prev + m * lq_ + std::log1p(std::exp(-m * lq_)));
    }
    return -neg_[k - 1];
  }

  /// See LogKernelFirst::ramp.
  long ramp() const { return static_cast<long>(std::ceil(std::log(1.0 - q_) / lq_)) + 8; }

 private:
  double lq_;
  double q_;
  long top_;
  std::vector<double> pos_;
  mutable std::vector<double> neg_;
};

/// Closed form (1-q)^{1-t} (q;q)_inf / (q^t;q)_inf.
inline double q_gamma_jackson(double t, const QContext& ctx) {
  const double q = ctx.q();
  if (t <= 0.0 && std::floor(t) == t) throw PoleError("q_gamma: pole at nonpositive integer", t);
  const auto num = q_pochhammer(q, infinity, ctx);
  const auto den = q_pochhammer(std::pow(q, t), infinity, ctx);
  Scaled<double> r = num.scaled;
  r *= den.scaled.reciprocal();
  r.log_scale += (1.0 - t) * std::log(1.0 - q);
  return r.value();
}

/// Gamma_q(t) = int_0^inf x^{t-1} E_q(-qx) d_q x on the lattice q^n/(1-q).
inline LatticeSum q_gamma_first_sum(double t, const QContext& ctx) {
  if (!(t > 0.0)) throw DomainError("q_gamma_first: t must be positive");
  const double q = ctx.q();
  const double lq = std::log(q);
  const double l1q = std::log(1.0 - q);
  const LogKernelFirst kernel(q);
  auto term = [&](long n) {
    if (n < 0) return 0.0;
    return std::exp(n * lq + (t - 1.0) * (n * lq - l1q) + kernel(n));
  };
  return detail::lattice_sum(term, false, 1.0, ctx, static_cast<std::size_t>(kernel.ramp()));
}

inline double q_gamma_first(double t, const QContext& ctx) {
  const auto r = q_gamma_first_sum(t, ctx);
  if (!r.converged) throw ConvergenceError("q_gamma_first: lattice sum did not converge");
  return r.value;
}

/// gamma_q(t) = int_0^inf x^{t-1} e_q(-x) d_q x on the lattice q^n/(1-q).
inline LatticeSum q_gamma_second_sum(double t, const QContext& ctx) {
  if (!(t > 0.0)) throw DomainError("q_gamma_second: t must be positive");
  const double q = ctx.q();
  const double lq = std::log(q);
  const double l1q = std::log(1.0 - q);
  const LogKernelSecond kernel(q);
  auto term = [&](long n) { return std::exp(n * lq + (t - 1.0) * (n * lq - l1q) + kernel(n)); };
  return detail::lattice_sum(term, true, 1.0, ctx, static_cast<std::size_t>(kernel.ramp()));
}

inline double q_gamma_second(double t, const QContext& ctx) {
  const auto r = q_gamma_second_sum(t, ctx);
  if (!r.converged) throw ConvergenceError("q_gamma_second: lattice sum did not converge");
  return r.value;
}

namespace detail {

/// (1 - q x)_q^{alpha-1} at x = q^k, i.e. (q^{k+1};q)_inf / (q^{k+alpha};q)_inf,
/// produced incrementally in k.
class BetaWeight {
 public:
  BetaWeight(double alpha, const QContext& ctx) : q_(ctx.q()), alpha_(alpha) {
    Scaled<double> r = q_pochhammer(q_, infinity, ctx).scaled;
    r *= q_pochhammer(std::pow(q_, alpha), infinity, ctx).scaled.reciprocal();
    value_ = r.value();
  }

  /// Weight at k, for k = 0, 1, 2, ... requested in order.
  double next() {
    const double out = value_;
    value_ *= -std::expm1((k_ + alpha_) * std::log(q_)) / -std::expm1((k_ + 1.0) * std::log(q_));
    ++k_;
    return out;
  }

 private:
  double q_;
  double alpha_;
  double value_;
  long k_ = 0;
};

}  // namespace detail

/// B_q(t, s) = int_0^1 x^{t-1} (1 - qx)_q^{s-1} d_q x.
inline double q_beta(double t, double s, const QContext& ctx) {
  if (!(t > 0.0) || !(s > 0.0)) throw DomainError("q_beta: arguments must be positive");
  const double lq = std::log(ctx.q());
  detail::BetaWeight w(s, ctx);
  auto term = [&](long k) { return std::exp(k * t * lq) * w.next(); };
  const auto r = detail::lattice_sum(term, false, 1.0 - ctx.q(), ctx);
  if (!r.converged) throw ConvergenceError("q_beta: lattice sum did not converge");
  return r.value;
}

/// T_q^alpha f(t) = int_0^t (t - qs)_q^{alpha-1} f(s) d_q s,
/// evaluated as t^alpha int_0^1 (1 - qr)_q^{alpha-1} f(rt) d_q r.
template <class F>
double fractional_integral(F&& f, double alpha, double t, const QContext& ctx) {
  if (!(alpha > 0.0)) throw DomainError("fractional_integral: alpha must be positive");
  if (!(t > 0.0)) throw DomainError("fractional_integral: t must be positive");
  const double lq = std::log(ctx.q());
  detail::BetaWeight w(alpha, ctx);
  auto term = [&](long k) {
    const double r = std::exp(k * lq);
    return r * w.next() * f(r * t);
  };
  const auto r = detail::lattice_sum(term, false, 1.0 - ctx.q(), ctx);
  if (!r.converged) throw ConvergenceError("fractional_integral: lattice sum did not converge");
  return std::pow(t, alpha) * r.value;
}

/// One term c * t^alpha of a generalized power sum.
struct PowerTerm {
  double coef;
  double alpha;
};

/// (f * t^{beta-1})(t) = sum_i c_i B_q(alpha_i + 1, beta) t^{alpha_i + beta}.
inline double q_convolution(const std::vector<PowerTerm>& f, double beta, double t,
                            const QContext& ctx) {
  if (!(beta > 0.0)) throw DomainError("q_convolution: beta must be positive");
  double sum = 0.0;
  for (const auto& p : f) {
    if (!(p.alpha > -1.0)) throw DomainError("q_convolution: exponents must exceed -1");
    sum += p.coef * q_beta(p.alpha + 1.0, beta, ctx) * std::pow(t, p.alpha + beta);
  }
  return sum;
}

}  // namespace qlap
