#pragma once

/**
 * @file sexpr.hpp
 * @brief s-domain closed forms: factored rational terms, inverse-power
 *        series (possibly formal) and Heaviside kernel terms.
 */

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qcore.hpp"
#include "qspecial.hpp"
#include "time_expr.hpp"

namespace qlap {

/// (beta s - gamma).
struct LinearFactor {
  double beta = 1.0;
  double gamma = 0.0;
};

/// ((beta s)^2 + c).
struct QuadraticFactor {
  double beta = 1.0;
  double c = 0.0;
};

/// coef * s^num / (s^den * prod linear * prod quadratic).
struct RationalTerm {
  double coef = 1.0;
  int s_num_power = 0;
  double s_den_power = 0.0;
  std::vector<LinearFactor> lin;
  std::vector<QuadraticFactor> quad;
};

/// coef * s^{-extra} * sum_{m>=0} c_m (scale s)^{-(shift + m)}.
///
/// Coefficients come from `log_coef(m)` as {log|c_m|, sign}; sign 0 marks a
/// vanishing coefficient.
struct InvPowerSeries {
  double coef = 1.0;
  double extra = 0.0;
  double scale = 1.0;
  double shift = 1.0;
  std::function<std::pair<double, int>(unsigned)> log_coef;
  bool asymptotic = false;
  std::string label;
};

/// coef * E_q(-q a s) / s^p, the Heaviside image.
struct KernelTerm {
  double coef = 1.0;
  double a = 0.0;
  double s_den_power = 1.0;
};

/// Where a closed form may be evaluated: s > s_min, and for each anchor a,
/// (1-q) a s must be an integer power of q (the step sits on the lattice).
struct Validity {
  double s_min = 0.0;
  std::vector<double> anchors;
};

struct SExpr {
  std::vector<RationalTerm> rational;
  std::vector<InvPowerSeries> series;
  std::vector<KernelTerm> kernels;
  Validity validity;

  bool has_asymptotic() const {
    return std::any_of(series.begin(), series.end(), [](const auto& s) { return s.asymptotic; });
  }
};

inline SExpr operator+(SExpr a, const SExpr& b) {
  a.rational.insert(a.rational.end(), b.rational.begin(), b.rational.end());
  a.series.insert(a.series.end(), b.series.begin(), b.series.end());
  a.kernels.insert(a.kernels.end(), b.kernels.begin(), b.kernels.end());
  a.validity.s_min = std::max(a.validity.s_min, b.validity.s_min);
  a.validity.anchors.insert(a.validity.anchors.end(), b.validity.anchors.begin(),
                            b.validity.anchors.end());
  return a;
}

inline SExpr scale(SExpr e, double c) {
  for (auto& t : e.rational) t.coef *= c;
  for (auto& t : e.series) t.coef *= c;
  for (auto& t : e.kernels) t.coef *= c;
  return e;
}

/// Multiplies by s^k (k may be negative or fractional).
inline SExpr times_s_power(SExpr e, double k) {
  for (auto& t : e.rational) {
    if (std::floor(k) == k && k > 0) {
      // Cancel against s^den first so the term stays a proper quotient where possible.
      const double cancel = std::min(k, std::max(0.0, std::floor(t.s_den_power)));
      t.s_den_power -= cancel;
      t.s_num_power += static_cast<int>(k - cancel);
    } else {
      t.s_den_power -= k;
    }
  }
  for (auto& t : e.series) t.extra -= k;
  for (auto& t : e.kernels) t.s_den_power -= k;
  return e;
}

/// Substitutes s -> q^k s exactly.
inline SExpr rescale(SExpr e, int k, const QContext& ctx) {
  const double f = std::pow(ctx.q(), k);
  for (auto& t : e.rational) {
    t.coef *= std::pow(f, t.s_num_power - t.s_den_power);
    for (auto& l : t.lin) l.beta *= f;
    for (auto& qf : t.quad) qf.beta *= f;
  }
  for (auto& t : e.series) {
    t.coef *= std::pow(f, -t.extra);
    t.scale *= f;
  }
  for (auto& t : e.kernels) {
    t.coef *= std::pow(f, -t.s_den_power);
    t.a *= f;
  }
  e.validity.s_min /= f;
  return e;
}

inline SExpr rational_sexpr(RationalTerm t, double s_min = 0.0) {
  SExpr e;
  e.rational.push_back(std::move(t));
  e.validity.s_min = s_min;
  return e;
}

/// 0 < s is inside the validity region.
inline bool valid_at(const SExpr& e, double s, const QContext& ctx) {
  if (!(s > e.validity.s_min)) return false;
  const double lq = std::log(ctx.q());
  for (double a : e.validity.anchors) {
    if (a == 0.0) continue;
    const double m = std::log((1.0 - ctx.q()) * a * s) / lq;
    if (std::abs(m - std::round(m)) > 1e-9) return false;
  }
  return true;
}

inline double evaluate(const RationalTerm& t, double s) {
  double v = t.coef * std::pow(s, t.s_num_power - t.s_den_power);
  for (const auto& l : t.lin) v /= l.beta * s - l.gamma;
  for (const auto& q : t.quad) v /= (q.beta * s) * (q.beta * s) + q.c;
  return v;
}

/// log|term_m| for m = 0 .. count-1, with the outer coefficient included.
inline std::vector<double> term_log_magnitudes(const InvPowerSeries& p, double s, unsigned count) {
  std::vector<double> out;
  const double ls = std::log(p.scale * s);
  const double base = std::log(std::abs(p.coef)) - p.extra * std::log(s);
  for (unsigned m = 0; m < count; ++m) {
    const auto [lc, sign] = p.log_coef(m);
    out.push_back(sign == 0 ? -std::numeric_limits<double>::infinity()
                            : base + lc - (p.shift + m) * ls);
  }
  return out;
}

/// Partial sums S_0 .. S_{count-1}; the only way to inspect a formal series.
inline std::vector<double> partial_sums(const InvPowerSeries& p, double s, unsigned count) {
  std::vector<double> out;
  const double ls = std::log(p.scale * s);
  const double pre = p.coef * std::pow(s, -p.extra);
  double sum = 0.0;
  for (unsigned m = 0; m < count; ++m) {
    const auto [lc, sign] = p.log_coef(m);
    if (sign != 0) sum += sign * std::exp(lc - (p.shift + m) * ls);
    out.push_back(pre * sum);
  }
  return out;
}

/// Sums a convergent series; refuses formal ones.
inline double evaluate(const InvPowerSeries& p, double s, const QContext& ctx) {
  if (p.asymptotic)
    throw AsymptoticSeriesError("refusing to sum the formal series " + p.label +
                                " (its terms eventually grow for every s)");
  const double ls = std::log(p.scale * s);
  CompensatedSum sum;
  double prev_log = std::numeric_limits<double>::infinity();
  int small = 0;
  int growing = 0;
  for (std::size_t m = 0; m < ctx.max_terms(); ++m) {
    const auto [lc, sign] = p.log_coef(static_cast<unsigned>(m));
    if (sign == 0) continue;
    const double lt = lc - (p.shift + m) * ls;
    const double term = sign * std::exp(lt);
    sum.add(term);
    if (std::abs(term) <= ctx.tol() * std::abs(sum.value())) {
      if (++small >= 3) return p.coef * std::pow(s, -p.extra) * sum.value();
    } else {
      small = 0;
    }
    growing = (m > 64 && lt > prev_log) ? growing + 1 : 0;
    if (growing > 32 || !std::isfinite(term))
      throw ConvergenceError("series " + p.label + " diverges at s = " + std::to_string(s));
    prev_log = lt;
  }
  throw ConvergenceError("series " + p.label + " reached the term cap");
}

inline double evaluate(const KernelTerm& k, double s, const QContext& ctx) {
  return k.coef * Eq_exp(-ctx.q() * k.a * s, ctx).value / std::pow(s, k.s_den_power);
}

/// F(s). Validity is not enforced here; see valid_at.
inline double evaluate(const SExpr& e, double s, const QContext& ctx) {
  if (!(s > 0.0)) throw DomainError("evaluate: s must be positive");
  double v = 0.0;
  for (const auto& t : e.rational) v += evaluate(t, s);
  for (const auto& t : e.series) v += evaluate(t, s, ctx);
  for (const auto& t : e.kernels) v += evaluate(t, s, ctx);
  return v;
}

namespace detail {

inline std::string scaled_s(double beta) {
  return beta == 1.0 ? std::string("s") : format_number(beta) + "*s";
}

inline std::string s_pow(double p) {
  if (p == 1.0) return "s";
  return "s^" + format_number(p);
}

}  // namespace detail

inline std::string print(const RationalTerm& t) {
  std::string num = format_number(t.coef);
  if (t.s_num_power > 0) {
    const std::string sp = detail::s_pow(t.s_num_power);
    num = t.coef == 1.0 ? sp : num + "*" + sp;
  }
  std::vector<std::string> den;
  if (t.s_den_power != 0.0) den.push_back(detail::s_pow(t.s_den_power));
  for (const auto& l : t.lin) {
    const std::string s = detail::scaled_s(l.beta);
    if (l.gamma == 0.0)
      den.push_back(s);
    else
      den.push_back("(" + s + (l.gamma < 0 ? " + " : " - ") + format_number(std::abs(l.gamma)) + ")");
  }
  for (const auto& q : t.quad) {
    const std::string sq = q.beta == 1.0 ? "s^2" : "(" + detail::scaled_s(q.beta) + ")^2";
    den.push_back("(" + sq + (q.c < 0 ? " - " : " + ") + format_number(std::abs(q.c)) + ")");
  }
  if (den.empty()) return num;
  std::string d;
  for (std::size_t i = 0; i < den.size(); ++i) d += (i ? "*" : "") + den[i];
  if (den.size() > 1 || den.front().find('*') != std::string::npos) d = "(" + d + ")";
  return num + "/" + d;
}

inline std::string print(const InvPowerSeries& p) {
  std::string out = format_number(p.coef);
  if (p.extra != 0.0) out += "*s^" + format_number(-p.extra);
  out += "*sum_{m>=0} c_m/(" + detail::scaled_s(p.scale) + ")^(m+" + format_number(p.shift) + ")";
  out += ", c_m = " + p.label;
  if (p.asymptotic) out += " [asymptotic]";
  return out;
}

inline std::string print(const KernelTerm& k) {
  return format_number(k.coef) + "*E_q(-" + format_number(k.a) + "*q*s)/" + detail::s_pow(k.s_den_power);
}

inline std::string print(const SExpr& e) {
  std::vector<std::string> parts;
  for (const auto& t : e.rational) parts.push_back(print(t));
  for (const auto& t : e.series) parts.push_back(print(t));
  for (const auto& t : e.kernels) parts.push_back(print(t));
  if (parts.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i == 0) {
      out = parts[i];
    } else if (parts[i].front() == '-') {
      out += " - " + parts[i].substr(1);
    } else {
      out += " + " + parts[i];
    }
  }
  return out;
}

inline std::string print_validity(const SExpr& e) {
  std::string out = "s > " + format_number(e.validity.s_min);
  for (double a : e.validity.anchors)
    if (a != 0.0) out += ", (1-q)*" + format_number(a) + "*s in q^Z";
  return out;
}

}  // namespace qlap
