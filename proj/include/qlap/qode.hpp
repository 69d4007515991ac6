#pragma once

/**
 * @file qode.hpp
 * @brief Constant-coefficient q-difference equations of order 1 and 2,
 *        solved through the first-kind transform and table inversion.
 *
 * The equation is D_q^n y = sum_{i<n} c_i D_q^i y + rhs(t) with
 * D_q^i y(0) = init[i].
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "qcalc.hpp"
#include "qlaplace.hpp"
#include "sexpr.hpp"
#include "time_expr.hpp"

namespace qlap {

struct QodeSolution {
  TimeExpr y;
  /// Human-readable s-domain algebra, one step per line.
  std::vector<std::string> trace;
  /// Max |D^n y - sum c_i D^i y - rhs| / scale over the check points.
  double max_residual = 0.0;
  std::vector<double> check_points;
};

namespace detail {

using cplx = std::complex<double>;
/// Ascending coefficients.
using Poly = std::vector<double>;

/// num(s) / (lead * prod (s - r)).
struct RationalPiece {
  Poly num;
  double lead = 1.0;
  std::vector<cplx> roots;
};

inline cplx poly_eval(const Poly& p, cplx s) {
  cplx v = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) v = v * s + p[i];
  return v;
}

inline void poly_trim(Poly& p) {
  double top = 0.0;
  for (double c : p) top = std::max(top, std::abs(c));
  while (!p.empty() && std::abs(p.back()) <= 1e-13 * top) p.pop_back();
  if (top == 0.0) p.clear();
}

/// p / (s - r) for real r, or p / (s^2 - 2 Re r s + |r|^2) for complex r;
/// the remainder is discarded.
inline Poly poly_deflate(const Poly& p, cplx r) {
  Poly d;
  if (r.imag() == 0.0) d = {-r.real(), 1.0};
  else d = {std::norm(r), -2.0 * r.real(), 1.0};
  if (p.size() < d.size()) return {};
  Poly rem = p;
  Poly quo(p.size() - d.size() + 1, 0.0);
  for (std::size_t k = quo.size(); k-- > 0;) {
    quo[k] = rem[k + d.size() - 1];
    for (std::size_t j = 0; j < d.size(); ++j) rem[k + j] -= quo[k] * d[j];
  }
  return quo;
}

/// Real coefficients of prod (s - r) over a conjugate-closed root list.
inline Poly poly_from_roots(const std::vector<cplx>& roots) {
  std::vector<cplx> c{1.0};
  for (const cplx& r : roots) {
    std::vector<cplx> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c = std::move(next);
  }
  Poly out;
  for (const cplx& v : c) out.push_back(v.real());
  return out;
}

inline std::vector<cplx> quadratic_roots(double b, double c) {
  // s^2 + b s + c
  const double disc = b * b - 4.0 * c;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    const double r1 = -0.5 * (b + std::copysign(sq, b == 0.0 ? 1.0 : b));
    const double r2 = r1 == 0.0 ? -b - r1 : c / r1;
    return {r1, r2};
  }
  const double im = 0.5 * std::sqrt(-disc);
  return {cplx(-0.5 * b, im), cplx(-0.5 * b, -im)};
}

inline std::string poly_string(const Poly& p) {
  if (p.empty()) return "0";
  std::string out;
  for (std::size_t i = p.size(); i-- > 0;) {
    const double c = p[i];
    if (c == 0.0) continue;
    const bool neg = c < 0.0;
    out += out.empty() ? (neg ? "-" : "") : (neg ? " - " : " + ");
    const double m = std::abs(c);
    std::string mono = i == 0 ? "" : (i == 1 ? "s" : "s^" + std::to_string(i));
    if (mono.empty())
      out += format_number(m);
    else
      out += (m == 1.0 ? "" : format_number(m) + "*") + mono;
  }
  return out.empty() ? "0" : out;
}

inline std::string piece_string(const RationalPiece& p) {
  std::string den = p.lead == 1.0 ? "" : format_number(p.lead) + "*";
  std::vector<cplx> rs = p.roots;
  std::string factors;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const cplx r = rs[i];
    if (r.imag() < 0.0) continue;
    std::string f;
    if (r.imag() > 0.0) {
      f = "(" + poly_string(poly_from_roots({r, std::conj(r)})) + ")";
    } else if (r.real() == 0.0) {
      f = "s";
    } else {
      f = "(s " + std::string(r.real() < 0 ? "+ " : "- ") + format_number(std::abs(r.real())) + ")";
    }
    factors += (factors.empty() ? "" : "*") + f;
  }
  if (factors.empty()) factors = "1";
  return "(" + poly_string(p.num) + ")/(" + den + factors + ")";
}

/// Real/complex roots of a first-kind rational table term.
inline RationalPiece piece_from_term(const RationalTerm& t, const std::vector<cplx>& extra_roots) {
  if (std::floor(t.s_den_power) != t.s_den_power || t.s_den_power < 0)
    throw NoInversionPattern("right-hand side has a fractional power of s: " + print(t));
  RationalPiece p;
  p.num.assign(static_cast<std::size_t>(t.s_num_power) + 1, 0.0);
  p.num.back() = t.coef;
  p.roots = extra_roots;
  for (int i = 0; i < static_cast<int>(t.s_den_power); ++i) p.roots.emplace_back(0.0);
  for (const auto& l : t.lin) {
    p.lead *= l.beta;
    p.roots.emplace_back(l.gamma / l.beta);
  }
  for (const auto& qf : t.quad) {
    p.lead *= qf.beta * qf.beta;
    for (const cplx& r : quadratic_roots(0.0, qf.c / (qf.beta * qf.beta))) p.roots.push_back(r);
  }
  return p;
}

/// Removes roots shared by numerator and denominator.
inline void cancel_common(RationalPiece& p) {
  bool changed = true;
  while (changed && !p.num.empty()) {
    changed = false;
    double scale = 0.0;
    for (double c : p.num) scale = std::max(scale, std::abs(c));
    for (std::size_t i = 0; i < p.roots.size(); ++i) {
      const cplx r = p.roots[i];
      if (r.imag() < 0.0) continue;
      const double mag = std::max(1.0, std::pow(std::abs(r), static_cast<double>(p.num.size() - 1)));
      if (std::abs(poly_eval(p.num, r)) > 1e-12 * scale * mag) continue;
      p.num = poly_deflate(p.num, r);
      poly_trim(p.num);
      if (r.imag() > 0.0) {
        auto conj = std::find_if(p.roots.begin(), p.roots.end(), [&](const cplx& x) {
          return std::abs(x - std::conj(r)) <= 1e-12 * std::abs(r);
        });
        const std::size_t j = static_cast<std::size_t>(conj - p.roots.begin());
        p.roots.erase(p.roots.begin() + static_cast<long>(std::max(i, j)));
        p.roots.erase(p.roots.begin() + static_cast<long>(std::min(i, j)));
      } else {
        p.roots.erase(p.roots.begin() + static_cast<long>(i));
      }
      changed = true;
      break;
    }
  }
}

/// Partial fractions of one piece, inverted through the first-kind table.
inline TimeExpr invert_piece(RationalPiece p, const QContext& ctx) {
  poly_trim(p.num);
  cancel_common(p);
  if (p.num.empty()) return {};
  if (p.num.size() > p.roots.size())
    throw NoInversionPattern("improper rational function " + piece_string(p));

  std::vector<cplx> nonzero;
  unsigned m = 0;
  for (const cplx& r : p.roots) {
    if (std::abs(r) < 1e-14)
      ++m;
    else
      nonzero.push_back(r);
  }
  for (std::size_t i = 0; i < nonzero.size(); ++i)
    for (std::size_t j = i + 1; j < nonzero.size(); ++j)
      if (std::abs(nonzero[i] - nonzero[j]) <= 1e-9 * std::abs(nonzero[i]))
        throw NoInversionPattern("repeated root in " + piece_string(p));

  TimeExpr out;
  if (m > 0) {
    // Laurent coefficients at 0: num / (lead * G) as a power series in s.
    Poly g = poly_from_roots(nonzero);
    for (double& c : g) c *= p.lead;
    std::vector<double> h(m, 0.0);
    for (unsigned k = 0; k < m; ++k) {
      double v = k < p.num.size() ? p.num[k] : 0.0;
      for (unsigned j = 1; j <= k && j < g.size(); ++j) v -= g[j] * h[k - j];
      h[k] = v / g[0];
    }
    // h_k / s^{m-k} -> h_k t^{m-k-1} / [m-k-1]!
    for (unsigned k = 0; k < m; ++k) {
      const unsigned pw = m - k - 1;
      out.atoms.push_back(make_atom(h[k] / q_factorial(pw, ctx), pw));
    }
  }

  auto residue = [&](const cplx& r) {
    cplx d = p.lead * std::pow(r, static_cast<double>(m));
    for (const cplx& x : nonzero)
      if (x != r) d *= r - x;
    return poly_eval(p.num, r) / d;
  };

  std::vector<std::pair<double, double>> reals;  // (root, residue)
  for (const cplx& r : nonzero) {
    if (r.imag() < 0.0) continue;
    const cplx res = residue(r);
    if (r.imag() > 0.0) {
      if (std::abs(r.real()) > 1e-12 * std::abs(r))
        throw NoInversionPattern("damped oscillation (s - " + format_number(r.real()) +
                                 ")^2 + ... has no table entry in " + piece_string(p));
      const double w = r.imag();
      out.atoms.push_back(make_atom(2.0 * res.real(), 0.0, Base::CosQ, w));
      out.atoms.push_back(make_atom(-2.0 * res.imag(), 0.0, Base::SinQ, w));
    } else {
      reals.emplace_back(r.real(), res.real());
    }
  }
  std::vector<bool> used(reals.size(), false);
  for (std::size_t i = 0; i < reals.size(); ++i) {
    if (used[i]) continue;
    const double r = reals[i].first;
    std::size_t j = i + 1;
    while (j < reals.size() && (used[j] || std::abs(reals[j].first + r) > 1e-12 * std::abs(r))) ++j;
    if (j < reals.size()) {
      // A/(s-r) + B/(s+r) = ((A+B) s + (A-B) r)/(s^2 - r^2)
      used[j] = true;
      const double rp = std::abs(r);
      const double a = r > 0 ? reals[i].second : reals[j].second;
      const double b = r > 0 ? reals[j].second : reals[i].second;
      out.atoms.push_back(make_atom(a + b, 0.0, Base::CoshQ, rp));
      out.atoms.push_back(make_atom(a - b, 0.0, Base::SinhQ, rp));
    } else {
      out.atoms.push_back(make_atom(reals[i].second, 0.0, Base::EqExp, r));
    }
  }
  return out;
}

inline std::string equation_string(unsigned order, const std::vector<double>& c, const TimeExpr& rhs) {
  std::string out = order == 1 ? "D_q y =" : "D_q^2 y =";
  std::string sum;
  for (unsigned i = order; i-- > 0;) {
    if (c[i] == 0.0) continue;
    const std::string y = i == 0 ? "y" : (i == 1 ? "D_q y" : "D_q^" + std::to_string(i) + " y");
    sum += (sum.empty() ? (c[i] < 0 ? "-" : "") : (c[i] < 0 ? " - " : " + "));
    sum += format_number(std::abs(c[i])) + "*" + y;
  }
  if (!rhs.atoms.empty()) sum += (sum.empty() ? "" : " + ") + std::string("(") + print(rhs) + ")";
  return out + " " + (sum.empty() ? "0" : sum);
}

}  // namespace detail

/// Solves D_q^n y = sum_{i<n} coeffs[i] D_q^i y + rhs with D_q^i y(0) = init[i],
/// n in {1, 2}, through the first-kind transform.
inline QodeSolution solve_linear_qode(unsigned order, const std::vector<double>& coeffs, const TimeExpr& rhs,
                                      const std::vector<double>& init, const QContext& ctx) {
  using detail::cplx;
  if (order != 1 && order != 2) throw DomainError("solve_linear_qode: order must be 1 or 2");
  if (coeffs.size() != order)
    throw ArityError("solve_linear_qode: expected " + std::to_string(order) + " coefficients");
  if (init.size() != order)
    throw ArityError("solve_linear_qode: expected " + std::to_string(order) + " initial values");

  QodeSolution sol;
  sol.trace.push_back(detail::equation_string(order, coeffs, rhs));

  // p(s) Y = P_init(s) + R(s), p(s) = s^n - sum c_i s^i.
  detail::Poly p(order + 1, 0.0);
  p[order] = 1.0;
  for (unsigned i = 0; i < order; ++i) p[i] -= coeffs[i];
  detail::Poly pinit(order, 0.0);
  for (unsigned i = 0; i < order; ++i) pinit[order - 1 - i] += init[i];
  for (unsigned i = 0; i < order; ++i)
    for (unsigned j = 0; j < i; ++j) pinit[i - 1 - j] -= coeffs[i] * init[j];

  std::vector<cplx> proots;
  if (order == 1)
    proots.push_back(p[0] == 0.0 ? 0.0 : -p[0]);
  else
    proots = detail::quadratic_roots(p[1], p[0]);

  const SExpr R = transform_symbolic(rhs, TransformKind::First, ctx);
  if (!R.series.empty() || !R.kernels.empty())
    throw NoInversionPattern("transform of the right-hand side is not rational: " + print(R));
  sol.trace.push_back("transform: (" + detail::poly_string(p) + ") Y(s) = " + detail::poly_string(pinit) +
                      " + R(s), R(s) = " + print(R));

  std::vector<detail::RationalPiece> pieces;
  pieces.push_back({pinit, 1.0, proots});
  for (const auto& t : R.rational) pieces.push_back(detail::piece_from_term(t, proots));

  std::string ys;
  for (const auto& pc : pieces) ys += (ys.empty() ? "" : " + ") + detail::piece_string(pc);
  sol.trace.push_back("Y(s) = " + ys);

  TimeExpr y;
  for (const auto& pc : pieces) y = y + detail::invert_piece(pc, ctx);
  sol.y = canonicalize(y);
  sol.trace.push_back("y(t) = " + print(sol.y));

  // Residual on the lattice t = q^k, k = -2..8, with numeric q-differences.
  // Points where y or the rhs sits on an e_q pole are skipped.
  auto fy = [&](double t) { return evaluate(sol.y, t, ctx); };
  auto fr = [&](double t) { return evaluate(rhs, t, ctx); };
  for (int k = -2; k <= 8; ++k) {
    const double t = std::pow(ctx.q(), k);
    try {
      double res = q_derivative_n(fy, t, order, ctx);
      double scale = std::max(1.0, std::abs(res));
      for (unsigned i = 0; i < order; ++i) {
        const double d = i == 0 ? fy(t) : q_derivative_n(fy, t, i, ctx);
        res -= coeffs[i] * d;
        scale = std::max(scale, std::abs(coeffs[i] * d));
      }
      const double r = fr(t);
      res -= r;
      scale = std::max(scale, std::abs(r));
      sol.check_points.push_back(t);
      sol.max_residual = std::max(sol.max_residual, std::abs(res) / scale);
    } catch (const PoleError&) {
    }
  }
  if (sol.check_points.empty())
    sol.max_residual = std::numeric_limits<double>::infinity();
  const auto got = initial_values(sol.y, order, ctx);
  for (unsigned i = 0; i < order; ++i)
    sol.max_residual =
        std::max(sol.max_residual, std::abs(got[i] - init[i]) / std::max(1.0, std::abs(init[i])));
  return sol;
}

}  // namespace qlap
