// qlaplace: command-line front end for the q-Laplace library.
//
// Exit codes: 0 all checks passed, 1 a check or computation failed,
// 2 usage error (bad flags, unparsable expression, s outside validity).

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qlap/qexpr.hpp"
#include "qlap/qlaplace.hpp"
#include "qlap/qode.hpp"
#include "qlap/verify.hpp"
#include "report.hpp"

namespace {

using namespace qlap;
using cli::RunReport;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num15(double v) {
  if (std::isnan(v)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

TransformKind to_kind(int k) { return k == 1 ? TransformKind::First : TransformKind::Second; }

std::size_t max_terms_from_env() {
  const char* env = std::getenv("QLAPLACE_MAX_TERMS");
  if (env == nullptr || *env == '\0') return QContext(0.5).max_terms();
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0' || v == 0) throw UsageError("QLAPLACE_MAX_TERMS must be a positive integer");
  return static_cast<std::size_t>(v);
}

QContext make_ctx(double q, std::size_t max_terms) {
  if (!(q > 0.0 && q < 1.0)) throw UsageError("--q must lie in (0, 1)");
  return QContext(q).with_max_terms(max_terms);
}

TimeExpr parse_or_usage(const std::string& text) {
  try {
    return parse_expr(text);
  } catch (const qlap::ParseError& e) {
    throw UsageError(std::string("cannot parse \"") + text + "\": " + e.what());
  } catch (const UnsupportedShape& e) {
    throw UsageError(std::string("cannot normalize \"") + text + "\": " + e.what());
  } catch (const DomainError& e) {
    throw UsageError(std::string("cannot normalize \"") + text + "\": " + e.what());
  }
}

int finish(const RunReport& r, bool json, bool failed_extra = false) {
  if (json) std::cout << cli::to_json(r).dump(2) << "\n";
  return (r.failed() > 0 || failed_extra) ? 1 : 0;
}

struct TransformArgs {
  std::string expr;
  double q = 0.5;
  int kind = 1;
  double s = 1.0;
  double tol = 1e-7;
  bool symbolic = false;
  bool numeric = false;
  bool both = false;
};

int cmd_transform(const TransformArgs& a, bool json, std::size_t max_terms) {
  const QContext ctx = make_ctx(a.q, max_terms);
  if (!(a.s > 0.0)) throw UsageError("--s must be positive");
  const TransformKind kind = to_kind(a.kind);
  const TimeExpr f = parse_or_usage(a.expr);
  bool want_sym = a.symbolic || a.both;
  bool want_num = a.numeric || a.both;
  if (!want_sym && !want_num) want_sym = want_num = true;

  RunReport r;
  r.mode = "TRANSFORM";
  r.q = a.q;
  r.kind = a.kind;
  r.tol = a.tol;
  r.inputs = {{"expr", a.expr}, {"normalized", print(f)}, {"s", a.s}};

  std::optional<double> sym;
  std::optional<double> numv;
  bool failed = false;
  std::ostringstream out;
  out << "L_" << kind_name(kind) << "(" << print(f) << ") at q = " << num15(a.q) << ", s = " << num15(a.s) << "\n";

  if (want_sym) {
    SExpr F;
    try {
      F = transform_symbolic(f, kind, ctx);
    } catch (const UnsupportedAtom& e) {
      if (!want_num) throw;
      out << "symbolic: unavailable (" << e.what() << ")\n";
      want_sym = false;
    }
    if (want_sym) {
      out << "symbolic: " << print(F) << "\n";
      out << "validity: " << print_validity(F) << "\n";
      r.extra["symbolic"] = print(F);
      r.extra["validity"] = print_validity(F);
      if (!valid_at(F, a.s, ctx))
        throw UsageError("s = " + num15(a.s) + " is outside the validity region " + print_validity(F));
      try {
        sym = evaluate(F, a.s, ctx);
        out << "symbolic value: " << num15(*sym) << "\n";
      } catch (const AsymptoticSeriesError& e) {
        out << "symbolic value: refused (" << e.what() << ")\n";
        r.extra["symbolic_refused"] = e.what();
        failed = true;
      }
    }
  }
  if (want_num) {
    const LatticeSum L = transform_numeric(f, a.s, kind, ctx);
    numv = L.value;
    out << "numeric value: " << num15(L.value) << " (tail bound " << num15(L.tail_bound) << ", "
        << (L.pos_terms + L.neg_terms) << " terms" << (L.converged ? "" : ", NOT converged") << ")\n";
    r.extra["numeric_converged"] = L.converged;
    r.extra["tail_bound"] = cli::number(L.tail_bound);
    if (!L.converged) failed = true;
  }

  CheckRecord rec;
  rec.description = std::string("L_") + kind_name(kind) + "(" + print(f) + ")(" + num15(a.s) + ")";
  rec.tol = a.tol;
  rec.expected = sym.value_or(std::numeric_limits<double>::quiet_NaN());
  rec.actual = numv.value_or(sym.value_or(std::numeric_limits<double>::quiet_NaN()));
  if (sym && numv) {
    rec.rel_err = relative_error(*numv, *sym);
    rec.pass = rec.rel_err <= a.tol;
    out << "rel_err: " << num15(rec.rel_err) << " (tol " << num15(a.tol) << ") " << (rec.pass ? "PASS" : "FAIL")
        << "\n";
  } else {
    if (!numv) rec.actual = rec.expected;
    rec.rel_err = 0.0;
    rec.pass = !failed;
  }
  r.results.push_back(rec);
  if (!json) std::cout << out.str();
  return finish(r, json, failed);
}

int cmd_verify(const std::string& suite, const std::vector<double>& qs, std::optional<double> tol, bool json) {
  for (double q : qs)
    if (!(q > 0.0 && q < 1.0)) throw UsageError("--q values must lie in (0, 1)");
  RunReport r;
  r.mode = "VERIFY";
  r.q = qs.empty() ? std::vector<double>{0.3, 0.5, 0.8} : qs;
  r.kind = nullptr;
  r.tol = tol.value_or(0.0);
  r.inputs = {{"suite", suite}, {"seed", kVerifySeed}};
  r.results = run_suite(suite, qs, tol);
  if (!json) {
    for (const auto& c : r.results)
      if (!c.pass)
        std::cout << "FAIL " << c.description << ": expected " << num15(c.expected) << ", got " << num15(c.actual)
                  << ", rel_err " << num15(c.rel_err) << " > " << num15(c.tol) << "\n";
    std::cout << "suite " << suite << ": " << r.passed() << " passed, " << r.failed() << " failed\n";
  }
  return finish(r, json);
}

struct SweepArgs {
  std::string expr;
  std::string param = "s";
  double from = 1.0;
  double to = 1.0;
  int steps = 1;
  std::string out;
  double q = 0.5;
  int kind = 1;
  double s = 1.0;
  double tol = 1e-7;
};

int cmd_sweep(const SweepArgs& a, bool json, std::size_t max_terms) {
  if (a.steps < 1) throw UsageError("--steps must be at least 1");
  if (a.param == "q") {
    if (!(a.from > 0.0 && a.from < 1.0 && a.to > 0.0 && a.to < 1.0))
      throw UsageError("a q sweep must stay inside (0, 1)");
  } else if (!(a.from > 0.0 && a.to > 0.0)) {
    throw UsageError("an s sweep needs positive endpoints");
  }
  make_ctx(a.q, max_terms);
  const TimeExpr f = parse_or_usage(a.expr);
  const TransformKind kind = to_kind(a.kind);

  RunReport r;
  r.mode = "SWEEP";
  r.q = a.q;
  r.kind = a.kind;
  r.tol = a.tol;
  r.inputs = {{"expr", a.expr}, {"param", a.param}, {"from", a.from}, {"to", a.to}, {"steps", a.steps}};

  std::ostringstream csv;
  csv << "param,value,numeric,symbolic,rel_err\n";
  for (int i = 0; i < a.steps; ++i) {
    const double v = a.steps == 1 ? a.from : a.from + (a.to - a.from) * i / (a.steps - 1);
    const double q = a.param == "q" ? v : a.q;
    const double s = a.param == "q" ? a.s : v;
    const QContext ctx = QContext(q).with_max_terms(max_terms);
    const double numeric = transform_numeric(f, s, kind, ctx).value;
    double symbolic = std::numeric_limits<double>::quiet_NaN();
    try {
      const SExpr F = transform_symbolic(f, kind, ctx);
      if (valid_at(F, s, ctx)) symbolic = evaluate(F, s, ctx);
    } catch (const Error&) {
    }
    const double rel = std::isnan(symbolic) ? symbolic : relative_error(numeric, symbolic);
    csv << a.param << "," << num15(v) << "," << num15(numeric) << "," << num15(symbolic) << "," << num15(rel) << "\n";
    if (!std::isnan(symbolic)) {
      CheckRecord rec;
      rec.description = a.param + " = " + num15(v);
      rec.expected = symbolic;
      rec.actual = numeric;
      rec.rel_err = rel;
      rec.tol = a.tol;
      rec.pass = rel <= a.tol;
      r.results.push_back(rec);
    }
  }
  if (a.out.empty() || a.out == "-") {
    if (!json) std::cout << csv.str();
  } else {
    std::ofstream file(a.out, std::ios::binary);
    if (!file) throw UsageError("cannot write " + a.out);
    file << csv.str();
    if (!json) std::cout << "wrote " << a.steps << " rows to " << a.out << "\n";
  }
  return finish(r, json);
}

struct SolveArgs {
  unsigned order = 1;
  std::vector<double> coeffs;
  std::string rhs = "0";
  std::vector<double> init;
  double q = 0.5;
  double tol = 1e-8;
};

int cmd_solve(const SolveArgs& a, bool json, std::size_t max_terms) {
  const QContext ctx = make_ctx(a.q, max_terms);
  if (a.order != 1 && a.order != 2) throw UsageError("--order must be 1 or 2");
  if (a.coeffs.size() != a.order) throw UsageError("--coeffs needs exactly --order values");
  if (a.init.size() != a.order) throw UsageError("--init needs exactly --order values");
  const TimeExpr rhs = a.rhs == "0" ? TimeExpr{} : parse_or_usage(a.rhs);

  RunReport r;
  r.mode = "SOLVE";
  r.q = a.q;
  r.kind = 1;
  r.tol = a.tol;
  r.inputs = {{"order", a.order}, {"coeffs", a.coeffs}, {"rhs", a.rhs}, {"init", a.init}};
  QodeSolution sol;
  try {
    sol = solve_linear_qode(a.order, a.coeffs, rhs, a.init, ctx);
  } catch (const NoInversionPattern& e) {
    r.extra["error"] = e.what();
    if (json)
      std::cout << cli::to_json(r).dump(2) << "\n";
    else
      std::cout << "no inversion pattern: " << e.what() << "\n";
    return 1;
  }
  CheckRecord rec;
  rec.description = "lattice residual of y = " + print(sol.y);
  rec.expected = 0.0;
  rec.actual = sol.max_residual;
  rec.rel_err = sol.max_residual;
  rec.tol = a.tol;
  rec.pass = sol.max_residual <= a.tol;
  r.results.push_back(rec);
  r.extra["trace"] = sol.trace;
  r.extra["solution"] = print(sol.y);
  if (!json) {
    for (const auto& line : sol.trace) std::cout << line << "\n";
    std::cout << "max residual: " << num15(sol.max_residual) << " over " << sol.check_points.size()
              << " lattice points (tol " << num15(a.tol) << ") " << (rec.pass ? "PASS" : "FAIL") << "\n";
  }
  return finish(r, json);
}

int cmd_eval(const std::string& expr, double t, double q, bool json, std::size_t max_terms) {
  const QContext ctx = make_ctx(q, max_terms);
  if (!(t >= 0.0)) throw UsageError("--t must be nonnegative");
  const TimeExpr f = parse_or_usage(expr);
  const double v = evaluate(f, t, ctx);
  const double walk = evaluate(parse(expr), t, ctx);
  RunReport r;
  r.mode = "EVAL";
  r.q = q;
  r.kind = nullptr;
  r.tol = 1e-12;
  r.inputs = {{"expr", expr}, {"normalized", print(f)}, {"t", t}};
  CheckRecord rec;
  rec.description = "normalized vs tree-walk value of " + expr;
  rec.expected = walk;
  rec.actual = v;
  rec.rel_err = relative_error(v, walk);
  rec.tol = 1e-12;
  rec.pass = rec.rel_err <= rec.tol;
  r.results.push_back(rec);
  if (!json) std::cout << print(f) << " at t = " << num15(t) << ": " << num15(v) << "\n";
  return finish(r, json);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"q-Laplace transforms of the first and second kind"};
  app.require_subcommand(1);
  app.fallthrough();
  bool json = false;
  app.add_flag("--json", json, "Print the JSON run report instead of text");

  TransformArgs ta;
  auto* tr = app.add_subcommand("transform", "Transform an expression at one s");
  tr->add_option("expr", ta.expr, "Expression in t, e.g. \"sin_q(2*t)\"")->required();
  tr->add_option("--q", ta.q, "Deformation parameter in (0,1)")->capture_default_str();
  tr->add_option("--kind", ta.kind, "1 = first kind, 2 = second kind")->check(CLI::IsMember({1, 2}))->capture_default_str();
  tr->add_option("--s", ta.s, "Transform variable")->capture_default_str();
  tr->add_option("--tol", ta.tol, "Tolerance for --both")->capture_default_str();
  auto* fs = tr->add_flag("--symbolic", ta.symbolic, "Closed form only");
  auto* fn = tr->add_flag("--numeric", ta.numeric, "Lattice sum only");
  auto* fb = tr->add_flag("--both", ta.both, "Both, with their discrepancy (default)");
  fs->excludes(fn)->excludes(fb);
  fn->excludes(fb);

  std::string suite = "all";
  std::vector<double> vq;
  std::optional<double> vtol;
  auto* ve = app.add_subcommand("verify", "Run property grids against the lattice oracle");
  ve->add_option("--suite", suite, "core | first | second | theorems | all")
      ->check(CLI::IsMember(suite_names()))
      ->capture_default_str();
  ve->add_option("--q", vq, "q values (default 0.3,0.5,0.8)")->delimiter(',');
  ve->add_option("--tol", vtol, "Override every per-check tolerance");

  SweepArgs sa;
  auto* sw = app.add_subcommand("sweep", "Sweep q or s and write CSV");
  sw->add_option("expr", sa.expr, "Expression in t")->required();
  sw->add_option("--param", sa.param, "q or s")->check(CLI::IsMember({"q", "s"}))->capture_default_str();
  sw->add_option("--from", sa.from)->required();
  sw->add_option("--to", sa.to)->required();
  sw->add_option("--steps", sa.steps, "Number of rows")->capture_default_str();
  sw->add_option("--out", sa.out, "CSV path (default stdout)");
  sw->add_option("--q", sa.q, "Fixed q for an s sweep")->capture_default_str();
  sw->add_option("--s", sa.s, "Fixed s for a q sweep")->capture_default_str();
  sw->add_option("--kind", sa.kind)->check(CLI::IsMember({1, 2}))->capture_default_str();
  sw->add_option("--tol", sa.tol)->capture_default_str();

  SolveArgs so;
  auto* sl = app.add_subcommand("solve", "Solve D^n y = sum c_i D^i y + rhs, n <= 2");
  sl->add_option("--order", so.order)->required();
  sl->add_option("--coeffs", so.coeffs, "c_0[,c_1]")->delimiter(',')->required();
  sl->add_option("--rhs", so.rhs, "Right-hand side expression")->capture_default_str();
  sl->add_option("--init", so.init, "y(0)[,D_q y(0)]")->delimiter(',')->required();
  sl->add_option("--q", so.q)->capture_default_str();
  sl->add_option("--tol", so.tol, "Residual tolerance")->capture_default_str();

  std::string eexpr;
  double et = 0.0;
  double eq = 0.5;
  auto* ev = app.add_subcommand("eval", "Evaluate an expression at t");
  ev->add_option("expr", eexpr)->required();
  ev->add_option("--t", et)->required();
  ev->add_option("--q", eq)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::size_t max_terms = max_terms_from_env();
    if (tr->parsed()) return cmd_transform(ta, json, max_terms);
    if (ve->parsed()) return cmd_verify(suite, vq, vtol, json);
    if (sw->parsed()) return cmd_sweep(sa, json, max_terms);
    if (sl->parsed()) return cmd_solve(so, json, max_terms);
    if (ev->parsed()) return cmd_eval(eexpr, et, eq, json, max_terms);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
