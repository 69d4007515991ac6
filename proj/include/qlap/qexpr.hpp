#pragma once

/**
 * @file qexpr.hpp
 * @brief Text grammar for time-domain expressions.
 *
 *   expr   := term (('+' | '-') term)*
 *   term   := factor ('*' factor)*
 *   factor := ['+' | '-'] number
 *           | '-' factor
 *           | 't' ['^' number]
 *           | func '(' number '*' 't' ')'
 *           | 'u' '(' 't' '-' number ')'
 *   func   := e_q | E_q | sin_q | cos_q | Sin_q | Cos_q | sinh_q | cosh_q
 *             | Sinh_q | Cosh_q
 *
 * Numbers are decimal literals with an optional exponent. Whitespace is
 * ignored.
 */

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "qcore.hpp"
#include "qspecial.hpp"
#include "time_expr.hpp"

namespace qlap {

/// Byte offsets [begin, end) into the source text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Node {
  enum class Kind { Sum, Product, Neg, Number, Var, Func, Step };

  Kind kind = Kind::Number;
  /// Number: the literal; Var: the exponent; Func: a of f(a*t); Step: a of u(t-a).
  double value = 0.0;
  /// Func: the function name as written.
  std::string name;
  std::vector<Node> children;
  /// Sum only: operator before children[i] for i >= 1 ('+' or '-').
  std::vector<char> ops;
  Span span;
};

using ParseTree = Node;

/// Structural equality; spans are ignored.
inline bool same_structure(const Node& x, const Node& y) {
  if (x.kind != y.kind || x.value != y.value || x.name != y.name || x.ops != y.ops ||
      x.children.size() != y.children.size())
    return false;
  for (std::size_t i = 0; i < x.children.size(); ++i)
    if (!same_structure(x.children[i], y.children[i])) return false;
  return true;
}

namespace detail {

inline const std::map<std::string, Base>& function_table() {
  static const std::map<std::string, Base> table{
      {"e_q", Base::EqExp},     {"E_q", Base::CapEqExp},  {"sin_q", Base::SinQ},
      {"cos_q", Base::CosQ},    {"Sin_q", Base::CapSinQ}, {"Cos_q", Base::CapCosQ},
      {"sinh_q", Base::SinhQ},  {"cosh_q", Base::CoshQ},  {"Sinh_q", Base::SinhQ},
      {"Cosh_q", Base::CoshQ},
  };
  return table;
}

struct Token {
  enum class Type { Number, Ident, Plus, Minus, Star, Caret, LParen, RParen, End };
  Type type = Type::End;
  std::string text;
  double number = 0.0;
  std::size_t offset = 0;
};

inline const char* token_name(Token::Type t) {
  switch (t) {
    case Token::Type::Number: return "number";
    case Token::Type::Ident: return "identifier";
    case Token::Type::Plus: return "'+'";
    case Token::Type::Minus: return "'-'";
    case Token::Type::Star: return "'*'";
    case Token::Type::Caret: return "'^'";
    case Token::Type::LParen: return "'('";
    case Token::Type::RParen: return "')'";
    case Token::Type::End: return "end of input";
  }
  return "?";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) { tokenize(); }

  Node parse() {
    Node root = expr();
    if (peek().type != Token::Type::End) fail("unexpected " + describe(peek()), {"'+'", "'-'", "'*'", "end of input"});
    return root;
  }

 private:
  std::string_view text_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail_at(std::size_t offset, const std::string& msg, std::vector<std::string> expected) const {
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg, line, col, std::move(expected));
  }

  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) const {
    fail_at(peek().offset, msg, std::move(expected));
  }

  static std::string describe(const Token& t) {
    if (t.type == Token::Type::End) return "end of input";
    return "'" + t.text + "'";
  }

  void tokenize() {
    std::size_t i = 0;
    const std::size_t n = text_.size();
    while (i < n) {
      const char c = text_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      Token tok;
      tok.offset = i;
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t j = i;
        while (j < n && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
        if (j < n && text_[j] == '.') ++j;
        while (j < n && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
        if (j < n && (text_[j] == 'e' || text_[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < n && (text_[k] == '+' || text_[k] == '-')) ++k;
          if (k < n && std::isdigit(static_cast<unsigned char>(text_[k]))) {
            while (k < n && std::isdigit(static_cast<unsigned char>(text_[k]))) ++k;
            j = k;
          }
        }
        tok.text = std::string(text_.substr(i, j - i));
        if (tok.text == ".") fail_at(i, "malformed number '.'", {"number"});
        tok.type = Token::Type::Number;
        tok.number = std::strtod(tok.text.c_str(), nullptr);
        i = j;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i;
        while (j < n && (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_')) ++j;
        tok.type = Token::Type::Ident;
        tok.text = std::string(text_.substr(i, j - i));
        i = j;
      } else {
        switch (c) {
          case '+': tok.type = Token::Type::Plus; break;
          case '-': tok.type = Token::Type::Minus; break;
          case '*': tok.type = Token::Type::Star; break;
          case '^': tok.type = Token::Type::Caret; break;
          case '(': tok.type = Token::Type::LParen; break;
          case ')': tok.type = Token::Type::RParen; break;
          default: fail_at(i, std::string("unexpected character '") + c + "'", {"number", "'t'", "function name"});
        }
        tok.text = std::string(1, c);
        ++i;
      }
      tokens_.push_back(std::move(tok));
    }
    Token end;
    end.offset = n;
    tokens_.push_back(end);
  }

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }

  const Token& expect(Token::Type t, std::vector<std::string> expected = {}) {
    if (peek().type != t) {
      if (expected.empty()) expected.push_back(token_name(t));
      fail("unexpected " + describe(peek()), std::move(expected));
    }
    return tokens_[pos_++];
  }

  std::size_t end_offset() const { return pos_ == 0 ? 0 : tokens_[pos_ - 1].offset + tokens_[pos_ - 1].text.size(); }

  /// ['+' | '-'] number
  double signed_number() {
    double sign = 1.0;
    if (peek().type == Token::Type::Plus || peek().type == Token::Type::Minus) {
      sign = peek().type == Token::Type::Minus ? -1.0 : 1.0;
      ++pos_;
    }
    return sign * expect(Token::Type::Number, {"number"}).number;
  }

  Node expr() {
    const std::size_t begin = peek().offset;
    Node sum;
    sum.kind = Node::Kind::Sum;
    sum.children.push_back(term());
    while (peek().type == Token::Type::Plus || peek().type == Token::Type::Minus) {
      sum.ops.push_back(peek().type == Token::Type::Plus ? '+' : '-');
      ++pos_;
      sum.children.push_back(term());
    }
    if (sum.children.size() == 1) return std::move(sum.children.front());
    sum.span = {begin, end_offset()};
    return sum;
  }

  Node term() {
    const std::size_t begin = peek().offset;
    Node prod;
    prod.kind = Node::Kind::Product;
    prod.children.push_back(factor());
    while (peek().type == Token::Type::Star) {
      ++pos_;
      prod.children.push_back(factor());
    }
    if (prod.children.size() == 1) return std::move(prod.children.front());
    prod.span = {begin, end_offset()};
    return prod;
  }

  Node factor() {
    const std::size_t begin = peek().offset;
    Node node;
    const Token& tok = peek();
    if (tok.type == Token::Type::Plus || tok.type == Token::Type::Minus) {
      if (peek(1).type == Token::Type::Number) {
        node.kind = Node::Kind::Number;
        node.value = signed_number();
      } else if (tok.type == Token::Type::Minus) {
        ++pos_;
        node.kind = Node::Kind::Neg;
        node.children.push_back(factor());
      } else {
        ++pos_;
        fail("unexpected " + describe(peek()), {"number"});
      }
    } else if (tok.type == Token::Type::Number) {
      node.kind = Node::Kind::Number;
      node.value = signed_number();
    } else if (tok.type == Token::Type::Ident && tok.text == "t") {
      ++pos_;
      node.kind = Node::Kind::Var;
      node.value = 1.0;
      if (peek().type == Token::Type::Caret) {
        ++pos_;
        node.value = signed_number();
      }
    } else if (tok.type == Token::Type::Ident && tok.text == "u") {
      ++pos_;
      node.kind = Node::Kind::Step;
      expect(Token::Type::LParen);
      if (peek().type != Token::Type::Ident || peek().text != "t") fail("unexpected " + describe(peek()), {"'t'"});
      ++pos_;
      expect(Token::Type::Minus);
      node.value = signed_number();
      expect(Token::Type::RParen);
    } else if (tok.type == Token::Type::Ident && function_table().count(tok.text)) {
      node.kind = Node::Kind::Func;
      node.name = tok.text;
      ++pos_;
      expect(Token::Type::LParen);
      node.value = signed_number();
      expect(Token::Type::Star);
      if (peek().type != Token::Type::Ident || peek().text != "t") fail("unexpected " + describe(peek()), {"'t'"});
      ++pos_;
      expect(Token::Type::RParen);
    } else if (tok.type == Token::Type::Ident) {
      fail("unknown name '" + tok.text + "'", {"'t'", "'u'", "e_q", "E_q", "sin_q", "cos_q", "Sin_q", "Cos_q",
                                              "sinh_q", "cosh_q"});
    } else {
      fail("unexpected " + describe(tok), {"number", "'t'", "'u'", "function name", "'-'"});
    }
    node.span = {begin, end_offset()};
    return node;
  }
};

}  // namespace detail

/// Parses text in the grammar above. Throws ParseError with line, column and
/// the set of tokens that would have been accepted.
inline ParseTree parse(std::string_view text) { return detail::Parser(text).parse(); }

/// Prints a tree in the input grammar; parse(print(x)) has the same structure as x.
inline std::string print(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Sum: {
      std::string out = print(n.children.front());
      for (std::size_t i = 1; i < n.children.size(); ++i)
        out += std::string(" ") + n.ops[i - 1] + " " + print(n.children[i]);
      return out;
    }
    case Node::Kind::Product: {
      std::string out;
      for (std::size_t i = 0; i < n.children.size(); ++i) out += (i ? "*" : "") + print(n.children[i]);
      return out;
    }
    case Node::Kind::Neg: return "-" + print(n.children.front());
    case Node::Kind::Number: return format_number(n.value);
    case Node::Kind::Var: return n.value == 1.0 ? std::string("t") : "t^" + format_number(n.value);
    case Node::Kind::Func: return n.name + "(" + format_number(n.value) + "*t)";
    case Node::Kind::Step: return "u(t-" + format_number(n.value) + ")";
  }
  return "";
}

namespace detail {

/// Accumulates one product into coefficient, power and at most one base.
struct TermShape {
  double coef = 1.0;
  double power = 0.0;
  bool has_base = false;
  Base base = Base::One;
  double param = 0.0;
};

inline void collect(const Node& n, TermShape& shape) {
  switch (n.kind) {
    case Node::Kind::Number: shape.coef *= n.value; return;
    case Node::Kind::Neg: shape.coef = -shape.coef; collect(n.children.front(), shape); return;
    case Node::Kind::Var: shape.power += n.value; return;
    case Node::Kind::Product:
      for (const auto& c : n.children) collect(c, shape);
      return;
    case Node::Kind::Func:
    case Node::Kind::Step: {
      if (shape.has_base)
        throw UnsupportedShape("product of two transcendental factors at offset " + std::to_string(n.span.begin) +
                               " has no transform rule");
      shape.has_base = true;
      shape.base = n.kind == Node::Kind::Step ? Base::Heaviside : function_table().at(n.name);
      shape.param = n.value;
      if (n.kind == Node::Kind::Step && n.value < 0.0) throw DomainError("u(t-a) needs a >= 0");
      return;
    }
    case Node::Kind::Sum: throw UnsupportedShape("nested sum inside a product");
  }
}

}  // namespace detail

/// Flattens a tree into a canonical sum of atoms.
inline TimeExpr normalize(const ParseTree& tree) {
  std::vector<const Node*> terms;
  std::vector<double> signs;
  if (tree.kind == Node::Kind::Sum) {
    for (std::size_t i = 0; i < tree.children.size(); ++i) {
      terms.push_back(&tree.children[i]);
      signs.push_back(i > 0 && tree.ops[i - 1] == '-' ? -1.0 : 1.0);
    }
  } else {
    terms.push_back(&tree);
    signs.push_back(1.0);
  }
  TimeExpr out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    detail::TermShape shape;
    detail::collect(*terms[i], shape);
    if (!(shape.power > -1.0)) throw DomainError("powers of t must exceed -1, got " + format_number(shape.power));
    out.atoms.push_back(make_atom(signs[i] * shape.coef, shape.power, shape.base, shape.param));
  }
  return canonicalize(out);
}

inline TimeExpr parse_expr(std::string_view text) { return normalize(parse(text)); }

/// Direct tree walk, independent of normalize.
inline double evaluate(const Node& n, double t, const QContext& ctx) {
  if (t < 0.0) throw DomainError("evaluate: t must be nonnegative");
  switch (n.kind) {
    case Node::Kind::Sum: {
      double v = evaluate(n.children.front(), t, ctx);
      for (std::size_t i = 1; i < n.children.size(); ++i)
        v += (n.ops[i - 1] == '-' ? -1.0 : 1.0) * evaluate(n.children[i], t, ctx);
      return v;
    }
    case Node::Kind::Product: {
      double v = 1.0;
      for (const auto& c : n.children) v *= evaluate(c, t, ctx);
      return v;
    }
    case Node::Kind::Neg: return -evaluate(n.children.front(), t, ctx);
    case Node::Kind::Number: return n.value;
    case Node::Kind::Var: return std::pow(t, n.value);
    case Node::Kind::Step: return heaviside(t, n.value);
    case Node::Kind::Func: {
      Atom a = make_atom(1.0, 0.0, detail::function_table().at(n.name), n.value);
      return detail::eval_base(a, t, ctx);
    }
  }
  return 0.0;
}

}  // namespace qlap
