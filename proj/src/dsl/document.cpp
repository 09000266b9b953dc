#include "gravaudit/dsl/document.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace gva {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message),
      line_(line),
      column_(column),
      message_(message) {}

std::optional<std::size_t> Chart::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < kDim; ++i) {
    if (names[i] == name) return i;
  }
  return std::nullopt;
}

ParamMap MetricSpec::defaults() const {
  ParamMap out;
  for (const auto& [name, value] : params) out[name] = value;
  return out;
}

ParamMap MetricSpec::bind(const ParamMap& overrides) const {
  ParamMap out = defaults();
  for (const auto& [name, value] : overrides) {
    auto it = out.find(name);
    if (it == out.end()) throw std::invalid_argument("unknown parameter '" + name + "'");
    it->second = value;
  }
  return out;
}

void MetricSpec::check_point(const Point4& p, const ParamMap& params) const {
  for (std::size_t i = 0; i < kDim; ++i) {
    if (!std::isfinite(p[i])) {
      throw ChartDomainError("coordinate " + chart.names[i] + " is not finite");
    }
    const auto& range = chart.ranges[i];
    if (!range) continue;
    const double x = p[i];
    if (range->lo) {
      const double lo = eval_value(*range->lo, p, params);
      if (x < lo || (x == lo && !range->lo_closed)) {
        throw ChartDomainError("coordinate " + chart.names[i] + " = " + std::to_string(x) +
                               " below chart validity bound " + range->lo->to_string());
      }
    }
    if (range->hi) {
      const double hi = eval_value(*range->hi, p, params);
      if (x > hi || (x == hi && !range->hi_closed)) {
        throw ChartDomainError("coordinate " + chart.names[i] + " = " + std::to_string(x) +
                               " above chart validity bound " + range->hi->to_string());
      }
    }
  }
}

namespace {

enum class Tok { Number, Ident, Op, End };

struct Token {
  Tok kind = Tok::End;
  std::string_view text;
  double number = 0.0;
  std::size_t column = 0;  // 1-based
};

class Lexer {
 public:
  Lexer(std::string_view text, std::size_t line, std::size_t column_offset)
      : text_(text), line_(line), offset_(column_offset) {
    advance();
  }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

  std::size_t line() const { return line_; }
  std::size_t end_column() const { return offset_ + text_.size() + 1; }

  [[noreturn]] void fail(std::size_t column, const std::string& msg) const {
    throw ParseError(line_, column, msg);
  }

 private:
  void advance() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) {
      ++pos_;
    }
    current_ = Token{};
    current_.column = offset_ + pos_ + 1;
    if (pos_ >= text_.size()) return;
    const char c = text_[pos_];
    const auto is_digit = [](char ch) { return ch >= '0' && ch <= '9'; };
    if (is_digit(c) || (c == '.' && pos_ + 1 < text_.size() && is_digit(text_[pos_ + 1]))) {
      std::size_t end = pos_;
      while (end < text_.size() && is_digit(text_[end])) ++end;
      if (end < text_.size() && text_[end] == '.') {
        ++end;
        while (end < text_.size() && is_digit(text_[end])) ++end;
      }
      if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
        std::size_t exp = end + 1;
        if (exp < text_.size() && (text_[exp] == '+' || text_[exp] == '-')) ++exp;
        if (exp < text_.size() && is_digit(text_[exp])) {
          end = exp;
          while (end < text_.size() && is_digit(text_[end])) ++end;
        }
      }
      current_.kind = Tok::Number;
      current_.text = text_.substr(pos_, end - pos_);
      auto res = std::from_chars(current_.text.data(), current_.text.data() + current_.text.size(),
                                 current_.number);
      if (res.ec != std::errc()) fail(current_.column, "malformed number '" + std::string(current_.text) + "'");
      pos_ = end;
      return;
    }
    const auto is_ident_start = [](char ch) {
      return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || ch == '_';
    };
    if (is_ident_start(c)) {
      std::size_t end = pos_ + 1;
      while (end < text_.size() && (is_ident_start(text_[end]) || is_digit(text_[end]))) ++end;
      current_.kind = Tok::Ident;
      current_.text = text_.substr(pos_, end - pos_);
      pos_ = end;
      return;
    }
    static constexpr std::string_view kOps = "+-*/^()[],=";
    if (kOps.find(c) != std::string_view::npos) {
      current_.kind = Tok::Op;
      current_.text = text_.substr(pos_, 1);
      ++pos_;
      return;
    }
    fail(current_.column, std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t offset_;
  std::size_t pos_ = 0;
  Token current_;
};

bool is_op(const Token& t, char c) { return t.kind == Tok::Op && t.text.size() == 1 && t.text[0] == c; }

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of line";
  return "'" + std::string(t.text) + "'";
}

class ExprParser {
 public:
  ExprParser(Lexer& lex, const std::array<std::string, kDim>& coords,
             const std::vector<std::string>& params, bool allow_coordinates)
      : lex_(lex), coords_(coords), params_(params), allow_coordinates_(allow_coordinates) {}

  Expr parse_expr() {
    Expr lhs = parse_term();
    while (is_op(lex_.peek(), '+') || is_op(lex_.peek(), '-')) {
      const BinOp op = lex_.take().text[0] == '+' ? BinOp::Add : BinOp::Sub;
      lhs = Expr::binary(op, lhs, parse_term());
    }
    return lhs;
  }

 private:
  Expr parse_term() {
    Expr lhs = parse_unary();
    while (is_op(lex_.peek(), '*') || is_op(lex_.peek(), '/')) {
      const BinOp op = lex_.take().text[0] == '*' ? BinOp::Mul : BinOp::Div;
      lhs = Expr::binary(op, lhs, parse_unary());
    }
    return lhs;
  }

  Expr parse_unary() {
    if (is_op(lex_.peek(), '-')) {
      lex_.take();
      return Expr::unary(Func::Neg, parse_unary());
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (!is_op(lex_.peek(), '^')) return base;
    lex_.take();
    const std::size_t column = lex_.peek().column;
    Expr exponent = parse_unary();
    if (!exponent.is_literal_constant()) {
      lex_.fail(column, "exponent must be a rational constant");
    }
    const double value = eval_value(exponent, Point4{}, ParamMap{});
    for (int den = 1; den <= 4; ++den) {
      const double scaled = value * den;
      const double rounded = std::round(scaled);
      if (std::fabs(scaled - rounded) <= 1e-12 * std::max(1.0, std::fabs(scaled)) &&
          std::fabs(rounded) < 1e6) {
        return Expr::power(base, static_cast<int>(rounded), den);
      }
    }
    lex_.fail(column, "exponent must be a rational constant with denominator at most 4");
  }

  Expr parse_primary() {
    const Token tok = lex_.take();
    if (tok.kind == Tok::Number) return Expr::constant(tok.number);
    if (is_op(tok, '(')) {
      Expr inner = parse_expr();
      expect(')');
      return inner;
    }
    if (tok.kind == Tok::Ident) {
      const std::string name(tok.text);
      if (is_op(lex_.peek(), '(')) {
        Func f;
        if (!func_from_name(name, f)) lex_.fail(tok.column, "unknown function '" + name + "'");
        lex_.take();
        Expr arg = parse_expr();
        expect(')');
        return Expr::unary(f, arg);
      }
      if (name == "pi") return Expr::pi();
      for (std::size_t i = 0; i < kDim; ++i) {
        if (coords_[i] == name) {
          if (!allow_coordinates_) lex_.fail(tok.column, "coordinate '" + name + "' not allowed here");
          return Expr::coordinate(i, name);
        }
      }
      if (std::find(params_.begin(), params_.end(), name) != params_.end()) {
        return Expr::parameter(name);
      }
      Func f;
      if (func_from_name(name, f)) lex_.fail(tok.column, "function '" + name + "' requires an argument");
      lex_.fail(tok.column, "undeclared parameter '" + name + "'");
    }
    lex_.fail(tok.column, "expected an expression, found " + describe(tok));
  }

  void expect(char c) {
    const Token t = lex_.take();
    if (!is_op(t, c)) lex_.fail(t.column, std::string("expected '") + c + "', found " + describe(t));
  }

  Lexer& lex_;
  const std::array<std::string, kDim>& coords_;
  const std::vector<std::string>& params_;
  bool allow_coordinates_;
};

bool reserved_name(std::string_view name) {
  Func f;
  return name == "pi" || name == "inf" || name == "chart" || name == "param" || name == "range" ||
         name == "g" || func_from_name(name, f);
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct DocumentParser {
  MetricSpec spec;
  bool have_chart = false;
  bool have_slot = false;
  std::vector<std::string> param_names;
  std::array<std::size_t, 10> slot_line{};

  void line(std::string_view text, std::size_t lineno) {
    const auto hash = text.find('#');
    if (hash != std::string_view::npos) text = text.substr(0, hash);
    Lexer lex(text, lineno, 0);
    if (lex.peek().kind == Tok::End) return;
    const Token head = lex.take();
    if (head.kind != Tok::Ident) lex.fail(head.column, "expected a keyword, found " + describe(head));
    if (head.text == "chart") {
      chart_line(lex, head);
    } else if (!have_chart) {
      lex.fail(head.column, "document must start with a 'chart' line");
    } else if (head.text == "param") {
      if (have_slot) lex.fail(head.column, "'param' lines must precede metric slots");
      param_line(lex);
    } else if (head.text == "range") {
      if (have_slot) lex.fail(head.column, "'range' lines must precede metric slots");
      range_line(lex);
    } else if (head.text == "g") {
      slot_line_(lex, lineno);
    } else {
      lex.fail(head.column, "unknown keyword '" + std::string(head.text) + "'");
    }
  }

  void chart_line(Lexer& lex, const Token& head) {
    if (have_chart) lex.fail(head.column, "duplicate 'chart' line");
    std::vector<Token> names;
    while (lex.peek().kind != Tok::End) {
      Token t = lex.take();
      if (t.kind != Tok::Ident) lex.fail(t.column, "expected a coordinate name, found " + describe(t));
      names.push_back(t);
    }
    if (names.size() != kDim) {
      lex.fail(head.column, "chart must declare exactly 4 coordinates, found " +
                                std::to_string(names.size()));
    }
    for (std::size_t i = 0; i < kDim; ++i) {
      const std::string name(names[i].text);
      if (reserved_name(name)) lex.fail(names[i].column, "'" + name + "' is a reserved name");
      if (spec.chart.index_of(name)) lex.fail(names[i].column, "duplicate coordinate '" + name + "'");
      spec.chart.names[i] = name;
    }
    have_chart = true;
  }

  void param_line(Lexer& lex) {
    const Token name = lex.take();
    if (name.kind != Tok::Ident) lex.fail(name.column, "expected a parameter name, found " + describe(name));
    const std::string n(name.text);
    if (reserved_name(n)) lex.fail(name.column, "'" + n + "' is a reserved name");
    if (spec.chart.index_of(n)) lex.fail(name.column, "'" + n + "' is already a coordinate name");
    if (std::find(param_names.begin(), param_names.end(), n) != param_names.end()) {
      lex.fail(name.column, "duplicate parameter '" + n + "'");
    }
    const Token eq = lex.take();
    if (!is_op(eq, '=')) lex.fail(eq.column, "expected '=', found " + describe(eq));
    double sign = 1.0;
    if (is_op(lex.peek(), '-') || is_op(lex.peek(), '+')) sign = lex.take().text[0] == '-' ? -1.0 : 1.0;
    const Token value = lex.take();
    if (value.kind != Tok::Number) lex.fail(value.column, "expected a real number, found " + describe(value));
    if (lex.peek().kind != Tok::End) lex.fail(lex.peek().column, "unexpected " + describe(lex.peek()));
    param_names.push_back(n);
    spec.params.emplace_back(n, sign * value.number);
  }

  std::optional<Expr> bound(Lexer& lex) {
    if (lex.peek().kind == Tok::Ident && lex.peek().text == "inf") {
      lex.take();
      return std::nullopt;
    }
    ExprParser p(lex, spec.chart.names, param_names, false);
    return p.parse_expr();
  }

  void range_line(Lexer& lex) {
    const Token name = lex.take();
    const auto index = name.kind == Tok::Ident ? spec.chart.index_of(name.text) : std::nullopt;
    if (!index) lex.fail(name.column, "expected a coordinate name, found " + describe(name));
    if (spec.chart.ranges[*index]) lex.fail(name.column, "duplicate range for '" + std::string(name.text) + "'");
    Interval iv;
    const Token open = lex.take();
    if (is_op(open, '(')) {
      iv.lo_closed = false;
    } else if (is_op(open, '[')) {
      iv.lo_closed = true;
    } else {
      lex.fail(open.column, "expected '(' or '[', found " + describe(open));
    }
    if (is_op(lex.peek(), '-')) {
      // "-inf" is the only signed bound handled outside the expression grammar.
      Lexer probe = lex;
      probe.take();
      if (probe.peek().kind == Tok::Ident && probe.peek().text == "inf") {
        lex.take();
        lex.take();
      } else {
        iv.lo = bound(lex);
      }
    } else {
      iv.lo = bound(lex);
    }
    const Token comma = lex.take();
    if (!is_op(comma, ',')) lex.fail(comma.column, "expected ',', found " + describe(comma));
    iv.hi = bound(lex);
    const Token close = lex.take();
    if (is_op(close, ')')) {
      iv.hi_closed = false;
    } else if (is_op(close, ']')) {
      iv.hi_closed = true;
    } else {
      lex.fail(close.column, "expected ')' or ']', found " + describe(close));
    }
    if (lex.peek().kind != Tok::End) lex.fail(lex.peek().column, "unexpected " + describe(lex.peek()));
    if (iv.lo && iv.hi && iv.lo->is_literal_constant() && iv.hi->is_literal_constant()) {
      const double lo = eval_value(*iv.lo, Point4{}, ParamMap{});
      const double hi = eval_value(*iv.hi, Point4{}, ParamMap{});
      if (!(lo < hi || (lo == hi && iv.lo_closed && iv.hi_closed))) {
        lex.fail(open.column, "empty interval for '" + std::string(name.text) + "'");
      }
    }
    spec.chart.ranges[*index] = std::move(iv);
  }

  std::size_t index_token(Lexer& lex) {
    const Token t = lex.take();
    if (t.kind != Tok::Number || t.text.find_first_not_of("0123456789") != std::string_view::npos ||
        t.number > 3) {
      lex.fail(t.column, "expected a slot index in 0..3, found " + describe(t));
    }
    return static_cast<std::size_t>(t.number);
  }

  void slot_line_(Lexer& lex, std::size_t lineno) {
    const std::size_t column = lex.peek().column;
    const std::size_t i = index_token(lex);
    const std::size_t j = index_token(lex);
    const Token eq = lex.take();
    if (!is_op(eq, '=')) lex.fail(eq.column, "expected '=', found " + describe(eq));
    ExprParser p(lex, spec.chart.names, param_names, true);
    Expr e = p.parse_expr();
    if (lex.peek().kind != Tok::End) lex.fail(lex.peek().column, "unexpected " + describe(lex.peek()));
    const std::size_t k = sym_index(i, j);
    if (slot_line[k] != 0) {
      lex.fail(column, "duplicate slot g(" + std::to_string(std::min(i, j)) + "," +
                           std::to_string(std::max(i, j)) + ") already given on line " +
                           std::to_string(slot_line[k]) +
                           (i > j ? " (the metric is symmetric; give each pair once with mu <= nu)" : ""));
    }
    slot_line[k] = lineno;
    have_slot = true;
    if (!e.is_zero_constant()) spec.slots[k] = std::move(e);
  }
};

}  // namespace

Expr parse_expression(std::string_view text, const std::array<std::string, kDim>& coords,
                      const std::vector<std::string>& params, std::size_t line,
                      std::size_t column_offset) {
  Lexer lex(text, line, column_offset);
  ExprParser p(lex, coords, params, true);
  Expr e = p.parse_expr();
  if (lex.peek().kind != Tok::End) lex.fail(lex.peek().column, "unexpected " + describe(lex.peek()));
  return e;
}

MetricSpec parse_metric_document(std::string_view text) {
  DocumentParser dp;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    ++lineno;
    dp.line(text.substr(start, end - start), lineno);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  if (!dp.have_chart) throw ParseError(1, 1, "missing 'chart' line");
  if (!dp.have_slot) throw ParseError(lineno, 1, "document declares no metric slots");
  return std::move(dp.spec);
}

std::string serialize_metric_document(const MetricSpec& spec) {
  std::ostringstream os;
  os << "chart";
  for (const auto& n : spec.chart.names) os << ' ' << n;
  os << '\n';
  for (const auto& [name, value] : spec.params) os << "param " << name << " = " << format_real(value) << '\n';
  for (std::size_t i = 0; i < kDim; ++i) {
    const auto& r = spec.chart.ranges[i];
    if (!r) continue;
    os << "range " << spec.chart.names[i] << ' ' << (r->lo_closed ? '[' : '(')
       << (r->lo ? r->lo->to_string() : "-inf") << ", " << (r->hi ? r->hi->to_string() : "inf")
       << (r->hi_closed ? ']' : ')') << '\n';
  }
  for (std::size_t i = 0; i < kDim; ++i) {
    for (std::size_t j = i; j < kDim; ++j) {
      if (const auto& e = spec.slot(i, j)) os << "g " << i << ' ' << j << " = " << e->to_string() << '\n';
    }
  }
  return os.str();
}

}  // namespace gva
