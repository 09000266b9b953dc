#include "gravaudit/dsl/expr.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gva {

namespace detail {

struct Node {
  Expr::Kind kind = Expr::Kind::Constant;
  double value = 0.0;
  bool pi = false;
  std::size_t index = 0;
  std::string name;
  Func func = Func::Neg;
  BinOp op = BinOp::Add;
  int num = 1;
  int den = 1;
  Expr a;
  Expr b;
};

}  // namespace detail

namespace {

constexpr std::array<std::string_view, 9> kFuncNames = {"sin", "cos",  "tan",  "asin", "exp",
                                                        "ln",  "abs",  "sqrt", "neg"};

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string point_text(const Point4& p) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < kDim; ++i) {
    if (i) os << ", ";
    os << format_real(p[i]);
  }
  os << ')';
  return os.str();
}

[[noreturn]] void domain_fail(const Expr& e, const std::string& why, const Point4& p) {
  throw DomainError("domain error in '" + e.to_string() + "': " + why + " at point " +
                    point_text(p));
}

int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Binary:
      return (e.op() == BinOp::Add || e.op() == BinOp::Sub) ? 1 : 2;
    case Expr::Kind::Unary:
      return e.func() == Func::Neg ? 3 : 5;
    case Expr::Kind::Power:
      return 4;
    case Expr::Kind::Constant:
      return e.constant_value() < 0 ? 0 : 5;
    default:
      return 5;
  }
}

std::string render(const Expr& e);

std::string wrap(const Expr& e, int needed) {
  std::string s = render(e);
  return precedence(e) < needed ? "(" + s + ")" : s;
}

std::string render(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return e.is_pi() ? "pi" : format_real(e.constant_value());
    case Expr::Kind::Coordinate:
    case Expr::Kind::Parameter:
      return e.name();
    case Expr::Kind::Unary:
      if (e.func() == Func::Neg) return "-" + wrap(e.lhs(), 4);
      return std::string(func_name(e.func())) + "(" + render(e.lhs()) + ")";
    case Expr::Kind::Power: {
      std::string exp;
      if (e.exp_den() == 1 && e.exp_num() >= 0) {
        exp = std::to_string(e.exp_num());
      } else if (e.exp_den() == 1) {
        exp = "(" + std::to_string(e.exp_num()) + ")";
      } else {
        exp = "(" + std::to_string(e.exp_num()) + "/" + std::to_string(e.exp_den()) + ")";
      }
      return wrap(e.lhs(), 5) + "^" + exp;
    }
    case Expr::Kind::Binary:
      switch (e.op()) {
        case BinOp::Add:
          return wrap(e.lhs(), 1) + " + " + wrap(e.rhs(), 2);
        case BinOp::Sub:
          return wrap(e.lhs(), 1) + " - " + wrap(e.rhs(), 2);
        case BinOp::Mul:
          return wrap(e.lhs(), 2) + "*" + wrap(e.rhs(), 3);
        case BinOp::Div:
          return wrap(e.lhs(), 2) + "/" + wrap(e.rhs(), 3);
      }
  }
  return {};
}

double lookup_param(const Expr& e, const ParamMap& params) {
  auto it = params.find(e.name());
  if (it == params.end()) throw std::invalid_argument("no value bound for parameter '" + e.name() + "'");
  return it->second;
}

// Shared domain rules for value and jet evaluation.
void check_unary_domain(const Expr& e, double a, const Point4& p) {
  switch (e.func()) {
    case Func::Tan:
      if (std::cos(a) == 0.0) domain_fail(e, "tan pole", p);
      break;
    case Func::Asin:
      if (!(std::fabs(a) < 1.0)) domain_fail(e, "asin argument outside (-1, 1)", p);
      break;
    case Func::Ln:
      if (!(a > 0.0)) domain_fail(e, "ln argument not positive", p);
      break;
    case Func::Abs:
      if (a == 0.0) domain_fail(e, "abs is not differentiable at 0", p);
      break;
    case Func::Sqrt:
      if (!(a > 0.0)) domain_fail(e, "sqrt argument not positive", p);
      break;
    default:
      break;
  }
}

void check_power_domain(const Expr& e, double base, const Point4& p) {
  if (e.exp_den() != 1) {
    if (!(base > 0.0)) domain_fail(e, "fractional power of a non-positive base", p);
  } else if (e.exp_num() < 0 && base == 0.0) {
    domain_fail(e, "negative power of 0", p);
  }
}

double apply_unary(Func f, double a) {
  switch (f) {
    case Func::Sin: return std::sin(a);
    case Func::Cos: return std::cos(a);
    case Func::Tan: return std::tan(a);
    case Func::Asin: return std::asin(a);
    case Func::Exp: return std::exp(a);
    case Func::Ln: return std::log(a);
    case Func::Abs: return std::fabs(a);
    case Func::Sqrt: return std::sqrt(a);
    case Func::Neg: return -a;
  }
  return 0.0;
}

double power_value(double base, int num, int den) {
  if (den == 1) return std::pow(base, num);
  return std::pow(base, static_cast<double>(num) / den);
}

}  // namespace

std::string_view func_name(Func f) { return kFuncNames[static_cast<std::size_t>(f)]; }

bool func_from_name(std::string_view name, Func& out) {
  for (std::size_t i = 0; i < kFuncNames.size(); ++i) {
    if (kFuncNames[i] == name) {
      out = static_cast<Func>(i);
      return true;
    }
  }
  return false;
}

Expr Expr::constant(double value) {
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::Constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::pi() {
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::Constant;
  n->value = std::numbers::pi;
  n->pi = true;
  return Expr(std::move(n));
}

Expr Expr::coordinate(std::size_t index, std::string name) {
  if (index >= kDim) throw std::invalid_argument("coordinate index out of range");
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::Coordinate;
  n->index = index;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::parameter(std::string name) {
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::Parameter;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::unary(Func f, Expr arg) {
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::Unary;
  n->func = f;
  n->a = std::move(arg);
  return Expr(std::move(n));
}

Expr Expr::binary(BinOp op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::Binary;
  n->op = op;
  n->a = std::move(lhs);
  n->b = std::move(rhs);
  return Expr(std::move(n));
}

Expr Expr::power(Expr base, int num, int den) {
  if (den <= 0) throw std::invalid_argument("power denominator must be positive");
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::Power;
  n->a = std::move(base);
  n->num = num;
  n->den = den;
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::constant_value() const { return node_->value; }
bool Expr::is_pi() const { return node_->pi; }
std::size_t Expr::coordinate_index() const { return node_->index; }
const std::string& Expr::name() const { return node_->name; }
Func Expr::func() const { return node_->func; }
BinOp Expr::op() const { return node_->op; }
const Expr& Expr::lhs() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }
int Expr::exp_num() const { return node_->num; }
int Expr::exp_den() const { return node_->den; }

bool Expr::is_zero_constant() const {
  return valid() && kind() == Kind::Constant && constant_value() == 0.0;
}

unsigned Expr::coordinate_mask() const {
  switch (kind()) {
    case Kind::Coordinate:
      return 1u << coordinate_index();
    case Kind::Unary:
    case Kind::Power:
      return lhs().coordinate_mask();
    case Kind::Binary:
      return lhs().coordinate_mask() | rhs().coordinate_mask();
    default:
      return 0u;
  }
}

bool Expr::is_coordinate_free() const { return coordinate_mask() == 0u; }

bool Expr::is_literal_constant() const {
  std::vector<std::string> names;
  collect_parameters(names);
  return names.empty() && is_coordinate_free();
}

void Expr::collect_parameters(std::vector<std::string>& out) const {
  switch (kind()) {
    case Kind::Parameter:
      out.push_back(name());
      break;
    case Kind::Unary:
    case Kind::Power:
      lhs().collect_parameters(out);
      break;
    case Kind::Binary:
      lhs().collect_parameters(out);
      rhs().collect_parameters(out);
      break;
    default:
      break;
  }
}

std::string Expr::to_string() const { return valid() ? render(*this) : std::string("0"); }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (!a.valid() || !b.valid()) return false;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Constant:
      return a.constant_value() == b.constant_value() && a.is_pi() == b.is_pi();
    case Expr::Kind::Coordinate:
      return a.coordinate_index() == b.coordinate_index() && a.name() == b.name();
    case Expr::Kind::Parameter:
      return a.name() == b.name();
    case Expr::Kind::Unary:
      return a.func() == b.func() && a.lhs() == b.lhs();
    case Expr::Kind::Power:
      return a.exp_num() == b.exp_num() && a.exp_den() == b.exp_den() && a.lhs() == b.lhs();
    case Expr::Kind::Binary:
      return a.op() == b.op() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
  return false;
}

double eval_value(const Expr& e, const Point4& p, const ParamMap& params) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return e.constant_value();
    case Expr::Kind::Coordinate:
      return p[e.coordinate_index()];
    case Expr::Kind::Parameter:
      return lookup_param(e, params);
    case Expr::Kind::Unary: {
      const double a = eval_value(e.lhs(), p, params);
      check_unary_domain(e, a, p);
      return apply_unary(e.func(), a);
    }
    case Expr::Kind::Power: {
      const double a = eval_value(e.lhs(), p, params);
      check_power_domain(e, a, p);
      return power_value(a, e.exp_num(), e.exp_den());
    }
    case Expr::Kind::Binary: {
      const double a = eval_value(e.lhs(), p, params);
      const double b = eval_value(e.rhs(), p, params);
      switch (e.op()) {
        case BinOp::Add: return a + b;
        case BinOp::Sub: return a - b;
        case BinOp::Mul: return a * b;
        case BinOp::Div:
          if (b == 0.0) domain_fail(e, "division by 0", p);
          return a / b;
      }
    }
  }
  return 0.0;
}

Jet2 eval_jet2(const Expr& e, const Point4& p, const ParamMap& params) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return Jet2::constant(e.constant_value());
    case Expr::Kind::Coordinate:
      return Jet2::variable(p[e.coordinate_index()], e.coordinate_index());
    case Expr::Kind::Parameter:
      return Jet2::constant(lookup_param(e, params));
    case Expr::Kind::Unary: {
      const Jet2 a = eval_jet2(e.lhs(), p, params);
      const double x = a.value;
      check_unary_domain(e, x, p);
      switch (e.func()) {
        case Func::Sin:
          return a.compose(std::sin(x), std::cos(x), -std::sin(x));
        case Func::Cos:
          return a.compose(std::cos(x), -std::sin(x), -std::cos(x));
        case Func::Tan: {
          const double t = std::tan(x);
          const double sec2 = 1.0 + t * t;
          return a.compose(t, sec2, 2.0 * t * sec2);
        }
        case Func::Asin: {
          const double w = 1.0 - x * x;
          const double s = std::sqrt(w);
          return a.compose(std::asin(x), 1.0 / s, x / (w * s));
        }
        case Func::Exp: {
          const double ex = std::exp(x);
          return a.compose(ex, ex, ex);
        }
        case Func::Ln:
          return a.compose(std::log(x), 1.0 / x, -1.0 / (x * x));
        case Func::Abs: {
          const double sg = x > 0.0 ? 1.0 : -1.0;
          return a.compose(std::fabs(x), sg, 0.0);
        }
        case Func::Sqrt: {
          const double s = std::sqrt(x);
          return a.compose(s, 0.5 / s, -0.25 / (s * x));
        }
        case Func::Neg:
          return -a;
      }
      break;
    }
    case Expr::Kind::Power: {
      const Jet2 a = eval_jet2(e.lhs(), p, params);
      const double x = a.value;
      check_power_domain(e, x, p);
      if (e.exp_den() == 1) {
        const int n = e.exp_num();
        if (n == 0) return Jet2::constant(1.0);
        return a.compose(std::pow(x, n), n * std::pow(x, n - 1),
                         n * (n - 1) * std::pow(x, n - 2));
      }
      const double q = static_cast<double>(e.exp_num()) / e.exp_den();
      return a.compose(std::pow(x, q), q * std::pow(x, q - 1.0),
                       q * (q - 1.0) * std::pow(x, q - 2.0));
    }
    case Expr::Kind::Binary: {
      const Jet2 a = eval_jet2(e.lhs(), p, params);
      const Jet2 b = eval_jet2(e.rhs(), p, params);
      switch (e.op()) {
        case BinOp::Add: return a + b;
        case BinOp::Sub: return a - b;
        case BinOp::Mul: return a * b;
        case BinOp::Div:
          if (b.value == 0.0) domain_fail(e, "division by 0", p);
          return a / b;
      }
    }
  }
  return {};
}

namespace {

struct FdDerivs {
  std::array<double, kDim> grad{};
  std::array<double, 10> hess{};
};

FdDerivs central_derivs(const Expr& e, const Point4& p, const ParamMap& params, double h) {
  auto f = [&](const Point4& q) { return eval_value(e, q, params); };
  FdDerivs out;
  const double f0 = f(p);
  for (std::size_t i = 0; i < kDim; ++i) {
    Point4 up = p, dn = p;
    up[i] += h;
    dn[i] -= h;
    const double fu = f(up), fd = f(dn);
    out.grad[i] = (fu - fd) / (2.0 * h);
    out.hess[sym_index(i, i)] = (fu - 2.0 * f0 + fd) / (h * h);
    for (std::size_t j = i + 1; j < kDim; ++j) {
      Point4 pp = p, pm = p, mp = p, mm = p;
      pp[i] += h, pp[j] += h;
      pm[i] += h, pm[j] -= h;
      mp[i] -= h, mp[j] += h;
      mm[i] -= h, mm[j] -= h;
      out.hess[sym_index(i, j)] = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
    }
  }
  return out;
}

}  // namespace

double jet_fd_agreement(const Expr& expr, const Point4& point, const ParamMap& params,
                        double step) {
  const Jet2 jet = eval_jet2(expr, point, params);
  const FdDerivs coarse = central_derivs(expr, point, params, step);
  const FdDerivs fine = central_derivs(expr, point, params, step / 2.0);
  double worst = 0.0;
  auto consider = [&](double exact, double c, double f) {
    const double extrapolated = (4.0 * f - c) / 3.0;
    worst = std::max(worst, std::fabs(exact - extrapolated) / (1.0 + std::fabs(exact)));
  };
  for (std::size_t i = 0; i < kDim; ++i) consider(jet.grad[i], coarse.grad[i], fine.grad[i]);
  for (std::size_t k = 0; k < 10; ++k) consider(jet.hess[k], coarse.hess[k], fine.hess[k]);
  return worst;
}

}  // namespace gva
