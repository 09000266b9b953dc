#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gravaudit/dsl/jet.hpp"

namespace gva {

/// A point in chart order. Geometric units throughout.
using Point4 = std::array<double, kDim>;

/// Parameter values by name.
using ParamMap = std::map<std::string, double, std::less<>>;

/// Raised when an expression is evaluated where it (or one of its first two
/// derivatives) is undefined: abs/sqrt/ln at 0, division by 0, asin at +-1.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Func { Sin, Cos, Tan, Asin, Exp, Ln, Abs, Sqrt, Neg };

enum class BinOp { Add, Sub, Mul, Div };

std::string_view func_name(Func f);

/// Looks up a function by its document spelling ("sin", "ln", ...).
bool func_from_name(std::string_view name, Func& out);

class Expr;

namespace detail {
struct Node;
}

/// Immutable expression tree over chart coordinates and named parameters.
/// Copies share structure; all operations are const.
class Expr {
 public:
  enum class Kind { Constant, Coordinate, Parameter, Unary, Binary, Power };

  Expr() = default;

  static Expr constant(double value);
  static Expr pi();
  static Expr coordinate(std::size_t index, std::string name);
  static Expr parameter(std::string name);
  static Expr unary(Func f, Expr arg);
  static Expr binary(BinOp op, Expr lhs, Expr rhs);
  /// base^(num/den); den > 0.
  static Expr power(Expr base, int num, int den);

  bool valid() const { return node_ != nullptr; }
  Kind kind() const;

  double constant_value() const;
  bool is_pi() const;
  std::size_t coordinate_index() const;
  const std::string& name() const;  // coordinate or parameter name
  Func func() const;
  BinOp op() const;
  const Expr& lhs() const;  // binary lhs, unary argument, power base
  const Expr& rhs() const;
  int exp_num() const;
  int exp_den() const;

  /// True when the subtree is the literal constant 0.
  bool is_zero_constant() const;
  /// True when no coordinate appears in the subtree.
  bool is_coordinate_free() const;
  /// True when neither coordinates nor parameters appear.
  bool is_literal_constant() const;

  /// Collects referenced parameter names.
  void collect_parameters(std::vector<std::string>& out) const;
  /// Bit i set when coordinate i is referenced.
  unsigned coordinate_mask() const;

  /// Infix rendering with minimal parentheses; parses back to an equal tree.
  std::string to_string() const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

 private:
  explicit Expr(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::Node> node_;
};

/// Value only.
double eval_value(const Expr& expr, const Point4& point, const ParamMap& params);

/// Value with exact first and second derivatives.
Jet2 eval_jet2(const Expr& expr, const Point4& point, const ParamMap& params);

/// Max over the 4 gradient and 10 Hessian slots of
/// |jet - finite difference| / (1 + |jet|). Finite differences are central,
/// Richardson-extrapolated over `step` and `step / 2`.
double jet_fd_agreement(const Expr& expr, const Point4& point, const ParamMap& params,
                        double step);

}  // namespace gva
