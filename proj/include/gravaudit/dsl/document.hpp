#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gravaudit/dsl/expr.hpp"

namespace gva {

/// Syntax or semantic error in a metric document, with 1-based position.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

/// A point lies outside a declared coordinate interval.
class ChartDomainError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Validity interval of one coordinate. Bounds may reference parameters;
/// an absent bound is infinite.
struct Interval {
  std::optional<Expr> lo;
  std::optional<Expr> hi;
  bool lo_closed = false;
  bool hi_closed = false;

  friend bool operator==(const Interval&, const Interval&) = default;
};

struct Chart {
  std::array<std::string, kDim> names;
  std::array<std::optional<Interval>, kDim> ranges;

  std::optional<std::size_t> index_of(std::string_view name) const;
  friend bool operator==(const Chart&, const Chart&) = default;
};

/// Symmetric 4x4 metric given by one expression per unordered index pair.
/// Absent slots are identically zero.
struct MetricSpec {
  Chart chart;
  std::vector<std::pair<std::string, double>> params;
  std::array<std::optional<Expr>, 10> slots;

  /// Optional diagnostic hook naming the singular sets a point belongs to.
  /// Attached by the catalog for its own metrics; not part of the document.
  std::function<std::vector<std::string>(const Point4&, const ParamMap&)> singular_sets;

  const std::optional<Expr>& slot(std::size_t i, std::size_t j) const {
    return slots[sym_index(i, j)];
  }
  bool is_zero(std::size_t i, std::size_t j) const { return !slot(i, j).has_value(); }

  ParamMap defaults() const;
  /// Defaults with `overrides` applied; unknown names are rejected.
  ParamMap bind(const ParamMap& overrides) const;
  /// Throws ChartDomainError when `p` violates a declared interval.
  void check_point(const Point4& p, const ParamMap& params) const;

  /// Structural equality (the diagnostic hook is ignored).
  friend bool operator==(const MetricSpec& a, const MetricSpec& b) {
    return a.chart == b.chart && a.params == b.params && a.slots == b.slots;
  }
};

/// Parses a single expression over the given coordinate names and declared
/// parameters. `line` and `column_offset` position error messages.
Expr parse_expression(std::string_view text, const std::array<std::string, kDim>& coords,
                      const std::vector<std::string>& params, std::size_t line = 1,
                      std::size_t column_offset = 0);

MetricSpec parse_metric_document(std::string_view text);

/// Canonical document text; parse_metric_document(serialize(s)) == s.
std::string serialize_metric_document(const MetricSpec& spec);

}  // namespace gva
