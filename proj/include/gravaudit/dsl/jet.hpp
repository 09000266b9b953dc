#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace gva {

/// Number of chart coordinates. The engine only handles 4-dimensional charts.
inline constexpr std::size_t kDim = 4;

/// Packed index of the symmetric pair (i, j) in a 10-slot upper triangle.
constexpr std::size_t sym_index(std::size_t i, std::size_t j) {
  if (i > j) {
    const std::size_t tmp = i;
    i = j;
    j = tmp;
  }
  return i * kDim - i * (i - 1) / 2 + (j - i);
}

/// Value of a scalar field together with its first and second partial
/// derivatives with respect to the 4 chart coordinates. The Hessian is
/// stored as an upper triangle, so symmetry holds by construction.
struct Jet2 {
  double value = 0.0;
  std::array<double, kDim> grad{};
  std::array<double, 10> hess{};

  static Jet2 constant(double v) {
    Jet2 j;
    j.value = v;
    return j;
  }

  /// Seeds coordinate `index` with value v (unit gradient in that slot).
  static Jet2 variable(double v, std::size_t index) {
    Jet2 j;
    j.value = v;
    j.grad[index] = 1.0;
    return j;
  }

  double d(std::size_t i) const { return grad[i]; }
  double dd(std::size_t i, std::size_t j) const { return hess[sym_index(i, j)]; }

  /// Chain rule for a scalar function with derivatives f1 = f'(value),
  /// f2 = f''(value) evaluated by the caller. `f0` becomes the new value.
  Jet2 compose(double f0, double f1, double f2) const {
    Jet2 out;
    out.value = f0;
    for (std::size_t i = 0; i < kDim; ++i) out.grad[i] = f1 * grad[i];
    for (std::size_t i = 0; i < kDim; ++i) {
      for (std::size_t j = i; j < kDim; ++j) {
        const std::size_t k = sym_index(i, j);
        out.hess[k] = f1 * hess[k] + f2 * grad[i] * grad[j];
      }
    }
    return out;
  }

  Jet2 operator-() const {
    Jet2 out;
    out.value = -value;
    for (std::size_t i = 0; i < kDim; ++i) out.grad[i] = -grad[i];
    for (std::size_t k = 0; k < hess.size(); ++k) out.hess[k] = -hess[k];
    return out;
  }

  Jet2& operator+=(const Jet2& o) {
    value += o.value;
    for (std::size_t i = 0; i < kDim; ++i) grad[i] += o.grad[i];
    for (std::size_t k = 0; k < hess.size(); ++k) hess[k] += o.hess[k];
    return *this;
  }

  Jet2& operator-=(const Jet2& o) {
    value -= o.value;
    for (std::size_t i = 0; i < kDim; ++i) grad[i] -= o.grad[i];
    for (std::size_t k = 0; k < hess.size(); ++k) hess[k] -= o.hess[k];
    return *this;
  }

  Jet2& operator*=(double s) {
    value *= s;
    for (auto& g : grad) g *= s;
    for (auto& h : hess) h *= s;
    return *this;
  }
};

inline Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
inline Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
inline Jet2 operator*(Jet2 a, double s) { return a *= s; }
inline Jet2 operator*(double s, Jet2 a) { return a *= s; }

/// Leibniz rule to second order.
inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  Jet2 out;
  out.value = a.value * b.value;
  for (std::size_t i = 0; i < kDim; ++i) out.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
  for (std::size_t i = 0; i < kDim; ++i) {
    for (std::size_t j = i; j < kDim; ++j) {
      const std::size_t k = sym_index(i, j);
      out.hess[k] = a.hess[k] * b.value + a.value * b.hess[k] + a.grad[i] * b.grad[j] +
                    a.grad[j] * b.grad[i];
    }
  }
  return out;
}

/// Reciprocal; the caller guarantees b.value != 0.
inline Jet2 reciprocal(const Jet2& b) {
  const double inv = 1.0 / b.value;
  return b.compose(inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }

}  // namespace gva
