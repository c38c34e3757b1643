#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "phicurv/errors.hpp"

namespace phicurv {

/// Hard cap on chart dimension plus ansatz parameters lifted as jet variables.
inline constexpr int kMaxJetDim = 12;
/// Hard cap on the truncation order.
inline constexpr int kMaxJetOrder = 8;

/// Exponent vector of a monomial, total degree cached.
struct MultiIndex {
  std::array<std::uint8_t, kMaxJetDim> e{};
  std::uint8_t deg = 0;

  bool operator==(const MultiIndex&) const = default;
};

struct JetConfig {
  int order = 4;
  int dimension = 1;
};

/// Shared immutable tables for all jets of a given (dimension, order):
/// the graded-lex multi-index list, the truncated-convolution pair table and
/// the derivative shift tables. Obtained through jet_space(), which caches
/// one instance per configuration.
class JetSpace {
 public:
  JetSpace(int dim, int order);

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  /// Number of multi-indices of total degree <= order, i.e. C(dim+order, order).
  int size() const noexcept { return static_cast<int>(indices_.size()); }

  const MultiIndex& index(int rank) const { return indices_[rank]; }
  std::span<const MultiIndex> indices() const { return indices_; }

  /// Rank of a multi-index, or -1 when its degree exceeds the order.
  int rank(const MultiIndex& mi) const;

  struct MulTriple {
    std::int32_t a, b, c;  // out[c] += lhs[a] * rhs[b]
  };
  std::span<const MulTriple> mul_table() const { return mul_table_; }

  /// Rank of index(r) + e_v, or -1 when that leaves the truncation.
  std::int32_t shift_up(int r, int v) const { return shift_up_[r * dim_ + v]; }
  /// Rank of index(r) - e_v, or -1 when index(r)[v] == 0.
  std::int32_t shift_down(int r, int v) const { return shift_down_[r * dim_ + v]; }

  /// Product of the componentwise factorials of index(r).
  double factorial(int r) const { return factorial_[r]; }

 private:
  int dim_;
  int order_;
  std::vector<MultiIndex> indices_;
  std::vector<MulTriple> mul_table_;
  std::vector<std::int32_t> shift_up_;
  std::vector<std::int32_t> shift_down_;
  std::vector<double> factorial_;
};

using JetSpaceRef = std::shared_ptr<const JetSpace>;

/// Cached, thread-safe lookup of the space for a given configuration.
JetSpaceRef jet_space(int dim, int order);
inline JetSpaceRef jet_space(const JetConfig& cfg) {
  return jet_space(cfg.dimension, cfg.order);
}

/// Truncated multivariate Taylor expansion of a scalar at a fixed base point.
/// Coefficients are Taylor coefficients (derivative / multi-factorial); the
/// factorial is applied only in deriv(). Values are immutable after
/// construction apart from explicit coefficient assignment during assembly.
class Jet {
 public:
  Jet() = default;
  Jet(JetSpaceRef space, std::vector<double> base_point);

  const JetSpaceRef& space() const noexcept { return space_; }
  std::span<const double> base_point() const { return base_; }

  double value() const { return c_[0]; }
  double coeff(int rank) const { return c_[rank]; }
  double coeff(const MultiIndex& mi) const;
  void set_coeff(int rank, double v) { c_[rank] = v; }

  /// Partial derivative of the represented scalar: coeff * multi-factorial.
  double deriv(const MultiIndex& mi) const;

  std::span<const double> coeffs() const { return c_; }
  std::span<double> coeffs_mut() { return c_; }

 private:
  JetSpaceRef space_;
  std::vector<double> base_;
  std::vector<double> c_;

  friend Jet operator+(const Jet&, const Jet&);
  friend Jet operator-(const Jet&, const Jet&);
  friend Jet operator*(const Jet&, const Jet&);
  friend Jet operator-(const Jet&);
};

/// Jet of the constant function `value`.
Jet jet_constant(const JetSpaceRef& space, std::vector<double> base_point,
                 double value);

/// Jet of the coordinate function x_index at `point`.
Jet lift_variable(int index, std::vector<double> point, const JetConfig& cfg);
Jet lift_variable(int index, const JetSpaceRef& space,
                  std::vector<double> point);

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);

Jet operator+(const Jet& a, double s);
Jet operator+(double s, const Jet& a);
Jet operator-(const Jet& a, double s);
Jet operator-(double s, const Jet& a);
Jet operator*(const Jet& a, double s);
Jet operator*(double s, const Jet& a);
Jet operator/(const Jet& a, double s);
Jet operator/(double s, const Jet& a);

Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
Jet atan(const Jet& a);
/// 1/a; denominator constant term below the machine-zero threshold throws.
Jet recip(const Jet& a);
/// Integer power by binary exponentiation; exact on polynomial inputs.
Jet pow(const Jet& a, long n);
/// Real power via the binomial series; requires a positive constant term.
Jet pow(const Jet& a, double p);

/// Derivative of the represented scalar with respect to variable v, as a jet.
/// Coefficients of top degree in the result are zeroed; the caller is
/// responsible for tracking the loss of one valid order.
Jet partial(const Jet& a, int v);

/// Substitution of jets into a jet: `f` lives in its own source space; `subs`
/// provides one destination-space jet per source variable whose constant term
/// equals the corresponding coordinate of f's base point. Returns the jet of
/// the composite in the destination space, exact through min(orders).
Jet jet_compose(const Jet& f, std::span<const Jet> subs);

enum class JetOp { Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Log, Sqrt, Atan };

/// Enum-dispatched application; Pow expects args[1] to be a constant jet.
Jet jet_apply(JetOp op, std::span<const Jet> args);

}  // namespace phicurv
