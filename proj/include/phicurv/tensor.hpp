#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "phicurv/jet.hpp"

namespace phicurv {

/// Variance of one tensor slot. Cov/Con index the chart of M; NCov/NCon index
/// the pullback bundle of the target manifold.
enum class Slot : std::uint8_t { Cov, Con, NCov, NCon };

inline bool is_chart_slot(Slot s) { return s == Slot::Cov || s == Slot::Con; }

/// Dense multi-index iteration helper: advances `idx` odometer-style through
/// extents; returns false after the last tuple.
bool advance_index(std::span<int> idx, std::span<const int> extents);

/// Pointwise dense tensor with a variance signature.
struct TensorValue {
  std::vector<Slot> sig;
  std::vector<double> comp;
  std::vector<double> point;
  int m = 0;  // chart extent
  int n = 0;  // pullback extent

  int extent(int slot) const { return is_chart_slot(sig[slot]) ? m : n; }
  std::size_t size() const { return comp.size(); }
  std::size_t offset(std::span<const int> idx) const;
  double at(std::initializer_list<int> idx) const {
    return comp[offset(std::span<const int>(idx.begin(), idx.size()))];
  }
  double& at_mut(std::initializer_list<int> idx) {
    return comp[offset(std::span<const int>(idx.begin(), idx.size()))];
  }
  double max_abs() const;
};

TensorValue operator-(const TensorValue& a, const TensorValue& b);
TensorValue operator+(const TensorValue& a, const TensorValue& b);
TensorValue operator*(double s, const TensorValue& a);

/// Dense tensor of jets at a point together with the number of derivative
/// orders that are still trustworthy. Every covariant derivative consumes one
/// valid order; arithmetic takes the minimum of its operands.
struct JetField {
  std::vector<Slot> sig;
  std::vector<Jet> c;
  int valid = 0;
  int m = 0;
  int n = 0;

  int extent(int slot) const { return is_chart_slot(sig[slot]) ? m : n; }
  std::size_t size() const { return c.size(); }
  std::size_t offset(std::span<const int> idx) const;
  const Jet& at(std::initializer_list<int> idx) const {
    return c[offset(std::span<const int>(idx.begin(), idx.size()))];
  }
  Jet& at_mut(std::initializer_list<int> idx) {
    return c[offset(std::span<const int>(idx.begin(), idx.size()))];
  }

  /// Constant terms as a TensorValue at `point`.
  TensorValue value(std::vector<double> point) const;
};

JetField operator+(const JetField& a, const JetField& b);
JetField operator-(const JetField& a, const JetField& b);
JetField operator*(double s, const JetField& a);
JetField operator*(const Jet& s, const JetField& a);

}  // namespace phicurv
