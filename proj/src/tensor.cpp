#include "phicurv/tensor.hpp"

#include <cmath>

#include "phicurv/errors.hpp"

namespace phicurv {

bool advance_index(std::span<int> idx, std::span<const int> extents) {
  for (int s = static_cast<int>(idx.size()) - 1; s >= 0; --s) {
    if (++idx[s] < extents[s]) return true;
    idx[s] = 0;
  }
  return false;
}

namespace {

template <typename T>
std::size_t offset_impl(const T& t, std::span<const int> idx) {
  if (idx.size() != t.sig.size())
    fail(ErrorKind::IndexOutOfRange, "tensor index rank mismatch");
  std::size_t off = 0;
  for (std::size_t s = 0; s < idx.size(); ++s) {
    const int ext = t.extent(static_cast<int>(s));
    if (idx[s] < 0 || idx[s] >= ext)
      fail(ErrorKind::IndexOutOfRange, "tensor index out of range");
    off = off * ext + static_cast<std::size_t>(idx[s]);
  }
  return off;
}

void check_same_shape(const std::vector<Slot>& a, const std::vector<Slot>& b) {
  if (a != b) fail(ErrorKind::IndexOutOfRange, "tensor signature mismatch");
}

}  // namespace

std::size_t TensorValue::offset(std::span<const int> idx) const {
  return offset_impl(*this, idx);
}

std::size_t JetField::offset(std::span<const int> idx) const {
  return offset_impl(*this, idx);
}

double TensorValue::max_abs() const {
  double r = 0.0;
  for (double v : comp) r = std::max(r, std::abs(v));
  return r;
}

TensorValue operator-(const TensorValue& a, const TensorValue& b) {
  check_same_shape(a.sig, b.sig);
  TensorValue out = a;
  for (std::size_t i = 0; i < out.comp.size(); ++i) out.comp[i] -= b.comp[i];
  return out;
}

TensorValue operator+(const TensorValue& a, const TensorValue& b) {
  check_same_shape(a.sig, b.sig);
  TensorValue out = a;
  for (std::size_t i = 0; i < out.comp.size(); ++i) out.comp[i] += b.comp[i];
  return out;
}

TensorValue operator*(double s, const TensorValue& a) {
  TensorValue out = a;
  for (double& v : out.comp) v *= s;
  return out;
}

TensorValue JetField::value(std::vector<double> point) const {
  TensorValue out;
  out.sig = sig;
  out.m = m;
  out.n = n;
  out.point = std::move(point);
  out.comp.resize(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out.comp[i] = c[i].value();
  return out;
}

JetField operator+(const JetField& a, const JetField& b) {
  check_same_shape(a.sig, b.sig);
  JetField out = a;
  out.valid = std::min(a.valid, b.valid);
  for (std::size_t i = 0; i < out.c.size(); ++i) out.c[i] = out.c[i] + b.c[i];
  return out;
}

JetField operator-(const JetField& a, const JetField& b) {
  check_same_shape(a.sig, b.sig);
  JetField out = a;
  out.valid = std::min(a.valid, b.valid);
  for (std::size_t i = 0; i < out.c.size(); ++i) out.c[i] = out.c[i] - b.c[i];
  return out;
}

JetField operator*(double s, const JetField& a) {
  JetField out = a;
  for (auto& j : out.c) j = j * s;
  return out;
}

JetField operator*(const Jet& s, const JetField& a) {
  JetField out = a;
  for (auto& j : out.c) j = s * j;
  return out;
}

}  // namespace phicurv
