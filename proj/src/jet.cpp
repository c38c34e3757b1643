#include "phicurv/jet.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <unordered_map>

namespace phicurv {

namespace {

constexpr double kDivisionFloor = 1e-300;

std::uint64_t pack(const MultiIndex& mi, int dim) {
  std::uint64_t key = 0;
  for (int v = 0; v < dim; ++v) key = (key << 5) | mi.e[v];
  return key;
}

// Enumerate exponent vectors of total degree `deg` over `dim` variables in
// lexicographic order (first variable varies slowest, highest power first).
void enumerate_degree(int dim, int deg, int var, MultiIndex& work,
                      std::vector<MultiIndex>& out) {
  if (var == dim - 1) {
    work.e[var] = static_cast<std::uint8_t>(deg);
    work.deg = 0;
    for (int v = 0; v < dim; ++v) work.deg += work.e[v];
    out.push_back(work);
    work.e[var] = 0;
    return;
  }
  for (int d = deg; d >= 0; --d) {
    work.e[var] = static_cast<std::uint8_t>(d);
    enumerate_degree(dim, deg - d, var + 1, work, out);
  }
  work.e[var] = 0;
}

}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::ArityError: return "ArityError";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DivisionByZeroJet: return "DivisionByZeroJet";
    case ErrorKind::MixedBasePoint: return "MixedBasePoint";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::MetricNotPositiveDefinite: return "MetricNotPositiveDefinite";
    case ErrorKind::InsufficientJetOrder: return "InsufficientJetOrder";
    case ErrorKind::DimensionTooLow: return "DimensionTooLow";
    case ErrorKind::TargetChartExit: return "TargetChartExit";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::NotASoliton: return "NotASoliton";
    case ErrorKind::NotHarmonicEinstein: return "NotHarmonicEinstein";
    case ErrorKind::MaxIterations: return "MaxIterations";
    case ErrorKind::SingularNormalEquations: return "SingularNormalEquations";
    case ErrorKind::UnknownIdentityId: return "UnknownIdentityId";
    case ErrorKind::UsageError: return "UsageError";
  }
  return "Error";
}

JetSpace::JetSpace(int dim, int order) : dim_(dim), order_(order) {
  if (dim < 1 || dim > kMaxJetDim)
    fail(ErrorKind::IndexOutOfRange,
         "jet dimension must be in [1, " + std::to_string(kMaxJetDim) + "]");
  if (order < 0 || order > kMaxJetOrder)
    fail(ErrorKind::IndexOutOfRange,
         "jet order must be in [0, " + std::to_string(kMaxJetOrder) + "]");

  MultiIndex work{};
  for (int d = 0; d <= order; ++d) enumerate_degree(dim, d, 0, work, indices_);

  std::unordered_map<std::uint64_t, std::int32_t> rank_of;
  rank_of.reserve(indices_.size() * 2);
  for (std::size_t r = 0; r < indices_.size(); ++r)
    rank_of.emplace(pack(indices_[r], dim), static_cast<std::int32_t>(r));

  const int n = size();
  shift_up_.assign(static_cast<std::size_t>(n) * dim, -1);
  shift_down_.assign(static_cast<std::size_t>(n) * dim, -1);
  factorial_.resize(n);
  for (int r = 0; r < n; ++r) {
    double f = 1.0;
    for (int v = 0; v < dim; ++v) {
      for (int k = 2; k <= indices_[r].e[v]; ++k) f *= k;
      MultiIndex up = indices_[r];
      if (up.deg < order) {
        ++up.e[v];
        ++up.deg;
        shift_up_[r * dim_ + v] = rank_of.at(pack(up, dim));
      }
      if (indices_[r].e[v] > 0) {
        MultiIndex down = indices_[r];
        --down.e[v];
        --down.deg;
        shift_down_[r * dim_ + v] = rank_of.at(pack(down, dim));
      }
    }
    factorial_[r] = f;
  }

  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (indices_[a].deg + indices_[b].deg > order) continue;
      MultiIndex sum = indices_[a];
      for (int v = 0; v < dim; ++v) sum.e[v] += indices_[b].e[v];
      sum.deg += indices_[b].deg;
      mul_table_.push_back({a, b, rank_of.at(pack(sum, dim))});
    }
  }
}

int JetSpace::rank(const MultiIndex& mi) const {
  int deg = 0;
  for (int v = 0; v < dim_; ++v) deg += mi.e[v];
  if (deg > order_) return -1;
  // Linear scan is fine: rank() sits on setup paths only.
  for (int r = 0; r < size(); ++r)
    if (indices_[r] == mi) return r;
  return -1;
}

JetSpaceRef jet_space(int dim, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, JetSpaceRef> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{dim, order}];
  if (!slot) slot = std::make_shared<JetSpace>(dim, order);
  return slot;
}

Jet::Jet(JetSpaceRef space, std::vector<double> base_point)
    : space_(std::move(space)), base_(std::move(base_point)) {
  if (static_cast<int>(base_.size()) != space_->dim())
    fail(ErrorKind::IndexOutOfRange, "base point dimension mismatch");
  c_.assign(space_->size(), 0.0);
}

double Jet::coeff(const MultiIndex& mi) const {
  int r = space_->rank(mi);
  if (r < 0) fail(ErrorKind::IndexOutOfRange, "multi-index exceeds jet order");
  return c_[r];
}

double Jet::deriv(const MultiIndex& mi) const {
  int r = space_->rank(mi);
  if (r < 0) fail(ErrorKind::IndexOutOfRange, "multi-index exceeds jet order");
  return c_[r] * space_->factorial(r);
}

Jet jet_constant(const JetSpaceRef& space, std::vector<double> base_point,
                 double value) {
  Jet j(space, std::move(base_point));
  j.set_coeff(0, value);
  return j;
}

Jet lift_variable(int index, const JetSpaceRef& space,
                  std::vector<double> point) {
  if (index < 0 || index >= space->dim())
    fail(ErrorKind::IndexOutOfRange,
         "variable index " + std::to_string(index) + " out of range for dimension " +
             std::to_string(space->dim()));
  Jet j(space, std::move(point));
  j.set_coeff(0, j.base_point()[index]);
  if (space->order() >= 1) {
    MultiIndex mi{};
    mi.e[index] = 1;
    mi.deg = 1;
    j.set_coeff(space->rank(mi), 1.0);
  }
  return j;
}

Jet lift_variable(int index, std::vector<double> point, const JetConfig& cfg) {
  return lift_variable(index, jet_space(cfg), std::move(point));
}

namespace {

void check_compatible(const Jet& a, const Jet& b) {
  if (a.space() != b.space())
    fail(ErrorKind::MixedBasePoint, "jets live in different spaces");
  auto pa = a.base_point(), pb = b.base_point();
  for (std::size_t i = 0; i < pa.size(); ++i)
    if (pa[i] != pb[i])
      fail(ErrorKind::MixedBasePoint, "jets have different base points");
}

}  // namespace

Jet operator+(const Jet& a, const Jet& b) {
  check_compatible(a, b);
  Jet out = a;
  for (std::size_t i = 0; i < out.c_.size(); ++i) out.c_[i] += b.c_[i];
  return out;
}

Jet operator-(const Jet& a, const Jet& b) {
  check_compatible(a, b);
  Jet out = a;
  for (std::size_t i = 0; i < out.c_.size(); ++i) out.c_[i] -= b.c_[i];
  return out;
}

Jet operator*(const Jet& a, const Jet& b) {
  check_compatible(a, b);
  Jet out(a.space(), std::vector<double>(a.base_point().begin(), a.base_point().end()));
  const double* pa = a.c_.data();
  const double* pb = b.c_.data();
  double* pc = out.c_.data();
  for (const auto& t : a.space()->mul_table()) pc[t.c] += pa[t.a] * pb[t.b];
  return out;
}

Jet operator-(const Jet& a) {
  Jet out = a;
  for (auto& c : out.c_) c = -c;
  return out;
}

Jet operator+(const Jet& a, double s) {
  Jet out = a;
  out.set_coeff(0, out.value() + s);
  return out;
}
Jet operator+(double s, const Jet& a) { return a + s; }
Jet operator-(const Jet& a, double s) { return a + (-s); }
Jet operator-(double s, const Jet& a) { return (-a) + s; }
Jet operator*(const Jet& a, double s) {
  Jet out = a;
  for (std::size_t i = 0; i < out.coeffs().size(); ++i)
    out.set_coeff(static_cast<int>(i), out.coeff(static_cast<int>(i)) * s);
  return out;
}
Jet operator*(double s, const Jet& a) { return a * s; }
Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }
Jet operator/(double s, const Jet& a) { return recip(a) * s; }
Jet operator/(const Jet& a, const Jet& b) { return a * recip(b); }

namespace {

// F(u) for a jet u = c + w with nilpotent w: Horner evaluation of the exact
// truncated series sum_j taylor[j] * w^j, where taylor[j] = F^(j)(c)/j!.
Jet apply_series(const Jet& u, std::span<const double> taylor) {
  const int q = u.space()->order();
  Jet w = u;
  w.set_coeff(0, 0.0);
  Jet r = jet_constant(
      u.space(), std::vector<double>(u.base_point().begin(), u.base_point().end()),
      taylor[q]);
  for (int j = q - 1; j >= 0; --j) r = r * w + taylor[j];
  return r;
}

std::vector<double> series_buffer(const Jet& u) {
  return std::vector<double>(u.space()->order() + 1, 0.0);
}

}  // namespace

Jet sin(const Jet& a) {
  auto t = series_buffer(a);
  const double c = a.value();
  const double table[4] = {std::sin(c), std::cos(c), -std::sin(c), -std::cos(c)};
  double fact = 1.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (j > 1) fact *= j;
    t[j] = table[j % 4] / fact;
  }
  return apply_series(a, t);
}

Jet cos(const Jet& a) {
  auto t = series_buffer(a);
  const double c = a.value();
  const double table[4] = {std::cos(c), -std::sin(c), -std::cos(c), std::sin(c)};
  double fact = 1.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (j > 1) fact *= j;
    t[j] = table[j % 4] / fact;
  }
  return apply_series(a, t);
}

Jet exp(const Jet& a) {
  auto t = series_buffer(a);
  const double ec = std::exp(a.value());
  double fact = 1.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (j > 1) fact *= j;
    t[j] = ec / fact;
  }
  return apply_series(a, t);
}

Jet log(const Jet& a) {
  const double c = a.value();
  if (!(c > 0.0)) fail(ErrorKind::DomainError, "log of non-positive constant term");
  auto t = series_buffer(a);
  t[0] = std::log(c);
  double cp = c, sign = 1.0;
  for (std::size_t j = 1; j < t.size(); ++j) {
    t[j] = sign / (j * cp);
    cp *= c;
    sign = -sign;
  }
  return apply_series(a, t);
}

Jet sqrt(const Jet& a) {
  const double c = a.value();
  if (!(c > 0.0)) fail(ErrorKind::DomainError, "sqrt of non-positive constant term");
  return pow(a, 0.5);
}

Jet atan(const Jet& a) {
  const double c = a.value();
  auto t = series_buffer(a);
  t[0] = std::atan(c);
  // Taylor coefficients of 1/(1+x^2) at c, integrated termwise.
  const double a0 = 1.0 + c * c, a1 = 2.0 * c, a2 = 1.0;
  std::vector<double> v(t.size(), 0.0);
  v[0] = 1.0 / a0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    double acc = a1 * v[k - 1];
    if (k >= 2) acc += a2 * v[k - 2];
    v[k] = -acc / a0;
  }
  for (std::size_t j = 1; j < t.size(); ++j) t[j] = v[j - 1] / static_cast<double>(j);
  return apply_series(a, t);
}

Jet recip(const Jet& a) {
  const double c = a.value();
  if (std::abs(c) < kDivisionFloor)
    fail(ErrorKind::DivisionByZeroJet,
         "denominator constant term below machine-zero threshold");
  auto t = series_buffer(a);
  double cp = 1.0 / c, sign = 1.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    t[j] = sign * cp;
    cp /= c;
    sign = -sign;
  }
  return apply_series(a, t);
}

Jet pow(const Jet& a, long n) {
  if (n < 0) return recip(pow(a, -n));
  Jet result = jet_constant(
      a.space(), std::vector<double>(a.base_point().begin(), a.base_point().end()),
      1.0);
  Jet base = a;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

Jet pow(const Jet& a, double p) {
  double rounded = std::nearbyint(p);
  if (rounded == p && std::abs(p) < 1e9) return pow(a, static_cast<long>(rounded));
  const double c = a.value();
  if (!(c > 0.0))
    fail(ErrorKind::DomainError,
         "non-integer power requires a positive constant term");
  auto t = series_buffer(a);
  // Binomial series: C(p, j) * c^(p-j).
  double binom = 1.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (j > 0) binom *= (p - static_cast<double>(j - 1)) / static_cast<double>(j);
    t[j] = binom * std::pow(c, p - static_cast<double>(j));
  }
  return apply_series(a, t);
}

Jet partial(const Jet& a, int v) {
  const auto& space = *a.space();
  if (v < 0 || v >= space.dim())
    fail(ErrorKind::IndexOutOfRange, "partial derivative index out of range");
  Jet out(a.space(), std::vector<double>(a.base_point().begin(), a.base_point().end()));
  for (int r = 0; r < space.size(); ++r) {
    std::int32_t up = space.shift_up(r, v);
    if (up >= 0)
      out.set_coeff(r, a.coeff(up) * (space.index(r).e[v] + 1));
  }
  return out;
}

Jet jet_compose(const Jet& f, std::span<const Jet> subs) {
  const JetSpace& src = *f.space();
  if (static_cast<int>(subs.size()) != src.dim())
    fail(ErrorKind::ArityError, "jet_compose: one substitution per source variable");
  const JetSpaceRef dst = subs[0].space();
  std::vector<double> base(subs[0].base_point().begin(), subs[0].base_point().end());
  for (const Jet& s : subs) check_compatible(subs[0], s);
  for (int v = 0; v < src.dim(); ++v)
    if (subs[v].value() != f.base_point()[v])
      fail(ErrorKind::MixedBasePoint,
           "jet_compose: substitution constant term differs from the base point");

  // delta_v = subs_v - base_v are nilpotent; monomial products are built by
  // peeling one variable at a time along the graded order.
  std::vector<Jet> delta(subs.size());
  for (std::size_t v = 0; v < subs.size(); ++v) {
    delta[v] = subs[v];
    delta[v].set_coeff(0, 0.0);
  }
  std::vector<Jet> monomial(src.size());
  monomial[0] = jet_constant(dst, base, 1.0);
  Jet out = jet_constant(dst, base, 0.0);
  {
    auto oc = out.coeffs_mut();
    const double c0 = f.coeff(0);
    oc[0] += c0;
  }
  for (int r = 1; r < src.size(); ++r) {
    int v = 0;
    while (src.index(r).e[v] == 0) ++v;
    monomial[r] = monomial[src.shift_down(r, v)] * delta[v];
    const double coeff = f.coeff(r);
    if (coeff == 0.0) continue;
    auto oc = out.coeffs_mut();
    auto mc = monomial[r].coeffs();
    for (std::size_t i = 0; i < oc.size(); ++i) oc[i] += coeff * mc[i];
  }
  return out;
}

Jet jet_apply(JetOp op, std::span<const Jet> args) {
  auto expect = [&](std::size_t n) {
    if (args.size() != n)
      fail(ErrorKind::ArityError, "jet_apply: wrong number of arguments");
  };
  switch (op) {
    case JetOp::Add: expect(2); return args[0] + args[1];
    case JetOp::Sub: expect(2); return args[0] - args[1];
    case JetOp::Mul: expect(2); return args[0] * args[1];
    case JetOp::Div: expect(2); return args[0] / args[1];
    case JetOp::Pow: {
      expect(2);
      for (int r = 1; r < args[1].space()->size(); ++r)
        if (args[1].coeff(r) != 0.0)
          fail(ErrorKind::DomainError, "pow exponent must be a constant jet");
      return pow(args[0], args[1].value());
    }
    case JetOp::Sin: expect(1); return sin(args[0]);
    case JetOp::Cos: expect(1); return cos(args[0]);
    case JetOp::Exp: expect(1); return exp(args[0]);
    case JetOp::Log: expect(1); return log(args[0]);
    case JetOp::Sqrt: expect(1); return sqrt(args[0]);
    case JetOp::Atan: expect(1); return atan(args[0]);
  }
  fail(ErrorKind::ArityError, "unknown jet operation");
}

}  // namespace phicurv
