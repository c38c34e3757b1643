#include "phicurv/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <optional>

#include "phicurv/frame.hpp"
#include "phicurv/frame_impl.hpp"

namespace phicurv {

bool Box::contains(std::span<const double> p, double margin) const {
  if (p.size() != lo.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] < lo[i] + margin || p[i] > hi[i] - margin) return false;
  return true;
}

std::optional<OracleTag> parse_oracle_tag(const std::string& text) {
  if (text.empty()) return std::nullopt;
  if (text == "euclidean") return OracleTag{OracleKind::Euclidean, 1.0};
  if (text == "torus") return OracleTag{OracleKind::Torus, 1.0};
  if (text == "conformal_e2x1") return OracleTag{OracleKind::ConformalE2X1, 1.0};
  if (text.rfind("sphere", 0) == 0) {
    double r = 1.0;
    auto colon = text.find(':');
    if (colon != std::string::npos) r = std::atof(text.c_str() + colon + 1);
    if (!(r > 0.0))
      fail(ErrorKind::ValidationError, "sphere oracle radius must be positive");
    return OracleTag{OracleKind::Sphere, r};
  }
  fail(ErrorKind::ValidationError, "unknown oracle tag '" + text + "'");
}

// ---------------------------------------------------------------------------
// Frame: construction and metric-level assembly.
// ---------------------------------------------------------------------------

Frame::Frame(FrameInputs inputs, std::vector<double> point)
    : impl_(std::make_unique<Impl>()) {
  impl_->in = std::move(inputs);
  impl_->pt = std::move(point);
  const GeometryData& geo = *impl_->in.geo;
  if (static_cast<int>(impl_->pt.size()) != geo.dim)
    fail(ErrorKind::IndexOutOfRange, "probe point dimension mismatch");
  impl_->m = geo.dim;
  impl_->nparams = static_cast<int>(impl_->in.ctx.param_values.size());
  impl_->base = impl_->pt;
  for (double v : impl_->in.ctx.param_values) impl_->base.push_back(v);
  impl_->sp = jet_space(impl_->m + impl_->nparams, impl_->in.ctx.order);
}

Frame::~Frame() = default;
Frame::Frame(Frame&&) noexcept = default;

int Frame::m() const { return impl_->m; }
int Frame::order() const { return impl_->in.ctx.order; }
double Frame::alpha() const { return impl_->in.alpha; }
const std::vector<double>& Frame::point() const { return impl_->pt; }
const JetSpaceRef& Frame::space() const { return impl_->sp; }
bool Frame::has_map() const { return impl_->in.map != nullptr; }
bool Frame::has_potential_f() const {
  return impl_->in.potential && impl_->in.potential->has_f();
}
bool Frame::has_vector_field() const {
  return impl_->in.potential && impl_->in.potential->has_X();
}

Jet Frame::make_constant(double v) const {
  return jet_constant(impl_->sp, impl_->base, v);
}

JetField Frame::make_field(std::vector<Slot> sig, int valid) const {
  JetField f;
  f.sig = std::move(sig);
  f.m = impl_->m;
  f.n = n();
  f.valid = valid;
  std::size_t size = 1;
  for (std::size_t s = 0; s < f.sig.size(); ++s) size *= f.extent(static_cast<int>(s));
  f.c.assign(size, Jet(impl_->sp, impl_->base));
  return f;
}

JetBinding Frame::Impl::chart_binding() const {
  JetBinding b;
  b.space = sp;
  b.base = base;
  b.coord_offset = 0;
  b.parameter_slots = in.ctx.param_slots.empty() ? nullptr : &in.ctx.param_slots;
  b.env = &in.geo->env;
  return b;
}

const JetField& Frame::metric() {
  auto& slot = impl_->g_;
  if (!slot) {
    const GeometryData& geo = *impl_->in.geo;
    JetField g = make_field({Slot::Cov, Slot::Cov}, order());
    JetBinding b = impl_->chart_binding();
    for (int i = 0; i < m(); ++i)
      for (int j = 0; j < m(); ++j)
        g.at_mut({i, j}) = eval_jet(geo.g(i, j), b);
    slot = std::move(g);
  }
  return *slot;
}

// Cholesky factor of the metric at jet level; the positive-definiteness check
// is the factorization itself.
const JetField& Frame::Impl::chol(Frame& f) {
  if (!chol_) {
    const JetField& g = f.metric();
    JetField L = f.make_field({Slot::Cov, Slot::Cov}, f.order());
    const int mm = f.m();
    for (int j = 0; j < mm; ++j) {
      Jet diag = g.at({j, j});
      for (int k = 0; k < j; ++k) diag = diag - L.at({j, k}) * L.at({j, k});
      if (!(diag.value() > 0.0)) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "metric is not positive definite at the probe point (pivot %d)",
                      j);
        fail(ErrorKind::MetricNotPositiveDefinite, buf);
      }
      L.at_mut({j, j}) = sqrt(diag);
      for (int i = j + 1; i < mm; ++i) {
        Jet v = g.at({i, j});
        for (int k = 0; k < j; ++k) v = v - L.at({i, k}) * L.at({j, k});
        L.at_mut({i, j}) = v / L.at({j, j});
      }
    }
    chol_ = std::move(L);
  }
  return *chol_;
}

const JetField& Frame::metric_chol() { return impl_->chol(*this); }

const JetField& Frame::metric_inv() {
  auto& slot = impl_->ginv_;
  if (!slot) {
    const JetField& L = impl_->chol(*this);
    const int mm = m();
    JetField inv = make_field({Slot::Con, Slot::Con}, order());
    // Column c of g^{-1}: forward then backward substitution on L L^T x = e_c.
    for (int col = 0; col < mm; ++col) {
      std::vector<Jet> y(mm), x(mm);
      for (int i = 0; i < mm; ++i) {
        Jet v = make_constant(i == col ? 1.0 : 0.0);
        for (int k = 0; k < i; ++k) v = v - L.at({i, k}) * y[k];
        y[i] = v / L.at({i, i});
      }
      for (int i = mm - 1; i >= 0; --i) {
        Jet v = y[i];
        for (int k = i + 1; k < mm; ++k) v = v - L.at({k, i}) * x[k];
        x[i] = v / L.at({i, i});
      }
      for (int row = 0; row < mm; ++row) inv.at_mut({row, col}) = x[row];
    }
    slot = std::move(inv);
  }
  return *slot;
}

const JetField& Frame::gamma() {
  auto& slot = impl_->gamma_;
  if (!slot) {
    const JetField& g = metric();
    const JetField& ginv = metric_inv();
    const int mm = m();
    JetField out = make_field({Slot::Con, Slot::Cov, Slot::Cov}, order() - 1);
    for (int i = 0; i < mm; ++i) {
      for (int j = i; j < mm; ++j) {
        std::vector<Jet> lowered(mm);  // (d_i g_jl + d_j g_il - d_l g_ij)
        for (int l = 0; l < mm; ++l)
          lowered[l] = partial(g.at({j, l}), i) + partial(g.at({i, l}), j) -
                       partial(g.at({i, j}), l);
        for (int k = 0; k < mm; ++k) {
          Jet v = make_constant(0.0);
          for (int l = 0; l < mm; ++l) v = v + ginv.at({k, l}) * lowered[l];
          v = 0.5 * v;
          out.at_mut({k, i, j}) = v;
          if (i != j) out.at_mut({k, j, i}) = v;
        }
      }
    }
    slot = std::move(out);
  }
  return *slot;
}

const JetField& Frame::riemann_up() {
  auto& slot = impl_->riem_up_;
  if (!slot) {
    if (m() < 2) fail(ErrorKind::DimensionTooLow, "curvature requires dimension >= 2");
    if (order() < 2)
      fail(ErrorKind::InsufficientJetOrder, "curvature requires jet order >= 2");
    const JetField& G = gamma();
    const int mm = m();
    JetField out =
        make_field({Slot::Con, Slot::Cov, Slot::Cov, Slot::Cov}, order() - 2);
    // R^l_{jkt} = d_k Gamma^l_{tj} - d_t Gamma^l_{kj}
    //           + Gamma^l_{ks} Gamma^s_{tj} - Gamma^l_{ts} Gamma^s_{kj}
    for (int l = 0; l < mm; ++l)
      for (int j = 0; j < mm; ++j)
        for (int k = 0; k < mm; ++k)
          for (int t = k + 1; t < mm; ++t) {
            Jet v = partial(G.at({l, t, j}), k) - partial(G.at({l, k, j}), t);
            for (int s = 0; s < mm; ++s)
              v = v + G.at({l, k, s}) * G.at({s, t, j}) -
                  G.at({l, t, s}) * G.at({s, k, j});
            out.at_mut({l, j, k, t}) = v;
            out.at_mut({l, j, t, k}) = -v;
          }
    slot = std::move(out);
  }
  return *slot;
}

const JetField& Frame::riemann() {
  auto& slot = impl_->riem_;
  if (!slot) {
    const JetField& up = riemann_up();
    const JetField& g = metric();
    const int mm = m();
    JetField out =
        make_field({Slot::Cov, Slot::Cov, Slot::Cov, Slot::Cov}, up.valid);
    for (int i = 0; i < mm; ++i)
      for (int j = 0; j < mm; ++j)
        for (int k = 0; k < mm; ++k)
          for (int t = 0; t < mm; ++t) {
            Jet v = make_constant(0.0);
            for (int l = 0; l < mm; ++l) v = v + g.at({i, l}) * up.at({l, j, k, t});
            out.at_mut({i, j, k, t}) = v;
          }
    slot = std::move(out);
  }
  return *slot;
}

const JetField& Frame::ricci() {
  auto& slot = impl_->ric_;
  if (!slot) {
    const JetField& up = riemann_up();
    const int mm = m();
    JetField out = make_field({Slot::Cov, Slot::Cov}, up.valid);
    for (int j = 0; j < mm; ++j)
      for (int t = 0; t < mm; ++t) {
        Jet v = make_constant(0.0);
        for (int k = 0; k < mm; ++k) v = v + up.at({k, j, k, t});
        out.at_mut({j, t}) = v;
      }
    slot = std::move(out);
  }
  return *slot;
}

const Jet& Frame::scalar_curv() {
  auto& slot = impl_->scal_;
  if (!slot) {
    const JetField& ric = ricci();
    const JetField& ginv = metric_inv();
    Jet v = make_constant(0.0);
    for (int i = 0; i < m(); ++i)
      for (int j = 0; j < m(); ++j) v = v + ginv.at({i, j}) * ric.at({i, j});
    slot = std::move(v);
  }
  return *slot;
}

const JetField& Frame::nabla_riemann() {
  auto& slot = impl_->nabla_riem_;
  if (!slot) slot = nabla(riemann());
  return *slot;
}

// ---------------------------------------------------------------------------
// Machinery.
// ---------------------------------------------------------------------------

JetField Frame::nabla(const JetField& t) const {
  if (t.valid < 1)
    fail(ErrorKind::InsufficientJetOrder,
         "covariant derivative would exceed the trusted jet order");
  Frame& self = const_cast<Frame&>(*this);
  const JetField& G = self.gamma();
  bool has_target_slot = false;
  for (Slot s : t.sig) has_target_slot |= !is_chart_slot(s);
  const JetField* NG = has_target_slot ? &self.ngamma_dphi() : nullptr;

  JetField out;
  out.sig = t.sig;
  out.sig.push_back(Slot::Cov);
  out.m = t.m;
  out.n = t.n;
  out.valid = t.valid - 1;
  out.c.assign(t.c.size() * static_cast<std::size_t>(m()), Jet(impl_->sp, impl_->base));

  const int rank = static_cast<int>(t.sig.size());
  std::vector<int> idx(rank, 0);
  std::vector<int> extents(rank);
  for (int s = 0; s < rank; ++s) extents[s] = t.extent(s);
  std::vector<int> work(rank);
  std::size_t flat = 0;
  if (!t.c.empty()) do {
      for (int k = 0; k < m(); ++k) {
        Jet r = partial(t.c[flat], k);
        for (int s = 0; s < rank; ++s) {
          work = idx;
          switch (t.sig[s]) {
            case Slot::Cov:
              for (int h = 0; h < m(); ++h) {
                work[s] = h;
                r = r - G.at({h, idx[s], k}) * t.c[t.offset(work)];
              }
              break;
            case Slot::Con:
              for (int h = 0; h < m(); ++h) {
                work[s] = h;
                r = r + G.at({idx[s], h, k}) * t.c[t.offset(work)];
              }
              break;
            case Slot::NCon:
              for (int b = 0; b < t.n; ++b) {
                work[s] = b;
                r = r + NG->at({idx[s], b, k}) * t.c[t.offset(work)];
              }
              break;
            case Slot::NCov:
              for (int b = 0; b < t.n; ++b) {
                work[s] = b;
                r = r - NG->at({b, idx[s], k}) * t.c[t.offset(work)];
              }
              break;
          }
        }
        out.c[flat * m() + k] = std::move(r);
      }
      ++flat;
    } while (advance_index(idx, extents));
  return out;
}

namespace {

// Contract `slot` of t against the matrix field M2 (first index is the new
// slot), replacing its variance with `new_kind`.
JetField contract_slot(const JetField& t, int slot, const JetField& m2,
                       Slot new_kind) {
  JetField out;
  out.sig = t.sig;
  out.sig[slot] = new_kind;
  out.m = t.m;
  out.n = t.n;
  out.valid = std::min(t.valid, m2.valid);
  out.c.assign(t.c.size(), Jet(t.c.empty() ? nullptr : t.c[0].space(),
                               t.c.empty() ? std::vector<double>{}
                                           : std::vector<double>(
                                                 t.c[0].base_point().begin(),
                                                 t.c[0].base_point().end())));
  const int rank = static_cast<int>(t.sig.size());
  const int ext = t.extent(slot);
  std::vector<int> idx(rank, 0);
  std::vector<int> extents(rank);
  for (int s = 0; s < rank; ++s) extents[s] = t.extent(s);
  std::vector<int> work(rank);
  std::size_t flat = 0;
  do {
    Jet v = out.c[flat];
    work = idx;
    for (int h = 0; h < ext; ++h) {
      work[slot] = h;
      v = v + m2.at({idx[slot], h}) * t.c[t.offset(work)];
    }
    out.c[flat] = std::move(v);
    ++flat;
  } while (advance_index(idx, extents));
  return out;
}

}  // namespace

JetField Frame::raise(const JetField& t, int slot) const {
  Frame& self = const_cast<Frame&>(*this);
  switch (t.sig[slot]) {
    case Slot::Cov:
      return contract_slot(t, slot, self.metric_inv(), Slot::Con);
    case Slot::NCov:
      return contract_slot(t, slot, self.hinv_pull(), Slot::NCon);
    default:
      fail(ErrorKind::IndexOutOfRange, "raise: slot is already contravariant");
  }
}

JetField Frame::lower(const JetField& t, int slot) const {
  Frame& self = const_cast<Frame&>(*this);
  switch (t.sig[slot]) {
    case Slot::Con:
      return contract_slot(t, slot, self.metric(), Slot::Cov);
    case Slot::NCon:
      return contract_slot(t, slot, self.h_pull(), Slot::NCov);
    default:
      fail(ErrorKind::IndexOutOfRange, "lower: slot is already covariant");
  }
}

namespace {

JetField trace_pair(const Frame& f, const JetField& t, int s1, int s2,
                    const JetField* weight) {
  if (s1 > s2) std::swap(s1, s2);
  if (s1 == s2 || t.extent(s1) != t.extent(s2))
    fail(ErrorKind::IndexOutOfRange, "trace: incompatible slots");
  JetField out;
  out.m = t.m;
  out.n = t.n;
  out.valid = weight ? std::min(t.valid, weight->valid) : t.valid;
  for (int s = 0; s < static_cast<int>(t.sig.size()); ++s)
    if (s != s1 && s != s2) out.sig.push_back(t.sig[s]);
  std::size_t size = 1;
  for (std::size_t s = 0; s < out.sig.size(); ++s)
    size *= out.extent(static_cast<int>(s));
  Jet zero = f.make_constant(0.0);
  out.c.assign(size, zero);

  const int rank = static_cast<int>(t.sig.size());
  std::vector<int> idx(rank, 0);
  std::vector<int> extents(rank);
  for (int s = 0; s < rank; ++s) extents[s] = t.extent(s);
  std::vector<int> out_idx;
  out_idx.reserve(rank);
  std::size_t flat = 0;
  do {
    out_idx.clear();
    for (int s = 0; s < rank; ++s)
      if (s != s1 && s != s2) out_idx.push_back(idx[s]);
    const std::size_t off = out.offset(out_idx);
    if (weight) {
      out.c[off] = out.c[off] + weight->at({idx[s1], idx[s2]}) * t.c[flat];
    } else if (idx[s1] == idx[s2]) {
      out.c[off] = out.c[off] + t.c[flat];
    }
    ++flat;
  } while (advance_index(idx, extents));
  return out;
}

}  // namespace

JetField Frame::trace_chart(const JetField& t, int s1, int s2) const {
  Frame& self = const_cast<Frame&>(*this);
  const Slot a = t.sig[s1], b = t.sig[s2];
  if (a == Slot::Cov && b == Slot::Cov)
    return trace_pair(*this, t, s1, s2, &self.metric_inv());
  if (a == Slot::Con && b == Slot::Con)
    return trace_pair(*this, t, s1, s2, &self.metric());
  if (is_chart_slot(a) && is_chart_slot(b))
    return trace_pair(*this, t, s1, s2, nullptr);
  fail(ErrorKind::IndexOutOfRange, "trace_chart: slots are not chart slots");
}

JetField Frame::trace_target(const JetField& t, int s1, int s2) const {
  Frame& self = const_cast<Frame&>(*this);
  const Slot a = t.sig[s1], b = t.sig[s2];
  if (a == Slot::NCov && b == Slot::NCov)
    return trace_pair(*this, t, s1, s2, &self.hinv_pull());
  if (a == Slot::NCon && b == Slot::NCon)
    return trace_pair(*this, t, s1, s2, &self.h_pull());
  if (!is_chart_slot(a) && !is_chart_slot(b))
    return trace_pair(*this, t, s1, s2, nullptr);
  fail(ErrorKind::IndexOutOfRange, "trace_target: slots are not pullback slots");
}

TensorValue Frame::value(const JetField& t) const { return t.value(impl_->pt); }

double Frame::norm2(const JetField& t) { return norm2(value(t)); }

double Frame::norm2(const TensorValue& t) {
  // Raise every slot at the value level, then contract against the original.
  const int rank = static_cast<int>(t.sig.size());
  if (rank == 0) return t.comp[0] * t.comp[0];
  const TensorValue gv = value(metric());
  const TensorValue giv = value(metric_inv());
  TensorValue hv, hiv;
  bool need_target = false;
  for (Slot s : t.sig) need_target |= !is_chart_slot(s);
  if (need_target) {
    hv = value(h_pull());
    hiv = value(hinv_pull());
  }
  std::vector<double> cur = t.comp;
  std::vector<int> extents(rank);
  for (int s = 0; s < rank; ++s) extents[s] = t.extent(s);
  for (int s = 0; s < rank; ++s) {
    const TensorValue* w = nullptr;
    switch (t.sig[s]) {
      case Slot::Cov: w = &giv; break;
      case Slot::Con: w = &gv; break;
      case Slot::NCov: w = &hiv; break;
      case Slot::NCon: w = &hv; break;
    }
    std::vector<double> next(cur.size(), 0.0);
    std::vector<int> idx(rank, 0);
    std::vector<int> work(rank);
    std::size_t flat = 0;
    do {
      work = idx;
      double acc = 0.0;
      for (int h = 0; h < extents[s]; ++h) {
        work[s] = h;
        acc += w->at({idx[s], h}) * cur[t.offset(work)];
      }
      next[flat] = acc;
      ++flat;
    } while (advance_index(idx, extents));
    cur = std::move(next);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < cur.size(); ++i) total += cur[i] * t.comp[i];
  return total;
}

double Frame::norm(const JetField& t) { return std::sqrt(std::max(0.0, norm2(t))); }

// ---------------------------------------------------------------------------
// Public pointwise operations.
// ---------------------------------------------------------------------------

namespace {

Frame geometry_frame(const GeometryData& geo, const std::vector<double>& p,
                     int order, const PotentialData* pot = nullptr) {
  FrameInputs in;
  in.geo = &geo;
  in.potential = pot;
  in.ctx.order = order;
  return Frame(std::move(in), p);
}

}  // namespace

TensorValue christoffel(const GeometryData& geo, const std::vector<double>& p,
                        int order) {
  Frame f = geometry_frame(geo, p, order);
  return f.value(f.gamma());
}

CurvatureResult curvature(const GeometryData& geo, const std::vector<double>& p,
                          int order) {
  Frame f = geometry_frame(geo, p, order);
  return {f.value(f.riemann()), f.value(f.ricci()), f.scalar_curv().value()};
}

LaplacianResult hessian_and_laplacians(const GeometryData& geo,
                                       const PotentialData& pot,
                                       const std::vector<double>& p,
                                       const ExprPtr& u, int order) {
  Frame f = geometry_frame(geo, p, order, &pot);
  LaplacianResult out;
  out.hess_f = f.value(f.hess_f());
  out.lap_f = f.trace_chart(f.hess_f(), 0, 1).c[0].value();
  if (u) {
    JetBinding b;
    b.space = f.space();
    b.base = p;
    b.env = &geo.env;
    Jet uj = eval_jet(*u, b);
    JetField du = f.make_field({Slot::Cov}, order - 1);
    for (int i = 0; i < geo.dim; ++i) du.at_mut({i}) = partial(uj, i);
    JetField hess_u = f.nabla(du);
    double lap_u = f.trace_chart(hess_u, 0, 1).c[0].value();
    // <grad f, grad u> with one raised slot.
    JetField df_up = f.raise(f.grad_f(), 0);
    double inner = 0.0;
    for (int i = 0; i < geo.dim; ++i)
      inner += df_up.at({i}).value() * du.at({i}).value();
    out.lap_f_u = lap_u - inner;
    if (pot.has_X()) {
      const JetField& X = f.vector_field();
      double xin = 0.0;
      for (int i = 0; i < geo.dim; ++i)
        xin += X.at({i}).value() * du.at({i}).value();
      out.lap_X_u = lap_u - xin;
    }
  }
  return out;
}

TensorValue lie_derivative_metric(const GeometryData& geo,
                                  const std::vector<ExprPtr>& X,
                                  const std::vector<double>& p, int order) {
  PotentialData pot;
  pot.X = X;
  Frame f = geometry_frame(geo, p, order, &pot);
  JetField x_low = f.lower(f.vector_field(), 0);
  JetField dx = f.nabla(x_low);
  JetField lie = f.make_field({Slot::Cov, Slot::Cov}, dx.valid);
  for (int i = 0; i < geo.dim; ++i)
    for (int j = 0; j < geo.dim; ++j)
      lie.at_mut({i, j}) = dx.at({j, i}) + dx.at({i, j});
  return f.value(lie);
}

TensorValue covariant_derivative(Frame& frame, const JetField& t, int depth) {
  if (depth < 1 || depth > 3)
    fail(ErrorKind::IndexOutOfRange, "derivative depth must be 1, 2 or 3");
  JetField current = t;
  for (int d = 0; d < depth; ++d) current = frame.nabla(current);
  return frame.value(current);
}

TensorValue kulkarni_nomizu(const TensorValue& A, const TensorValue& B) {
  if (A.sig.size() != 2 || B.sig.size() != 2 || A.m != B.m)
    fail(ErrorKind::IndexOutOfRange, "kulkarni_nomizu expects two 2-tensors");
  TensorValue out;
  out.sig = {A.sig[0], A.sig[0], A.sig[0], A.sig[0]};
  out.m = A.m;
  out.n = A.n;
  out.point = A.point;
  const int mm = A.m;
  out.comp.assign(static_cast<std::size_t>(mm) * mm * mm * mm, 0.0);
  for (int t = 0; t < mm; ++t)
    for (int i = 0; i < mm; ++i)
      for (int j = 0; j < mm; ++j)
        for (int k = 0; k < mm; ++k)
          out.at_mut({t, i, j, k}) = A.at({t, j}) * B.at({i, k}) -
                                     A.at({t, k}) * B.at({i, j}) +
                                     A.at({i, k}) * B.at({t, j}) -
                                     A.at({i, j}) * B.at({t, k});
  return out;
}

TensorValue traceless_part(const TensorValue& A, const GeometryData& geo,
                           const std::vector<double>& p, int order) {
  Frame f = geometry_frame(geo, p, order);
  const TensorValue gv = f.value(f.metric());
  const TensorValue giv = f.value(f.metric_inv());
  double tr = 0.0;
  for (int i = 0; i < geo.dim; ++i)
    for (int j = 0; j < geo.dim; ++j) tr += giv.at({i, j}) * A.at({i, j});
  TensorValue out = A;
  for (int i = 0; i < geo.dim; ++i)
    for (int j = 0; j < geo.dim; ++j)
      out.at_mut({i, j}) -= tr / geo.dim * gv.at({i, j});
  return out;
}

// ---------------------------------------------------------------------------
// Closed-form oracles.
// ---------------------------------------------------------------------------

namespace {

TensorValue zeros(const GeometryData& geo, const std::vector<double>& p,
                  std::vector<Slot> sig) {
  TensorValue t;
  t.sig = std::move(sig);
  t.m = geo.dim;
  t.n = 0;
  t.point = p;
  std::size_t size = 1;
  for (std::size_t s = 0; s < t.sig.size(); ++s) size *= geo.dim;
  t.comp.assign(size, 0.0);
  return t;
}

// Metric of the round sphere chart: w_i = R^2 prod_{l<i} sin^2(theta_l).
std::vector<double> sphere_weights(int m, double radius,
                                   const std::vector<double>& p) {
  std::vector<double> w(m);
  double acc = radius * radius;
  for (int i = 0; i < m; ++i) {
    w[i] = acc;
    acc *= std::sin(p[i]) * std::sin(p[i]);
  }
  return w;
}

OracleCurvature sphere_oracle(const GeometryData& geo, double radius,
                              const std::vector<double>& p) {
  const int m = geo.dim;
  OracleCurvature out;
  out.gamma = zeros(geo, p, {Slot::Con, Slot::Cov, Slot::Cov});
  out.riem = zeros(geo, p, {Slot::Cov, Slot::Cov, Slot::Cov, Slot::Cov});
  out.ric = zeros(geo, p, {Slot::Cov, Slot::Cov});
  auto w = sphere_weights(m, radius, p);
  for (int k = 0; k < m; ++k) {
    const double cotk = std::cos(p[k]) / std::sin(p[k]);
    for (int i = k + 1; i < m; ++i) {
      out.gamma.at_mut({k, i, i}) = -w[i] * cotk / w[k];
      out.gamma.at_mut({i, k, i}) = cotk;
      out.gamma.at_mut({i, i, k}) = cotk;
    }
  }
  const double K = 1.0 / (radius * radius);
  for (int i = 0; i < m; ++i) {
    out.ric.at_mut({i, i}) = (m - 1) * K * w[i];
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      // Constant curvature: R_ijkt = K (g_ik g_jt - g_it g_jk), diagonal g.
      out.riem.at_mut({i, j, i, j}) = K * w[i] * w[j];
      out.riem.at_mut({i, j, j, i}) = -K * w[i] * w[j];
    }
  }
  out.scalar = m * (m - 1) * K;
  return out;
}

OracleCurvature conformal_oracle(const GeometryData& geo,
                                 const std::vector<double>& p) {
  OracleCurvature out;
  out.gamma = zeros(geo, p, {Slot::Con, Slot::Cov, Slot::Cov});
  out.riem = zeros(geo, p, {Slot::Cov, Slot::Cov, Slot::Cov, Slot::Cov});
  out.ric = zeros(geo, p, {Slot::Cov, Slot::Cov});
  // g = e^{2 x1} delta on R^2: Gamma^k_ij = d_ik u_j + d_jk u_i - d_ij u_k
  // with u = x1, and the metric is flat since u is harmonic.
  out.gamma.at_mut({0, 0, 0}) = 1.0;
  out.gamma.at_mut({0, 1, 1}) = -1.0;
  out.gamma.at_mut({1, 0, 1}) = 1.0;
  out.gamma.at_mut({1, 1, 0}) = 1.0;
  out.scalar = 0.0;
  return out;
}

}  // namespace

OracleCurvature oracle_curvature(const GeometryData& geo,
                                 const std::vector<double>& p) {
  if (!geo.oracle)
    fail(ErrorKind::ValidationError, "geometry carries no closed-form oracle tag");
  switch (geo.oracle->kind) {
    case OracleKind::Euclidean:
    case OracleKind::Torus: {
      OracleCurvature out;
      out.gamma = zeros(geo, p, {Slot::Con, Slot::Cov, Slot::Cov});
      out.riem = zeros(geo, p, {Slot::Cov, Slot::Cov, Slot::Cov, Slot::Cov});
      out.ric = zeros(geo, p, {Slot::Cov, Slot::Cov});
      out.scalar = 0.0;
      return out;
    }
    case OracleKind::Sphere:
      return sphere_oracle(geo, geo.oracle->radius, p);
    case OracleKind::ConformalE2X1:
      if (geo.dim != 2)
        fail(ErrorKind::ValidationError, "conformal_e2x1 oracle requires m = 2");
      return conformal_oracle(geo, p);
  }
  fail(ErrorKind::ValidationError, "unknown oracle tag");
}

}  // namespace phicurv
