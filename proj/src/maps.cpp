#include "phicurv/maps.hpp"

#include <cmath>
#include <cstdio>

#include "phicurv/frame.hpp"
#include "phicurv/frame_impl.hpp"

namespace phicurv {

namespace {

// Constant map to flat R^1, substituted when no map is declared so that the
// phi-curvatures reduce to the classical ones.
std::unique_ptr<MapData> make_trivial_map() {
  auto map = std::make_unique<MapData>();
  map->target.dim = 1;
  map->target.family = VarFamily::Target;
  map->target.env.target_dim = 1;
  map->target.metric = {parse("1", map->target.env, VarFamily::Target)};
  map->target.box.lo = {-1e300};
  map->target.box.hi = {1e300};
  map->flat_target = true;
  FieldEnv chart_env;
  chart_env.chart_dim = 1;  // the expression "0" references no coordinate
  map->components = {parse("0", chart_env, VarFamily::Chart)};
  return map;
}

}  // namespace

const MapData& Frame::Impl::map() {
  if (in.map) return *in.map;
  if (!trivial_map_) trivial_map_ = make_trivial_map();
  return *trivial_map_;
}

int Frame::n() const { return impl_->map().target.dim; }

// --- raw map jets ------------------------------------------------------------

namespace {

const std::vector<Jet>& phi_jets(Frame& f, Frame::Impl& impl) {
  if (!impl.phi_jets_) {
    const MapData& map = impl.map();
    JetBinding b = impl.chart_binding();
    std::vector<Jet> jets;
    jets.reserve(map.components.size());
    for (const auto& comp : map.components) jets.push_back(eval_jet(*comp, b));
    (void)f;
    impl.phi_jets_ = std::move(jets);
  }
  return *impl.phi_jets_;
}

Frame& target_frame(Frame& f, Frame::Impl& impl) {
  if (!impl.target_) {
    FrameInputs in;
    in.geo = &impl.map().target;
    in.ctx = impl.in.ctx;
    impl.target_ = std::make_unique<Frame>(std::move(in), f.map_point());
  }
  return *impl.target_;
}

// Compose a target-space jet field along phi (and identity on parameters).
JetField compose_field(Frame& f, Frame::Impl& impl, const JetField& src) {
  const auto& phis = phi_jets(f, impl);
  const int n = f.n();
  std::vector<Jet> subs;
  subs.reserve(n + impl.nparams);
  for (int a = 0; a < n; ++a) subs.push_back(phis[a]);
  for (int j = 0; j < impl.nparams; ++j)
    subs.push_back(lift_variable(impl.m + j, impl.sp, impl.base));
  JetField out;
  out.sig = src.sig;
  out.m = impl.m;
  out.n = n;
  out.valid = std::min(src.valid, impl.in.ctx.order);
  out.c.reserve(src.c.size());
  for (const Jet& j : src.c) out.c.push_back(jet_compose(j, subs));
  return out;
}

}  // namespace

std::vector<double> Frame::map_point() {
  auto& slot = impl_->phi_pt_;
  if (!slot) {
    const auto& phis = phi_jets(*this, *impl_);
    std::vector<double> y(phis.size());
    for (std::size_t a = 0; a < phis.size(); ++a) y[a] = phis[a].value();
    if (impl_->in.map != nullptr) {
      const Box& box = impl_->in.map->target.box;
      if (!box.contains(y)) {
        std::string msg = "map leaves the target chart box at probe (";
        char buf[32];
        for (std::size_t i = 0; i < impl_->pt.size(); ++i) {
          std::snprintf(buf, sizeof buf, "%s%.6g", i ? ", " : "", impl_->pt[i]);
          msg += buf;
        }
        msg += ")";
        fail(ErrorKind::TargetChartExit, msg);
      }
    }
    slot = std::move(y);
  }
  return *slot;
}

const JetField& Frame::dphi() {
  auto& slot = impl_->dphi_;
  if (!slot) {
    const auto& phis = phi_jets(*this, *impl_);
    JetField out = make_field({Slot::NCon, Slot::Cov}, order() - 1);
    for (int a = 0; a < n(); ++a)
      for (int i = 0; i < m(); ++i) out.at_mut({a, i}) = partial(phis[a], i);
    slot = std::move(out);
  }
  return *slot;
}

const JetField& Frame::h_pull() {
  auto& slot = impl_->h_pull_;
  if (!slot) {
    Frame& tf = target_frame(*this, *impl_);
    slot = compose_field(*this, *impl_, tf.metric());
    slot->sig = {Slot::NCov, Slot::NCov};
  }
  return *slot;
}

const JetField& Frame::hinv_pull() {
  auto& slot = impl_->hinv_pull_;
  if (!slot) {
    Frame& tf = target_frame(*this, *impl_);
    slot = compose_field(*this, *impl_, tf.metric_inv());
    slot->sig = {Slot::NCon, Slot::NCon};
  }
  return *slot;
}

const JetField& Frame::ngamma_pull() {
  auto& slot = impl_->ngamma_pull_;
  if (!slot) {
    if (impl_->map().flat_target) {
      slot = make_field({Slot::NCon, Slot::NCov, Slot::NCov}, order() - 1);
    } else {
      Frame& tf = target_frame(*this, *impl_);
      slot = compose_field(*this, *impl_, tf.gamma());
      slot->sig = {Slot::NCon, Slot::NCov, Slot::NCov};
    }
  }
  return *slot;
}

const JetField& Frame::ngamma_dphi() {
  auto& slot = impl_->ngamma_dphi_;
  if (!slot) {
    const JetField& ng = ngamma_pull();
    const JetField& dp = dphi();
    JetField out = make_field({Slot::NCon, Slot::NCov, Slot::Cov},
                              std::min(ng.valid, dp.valid));
    for (int a = 0; a < n(); ++a)
      for (int b = 0; b < n(); ++b)
        for (int k = 0; k < m(); ++k) {
          Jet v = make_constant(0.0);
          for (int c = 0; c < n(); ++c)
            v = v + ng.at({a, b, c}) * dp.at({c, k});
          out.at_mut({a, b, k}) = v;
        }
    slot = std::move(out);
  }
  return *slot;
}

const JetField& Frame::nriem_pull() {
  auto& slot = impl_->nriem_pull_;
  if (!slot) {
    if (impl_->map().flat_target) {
      slot = make_field({Slot::NCov, Slot::NCov, Slot::NCov, Slot::NCov},
                        order() - 2);
    } else {
      Frame& tf = target_frame(*this, *impl_);
      slot = compose_field(*this, *impl_, tf.riemann());
      slot->sig = {Slot::NCov, Slot::NCov, Slot::NCov, Slot::NCov};
    }
  }
  return *slot;
}

const JetField& Frame::second_ff() {
  auto& slot = impl_->sff_;
  if (!slot) slot = nabla(dphi());
  return *slot;
}

const JetField& Frame::nabla3_phi() {
  auto& slot = impl_->n3phi_;
  if (!slot) slot = nabla(second_ff());
  return *slot;
}

const JetField& Frame::nabla4_phi() {
  auto& slot = impl_->n4phi_;
  if (!slot) slot = nabla(nabla3_phi());
  return *slot;
}

const JetField& Frame::pullback_metric() {
  auto& slot = impl_->pullback_;
  if (!slot) {
    const JetField& h = h_pull();
    const JetField& dp = dphi();
    JetField out =
        make_field({Slot::Cov, Slot::Cov}, std::min(h.valid, dp.valid));
    for (int i = 0; i < m(); ++i)
      for (int j = i; j < m(); ++j) {
        Jet v = make_constant(0.0);
        for (int a = 0; a < n(); ++a)
          for (int b = 0; b < n(); ++b)
            v = v + h.at({a, b}) * dp.at({a, i}) * dp.at({b, j});
        out.at_mut({i, j}) = v;
        if (i != j) out.at_mut({j, i}) = v;
      }
    slot = std::move(out);
  }
  return *slot;
}

const Jet& Frame::energy_density() {
  auto& slot = impl_->energy_;
  if (!slot) {
    JetField tr = trace_chart(pullback_metric(), 0, 1);
    slot = tr.c[0];
  }
  return *slot;
}

const JetField& Frame::stress() {
  auto& slot = impl_->stress_;
  if (!slot) {
    const JetField& pb = pullback_metric();
    const JetField& g = metric();
    const Jet& e = energy_density();
    JetField out = make_field({Slot::Cov, Slot::Cov}, pb.valid);
    for (int i = 0; i < m(); ++i)
      for (int j = 0; j < m(); ++j)
        out.at_mut({i, j}) = pb.at({i, j}) - 0.5 * (e * g.at({i, j}));
    slot = std::move(out);
  }
  return *slot;
}

const JetField& Frame::tension() {
  auto& slot = impl_->tension_;
  if (!slot) slot = trace_chart(second_ff(), 1, 2);
  return *slot;
}

const JetField& Frame::div_stress() {
  auto& slot = impl_->div_stress_;
  if (!slot) {
    // div(T)_j = <tau(phi), dphi(e_j)> = h_ab tau^a phi^b_j
    const JetField& h = h_pull();
    const JetField& tau = tension();
    const JetField& dp = dphi();
    JetField out = make_field({Slot::Cov}, std::min(tau.valid, dp.valid));
    for (int j = 0; j < m(); ++j) {
      Jet v = make_constant(0.0);
      for (int a = 0; a < n(); ++a)
        for (int b = 0; b < n(); ++b)
          v = v + h.at({a, b}) * tau.at({a}) * dp.at({b, j});
      out.at_mut({j}) = v;
    }
    slot = std::move(out);
  }
  return *slot;
}

const JetField& Frame::nabla_tension() {
  auto& slot = impl_->nabla_tension_;
  if (!slot) slot = nabla(tension());
  return *slot;
}

const JetField& Frame::bitension() {
  auto& slot = impl_->bitension_;
  if (!slot) {
    if (order() < 4)
      fail(ErrorKind::InsufficientJetOrder, "bi-tension requires jet order >= 4");
    // tau2^a = phi^a_{iijj} - NR^a_{bcd} phi^b_i phi^c_i phi^d_{jj}
    JetField traced = trace_chart(nabla4_phi(), 1, 2);  // (NCon, Cov, Cov)
    traced = trace_chart(traced, 1, 2);                 // (NCon)
    const JetField rup = raise(nriem_pull(), 0);        // NR^a_{bcd}
    const JetField& ginv = metric_inv();
    const JetField& dp = dphi();
    const JetField& tau = tension();
    const int nn = n();
    // B^{bc} = g^{ij} phi^b_i phi^c_j
    JetField bc = make_field({Slot::NCon, Slot::NCon}, dp.valid);
    for (int b = 0; b < nn; ++b)
      for (int c = 0; c < nn; ++c) {
        Jet v = make_constant(0.0);
        for (int i = 0; i < m(); ++i)
          for (int j = 0; j < m(); ++j)
            v = v + ginv.at({i, j}) * dp.at({b, i}) * dp.at({c, j});
        bc.at_mut({b, c}) = v;
      }
    JetField out = make_field({Slot::NCon}, traced.valid);
    for (int a = 0; a < nn; ++a) {
      Jet v = traced.at({a});
      for (int b = 0; b < nn; ++b)
        for (int c = 0; c < nn; ++c)
          for (int d = 0; d < nn; ++d)
            v = v - rup.at({a, b, c, d}) * bc.at({b, c}) * tau.at({d});
      out.at_mut({a}) = v;
    }
    slot = std::move(out);
  }
  return *slot;
}

// --- potential level ---------------------------------------------------------

const Jet& Frame::f() {
  auto& slot = impl_->f_;
  if (!slot) {
    if (!has_potential_f())
      fail(ErrorKind::ValidationError, "no potential function was declared");
    slot = eval_jet(*impl_->in.potential->f, impl_->chart_binding());
  }
  return *slot;
}

const JetField& Frame::grad_f() {
  auto& slot = impl_->grad_f_;
  if (!slot) {
    const Jet& fj = f();
    JetField out = make_field({Slot::Cov}, order() - 1);
    for (int i = 0; i < m(); ++i) out.at_mut({i}) = partial(fj, i);
    slot = std::move(out);
  }
  return *slot;
}

const JetField& Frame::hess_f() {
  auto& slot = impl_->hess_f_;
  if (!slot) slot = nabla(grad_f());
  return *slot;
}

const JetField& Frame::vector_field() {
  auto& slot = impl_->x_;
  if (!slot) {
    if (!has_vector_field())
      fail(ErrorKind::ValidationError, "no vector field was declared");
    JetBinding b = impl_->chart_binding();
    JetField out = make_field({Slot::Con}, order());
    for (int i = 0; i < m(); ++i)
      out.at_mut({i}) = eval_jet(*impl_->in.potential->X[i], b);
    slot = std::move(out);
  }
  return *slot;
}

const Jet& Frame::lambda_jet() {
  auto& slot = impl_->lambda_;
  if (!slot) {
    if (impl_->in.lambda_field)
      slot = eval_jet(*impl_->in.lambda_field, impl_->chart_binding());
    else
      slot = make_constant(impl_->in.lambda);
  }
  return *slot;
}

double Frame::lambda_value() { return lambda_jet().value(); }

// --- public wrappers ----------------------------------------------------------

namespace {

Frame map_frame(const MapData& map, const GeometryData& geo,
                const std::vector<double>& p, int order) {
  FrameInputs in;
  in.geo = &geo;
  in.map = &map;
  in.ctx.order = order;
  return Frame(std::move(in), p);
}

}  // namespace

MapFirstOrder map_first_order(const MapData& map, const GeometryData& geo,
                              const std::vector<double>& p, int order) {
  Frame f = map_frame(map, geo, p, order);
  MapFirstOrder out;
  out.dphi = f.value(f.dphi());
  out.pullback_metric = f.value(f.pullback_metric());
  out.energy_density = f.energy_density().value();
  out.stress = f.value(f.stress());
  out.div_stress = f.value(f.div_stress());
  return out;
}

TensorValue tension(const MapData& map, const GeometryData& geo,
                    const std::vector<double>& p, int order) {
  Frame f = map_frame(map, geo, p, order);
  return f.value(f.tension());
}

TensorValue bitension(const MapData& map, const GeometryData& geo,
                      const std::vector<double>& p, int order) {
  Frame f = map_frame(map, geo, p, order);
  return f.value(f.bitension());
}

}  // namespace phicurv
