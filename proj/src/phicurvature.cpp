#include "phicurv/phicurvature.hpp"

#include <cmath>

#include "phicurv/frame.hpp"
#include "phicurv/frame_impl.hpp"

namespace phicurv {

// All formulas below are literal coordinate transcriptions: every repeated
// chart index pair contracts through g or its inverse, every repeated
// pullback index pair through h along phi, and Kronecker deltas become the
// metric. The divergence slot is always the comma slot appended last.

const JetField& Frame::ric_phi() {
  auto& slot = impl_->ric_phi_;
  if (!slot) {
    const JetField& ric = ricci();
    const JetField& pb = pullback_metric();
    const double a = alpha();
    JetField out = make_field({Slot::Cov, Slot::Cov}, std::min(ric.valid, pb.valid));
    for (int i = 0; i < m(); ++i)
      for (int j = 0; j < m(); ++j)
        out.at_mut({i, j}) = ric.at({i, j}) - a * pb.at({i, j});
    slot = std::move(out);
  }
  return *slot;
}

const JetField& Frame::nabla_ric_phi() {
  auto& slot = impl_->nabla_ric_phi_;
  if (!slot) slot = nabla(ric_phi());
  return *slot;
}

const Jet& Frame::s_phi() {
  auto& slot = impl_->s_phi_;
  if (!slot) slot = trace_chart(ric_phi(), 0, 1).c[0];
  return *slot;
}

const JetField& Frame::a_phi() {
  auto& slot = impl_->a_phi_;
  if (!slot) {
    if (m() < 2)
      fail(ErrorKind::DimensionTooLow, "phi-Schouten requires dimension >= 2");
    const JetField& rp = ric_phi();
    const JetField& g = metric();
    const Jet s = s_phi() / (2.0 * (m() - 1));
    JetField out = make_field({Slot::Cov, Slot::Cov}, rp.valid);
    for (int i = 0; i < m(); ++i)
      for (int j = 0; j < m(); ++j)
        out.at_mut({i, j}) = rp.at({i, j}) - s * g.at({i, j});
    slot = std::move(out);
  }
  return *slot;
}

namespace {

// T_ijk = S_ij,k - S_ik,j from the covariant derivative of a symmetric
// 2-tensor; shared by the phi-Cotton and F^phi assemblies.
JetField antisymmetrize_derivative(Frame& f, const JetField& nabla_s) {
  const int m = f.m();
  JetField out = f.make_field({Slot::Cov, Slot::Cov, Slot::Cov}, nabla_s.valid);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        out.at_mut({i, j, k}) = nabla_s.at({i, j, k}) - nabla_s.at({i, k, j});
  return out;
}

}  // namespace

const JetField& Frame::c_phi() {
  auto& slot = impl_->c_phi_;
  if (!slot) slot = antisymmetrize_derivative(*this, nabla(a_phi()));
  return *slot;
}

const JetField& Frame::f_phi() {
  auto& slot = impl_->f_phi_;
  if (!slot) slot = antisymmetrize_derivative(*this, nabla_ric_phi());
  return *slot;
}

const JetField& Frame::w_phi() {
  auto& slot = impl_->w_phi_;
  if (!slot) {
    if (m() < 3)
      fail(ErrorKind::DimensionTooLow, "phi-Weyl requires dimension >= 3");
    const JetField& riem = riemann();
    const JetField& a = a_phi();
    const JetField& g = metric();
    const double c = 1.0 / (m() - 2);
    JetField out = make_field({Slot::Cov, Slot::Cov, Slot::Cov, Slot::Cov},
                              std::min(riem.valid, a.valid));
    for (int t = 0; t < m(); ++t)
      for (int i = 0; i < m(); ++i)
        for (int j = 0; j < m(); ++j)
          for (int k = 0; k < m(); ++k) {
            Jet kn = a.at({t, j}) * g.at({i, k}) - a.at({t, k}) * g.at({i, j}) +
                     a.at({i, k}) * g.at({t, j}) - a.at({i, j}) * g.at({t, k});
            out.at_mut({t, i, j, k}) = riem.at({t, i, j, k}) - c * kn;
          }
    slot = std::move(out);
  }
  return *slot;
}

const JetField& Frame::div_w_phi() {
  auto& slot = impl_->div_w_;
  if (!slot) slot = trace_chart(nabla(w_phi()), 0, 4);
  return *slot;
}

const JetField& Frame::b_phi() {
  auto& slot = impl_->b_phi_;
  if (!slot) {
    if (m() < 3)
      fail(ErrorKind::DimensionTooLow, "phi-Bach requires dimension >= 3");
    if (order() < 4)
      fail(ErrorKind::InsufficientJetOrder, "phi-Bach requires jet order >= 4");
    const double a = alpha();
    const int mm = m(), nn = n();
    const JetField div_c = trace_chart(nabla(c_phi()), 2, 3);  // C_ijk,k
    const JetField rp_up = raise(raise(ric_phi(), 0), 1);      // R^phi with
    const JetField& w = w_phi();                               // both raised
    const JetField& g = metric();
    const JetField& pb = pullback_metric();  // h_ab phi^a_t phi^b_i
    const JetField& h = h_pull();
    const JetField& sff = second_ff();
    const JetField& tau = tension();
    const JetField& ntau = nabla_tension();
    Jet tau2 = make_constant(0.0);  // |tau|^2
    for (int aa = 0; aa < nn; ++aa)
      for (int bb = 0; bb < nn; ++bb)
        tau2 = tau2 + h.at({aa, bb}) * tau.at({aa}) * tau.at({bb});

    JetField out = make_field({Slot::Cov, Slot::Cov}, div_c.valid);
    for (int i = 0; i < mm; ++i)
      for (int j = 0; j < mm; ++j) {
        Jet v = div_c.at({i, j});
        for (int t = 0; t < mm; ++t)
          for (int k = 0; k < mm; ++k)
            v = v + rp_up.at({t, k}) *
                        (w.at({t, i, k, j}) - a * (pb.at({t, i}) * g.at({j, k})));
        Jet map_block = make_constant(0.0);
        for (int aa = 0; aa < nn; ++aa)
          for (int bb = 0; bb < nn; ++bb)
            map_block = map_block +
                        h.at({aa, bb}) * (sff.at({aa, i, j}) * tau.at({bb}) -
                                          ntau.at({aa, j}) * dphi().at({bb, i}));
        v = v + a * map_block - (a / (mm - 2)) * (tau2 * g.at({i, j}));
        out.at_mut({i, j}) = (1.0 / (mm - 2)) * v;
      }
    slot = std::move(out);
  }
  return *slot;
}

const JetField& Frame::j_field() {
  auto& slot = impl_->j_;
  if (!slot) {
    if (m() < 3)
      fail(ErrorKind::DimensionTooLow, "the J field requires dimension >= 3");
    const int mm = m(), nn = n();
    const JetField& ginv = metric_inv();
    const JetField& h = h_pull();
    const JetField& dp = dphi();
    const JetField& sff = second_ff();
    const JetField& tau = tension();
    const JetField rp_up = raise(raise(ric_phi(), 0), 1);
    const JetField& t2 = bitension();
    const Jet& s = s_phi();
    const double c1 = static_cast<double>(mm) / ((mm - 1) * (mm - 2));
    const double c2 = static_cast<double>(mm - 2) / (2.0 * (mm - 1));

    JetField out = make_field({Slot::NCon}, t2.valid);
    for (int aa = 0; aa < nn; ++aa) {
      Jet v = c1 * (s * tau.at({aa})) - t2.at({aa});
      // - (m-2)/(2(m-1)) g^{ij} S^phi_i phi^a_j
      for (int i = 0; i < mm; ++i)
        for (int j = 0; j < mm; ++j)
          v = v - c2 * (ginv.at({i, j}) * partial(s, i) * dp.at({aa, j}));
      // - 2 R^phi^{ij} phi^a_{ij}
      for (int i = 0; i < mm; ++i)
        for (int j = 0; j < mm; ++j)
          v = v - 2.0 * (rp_up.at({i, j}) * sff.at({aa, i, j}));
      // + 2 h_bc tau^b g^{ij} phi^c_i phi^a_j
      for (int b = 0; b < nn; ++b)
        for (int c = 0; c < nn; ++c)
          for (int i = 0; i < mm; ++i)
            for (int j = 0; j < mm; ++j)
              v = v + 2.0 * (h.at({b, c}) * tau.at({b}) * ginv.at({i, j}) *
                             dp.at({c, i}) * dp.at({aa, j}));
      out.at_mut({aa}) = v;
    }
    slot = std::move(out);
  }
  return *slot;
}

const JetField& Frame::d_phi() {
  auto& slot = impl_->d_phi_;
  if (!slot) {
    if (m() < 3)
      fail(ErrorKind::DimensionTooLow, "D^phi requires dimension >= 3");
    const int mm = m();
    const JetField& rp = ric_phi();
    const JetField& g = metric();
    const JetField df = grad_f();
    const JetField df_up = raise(df, 0);
    const Jet& s = s_phi();
    // FR_k = f^t R^phi_{tk}
    std::vector<Jet> fr(mm, make_constant(0.0));
    for (int k = 0; k < mm; ++k)
      for (int t = 0; t < mm; ++t)
        fr[k] = fr[k] + df_up.at({t}) * rp.at({t, k});
    const double c1 = 1.0 / (mm - 2);
    const double c2 = 1.0 / (mm - 1);
    JetField out = make_field({Slot::Cov, Slot::Cov, Slot::Cov},
                              std::min(rp.valid, df.valid));
    for (int i = 0; i < mm; ++i)
      for (int j = 0; j < mm; ++j)
        for (int k = 0; k < mm; ++k) {
          Jet v = rp.at({i, j}) * df.at({k}) - rp.at({i, k}) * df.at({j});
          v = v + c2 * (fr[k] * g.at({i, j}) - fr[j] * g.at({i, k}));
          v = v - c2 * (s * (df.at({k}) * g.at({i, j}) - df.at({j}) * g.at({i, k})));
          out.at_mut({i, j, k}) = c1 * v;
        }
    slot = std::move(out);
  }
  return *slot;
}

const JetField& Frame::y_field() {
  auto& slot = impl_->y_;
  if (!slot) {
    const JetField& d = d_phi();
    const JetField df_up = raise(grad_f(), 0);
    const int mm = m();
    JetField out = make_field({Slot::Cov}, d.valid);
    for (int k = 0; k < mm; ++k) {
      Jet v = make_constant(0.0);
      for (int i = 0; i < mm; ++i)
        for (int j = 0; j < mm; ++j)
          v = v + d.at({i, j, k}) * df_up.at({i}) * df_up.at({j});
      out.at_mut({k}) = v;
    }
    slot = std::move(out);
  }
  return *slot;
}

// ---------------------------------------------------------------------------
// Public wrappers.
// ---------------------------------------------------------------------------

namespace {

Frame phi_frame(const GeometryData& geo, const MapData* map, double alpha,
                const std::vector<double>& p, int order,
                const PotentialData* pot = nullptr) {
  FrameInputs in;
  in.geo = &geo;
  in.map = map;
  in.potential = pot;
  in.alpha = alpha;
  in.ctx.order = order;
  return Frame(std::move(in), p);
}

}  // namespace

PhiRicciResult phi_ricci(const GeometryData& geo, const MapData* map,
                         double alpha, const std::vector<double>& p, int order) {
  if (!(alpha > 0.0))
    fail(ErrorKind::ValidationError, "the coupling constant alpha must be positive");
  Frame f = phi_frame(geo, map, alpha, p, order);
  PhiRicciResult out;
  out.ric_phi = f.value(f.ric_phi());
  out.s_phi = f.s_phi().value();
  out.traceless = traceless_part(out.ric_phi, geo, p, order);
  return out;
}

PhiSchoutenResult phi_schouten_cotton(const GeometryData& geo, const MapData* map,
                                      double alpha, const std::vector<double>& p,
                                      int order) {
  Frame f = phi_frame(geo, map, alpha, p, order);
  PhiSchoutenResult out;
  out.a_phi = f.value(f.a_phi());
  out.c_phi = f.value(f.c_phi());
  out.f_phi = f.value(f.f_phi());
  return out;
}

PhiWeylResult phi_weyl(const GeometryData& geo, const MapData* map, double alpha,
                       const std::vector<double>& p, int order) {
  Frame f = phi_frame(geo, map, alpha, p, order);
  return {f.value(f.w_phi()), f.value(f.div_w_phi())};
}

PhiBachResult phi_bach(const GeometryData& geo, const MapData* map, double alpha,
                       const std::vector<double>& p, int order) {
  Frame f = phi_frame(geo, map, alpha, p, order);
  PhiBachResult out;
  out.b_phi = f.value(f.b_phi());
  out.trace = f.trace_chart(f.b_phi(), 0, 1).c[0].value();
  out.traceless = traceless_part(out.b_phi, geo, p, order);
  return out;
}

TensorValue j_field(const GeometryData& geo, const MapData* map, double alpha,
                    const std::vector<double>& p, int order) {
  Frame f = phi_frame(geo, map, alpha, p, order);
  return f.value(f.j_field());
}

DPhiResult d_phi_and_y(const GeometryData& geo, const MapData* map, double alpha,
                       const PotentialData& potential, const std::vector<double>& p,
                       int order) {
  if (!potential.has_f())
    fail(ErrorKind::ValidationError, "D^phi requires a potential function");
  Frame f = phi_frame(geo, map, alpha, p, order, &potential);
  DPhiResult out;
  out.d_phi = f.value(f.d_phi());
  out.y = f.value(f.y_field());
  out.d_norm2 = f.norm2(f.d_phi());
  // relation: |D|^2 = 2/(m-2) D_{ijk} R^phi^{ij} f^k
  const JetField d_up = f.raise(f.raise(f.raise(f.d_phi(), 0), 1), 2);
  const TensorValue d = out.d_phi;
  const TensorValue du = f.value(d_up);
  const TensorValue rp = f.value(f.ric_phi());
  const TensorValue df = f.value(f.grad_f());
  double rhs = 0.0;
  const int mm = geo.dim;
  for (int i = 0; i < mm; ++i)
    for (int j = 0; j < mm; ++j)
      for (int k = 0; k < mm; ++k)
        rhs += du.at({i, j, k}) * rp.at({i, j}) * df.at({k});
  rhs *= 2.0 / (mm - 2);
  out.norm_relation_residual = std::abs(out.d_norm2 - rhs);
  return out;
}

}  // namespace phicurv
