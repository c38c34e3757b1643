#include "phicurv/catalog.hpp"

#include <algorithm>
#include <cmath>

#include "phicurv/probes.hpp"

namespace phicurv {

const char* to_string(Structure s) {
  switch (s) {
    case Structure::Any: return "any";
    case Structure::GradientSoliton: return "gradient soliton";
    case Structure::VectorSoliton: return "vector-field soliton";
    case Structure::AnySoliton: return "soliton";
    case Structure::ShrinkingGradient: return "shrinking gradient soliton";
    case Structure::HarmonicEinstein: return "harmonic-Einstein";
    case Structure::ParallelRicPhi: return "parallel phi-Ricci";
    case Structure::RigidModel: return "rigid product model";
    case Structure::CottonFlat: return "phi-Cotton flat";
    case Structure::Harmonic: return "harmonic map";
  }
  return "?";
}

namespace {

using std::abs;
using std::max;

// ---- small value-level helpers ---------------------------------------------

JetField scalar_gradient(Frame& f, const Jet& s, int valid) {
  JetField out = f.make_field({Slot::Cov}, valid - 1);
  for (int i = 0; i < f.m(); ++i) out.at_mut({i}) = partial(s, i);
  return out;
}

double laplacian_of(Frame& f, const Jet& s, int valid) {
  JetField hess = f.nabla(scalar_gradient(f, s, valid));
  return f.trace_chart(hess, 0, 1).c[0].value();
}

// Default scalar for the commutation checks when no potential is declared.
Jet probe_scalar(Frame& f) {
  Jet u = f.make_constant(0.0);
  for (int i = 0; i < f.m(); ++i) {
    Jet xi = lift_variable(i, f.space(), std::vector<double>(u.base_point().begin(),
                                                             u.base_point().end()));
    u = u + sin(xi + 0.3 * (i + 1));
  }
  return u;
}

double tension_norm(Frame& f) { return f.norm(f.tension()); }

// h1 = Ric^phi + Hess f - lambda g, measured against its ingredients.
std::pair<double, double> h1_parts(Frame& f) {
  const JetField& rp = f.ric_phi();
  const JetField& hf = f.hess_f();
  const JetField& g = f.metric();
  const Jet& lam = f.lambda_jet();
  JetField res = f.make_field({Slot::Cov, Slot::Cov}, 0);
  for (int i = 0; i < f.m(); ++i)
    for (int j = 0; j < f.m(); ++j)
      res.at_mut({i, j}) = rp.at({i, j}) + hf.at({i, j}) - lam * g.at({i, j});
  const double scale =
      f.norm(rp) + f.norm(hf) + abs(lam.value()) * std::sqrt(double(f.m()));
  return {f.norm(res), scale};
}

std::pair<double, double> h2_parts(Frame& f) {
  const JetField& tau = f.tension();
  const JetField& dp = f.dphi();
  JetField dfu = f.raise(f.grad_f(), 0);
  JetField res = f.make_field({Slot::NCon}, 0);
  for (int a = 0; a < f.n(); ++a) {
    Jet v = tau.at({a});
    for (int i = 0; i < f.m(); ++i) v = v - dp.at({a, i}) * dfu.at({i});
    res.at_mut({a}) = v;
  }
  const double scale = f.norm(tau) + f.norm(dp) * f.norm(f.grad_f());
  return {f.norm(res), scale};
}

JetField half_lie_metric(Frame& f) {
  JetField dx = f.nabla(f.lower(f.vector_field(), 0));  // (i,j) = X_{i,j}
  JetField out = f.make_field({Slot::Cov, Slot::Cov}, dx.valid);
  for (int i = 0; i < f.m(); ++i)
    for (int j = 0; j < f.m(); ++j)
      out.at_mut({i, j}) = 0.5 * (dx.at({i, j}) + dx.at({j, i}));
  return out;
}

std::pair<double, double> b1_parts(Frame& f) {
  const JetField& rp = f.ric_phi();
  const JetField& g = f.metric();
  const Jet& lam = f.lambda_jet();
  JetField lie = half_lie_metric(f);
  JetField res = f.make_field({Slot::Cov, Slot::Cov}, 0);
  for (int i = 0; i < f.m(); ++i)
    for (int j = 0; j < f.m(); ++j)
      res.at_mut({i, j}) = rp.at({i, j}) + lie.at({i, j}) - lam * g.at({i, j});
  const double scale =
      f.norm(rp) + f.norm(lie) + abs(lam.value()) * std::sqrt(double(f.m()));
  return {f.norm(res), scale};
}

std::pair<double, double> b2_parts(Frame& f) {
  const JetField& tau = f.tension();
  const JetField& dp = f.dphi();
  const JetField& x = f.vector_field();
  JetField res = f.make_field({Slot::NCon}, 0);
  for (int a = 0; a < f.n(); ++a) {
    Jet v = tau.at({a});
    for (int i = 0; i < f.m(); ++i) v = v - dp.at({a, i}) * x.at({i});
    res.at_mut({a}) = v;
  }
  const double scale = f.norm(tau) + f.norm(dp) * f.norm(x);
  return {f.norm(res), scale};
}

std::pair<double, double> he_parts(Frame& f) {
  const JetField& rp = f.ric_phi();
  const JetField& g = f.metric();
  const double lam = f.lambda_value();
  JetField res = f.make_field({Slot::Cov, Slot::Cov}, 0);
  for (int i = 0; i < f.m(); ++i)
    for (int j = 0; j < f.m(); ++j)
      res.at_mut({i, j}) = rp.at({i, j}) - lam * g.at({i, j});
  const double scale = f.norm(rp) + abs(lam) * std::sqrt(double(f.m()));
  return {max(f.norm(res), tension_norm(f)), scale};
}

double scaled(std::pair<double, double> parts) {
  return parts.first / (1.0 + parts.second);
}

// X-Laplacian identity residual; X = grad f in the gradient case.
double x_laplacian_residual(Frame& f) {
  const int m = f.m();
  const Jet& s = f.s_phi();
  const int s_valid = f.order() - 2;
  JetField sgrad = scalar_gradient(f, s, s_valid);
  JetField shess = f.nabla(sgrad);
  const double lap_s = f.trace_chart(shess, 0, 1).c[0].value();
  TensorValue sg = f.value(sgrad);
  TensorValue xv = f.has_vector_field() ? f.value(f.vector_field())
                                        : f.value(f.raise(f.grad_f(), 0));
  double xs = 0.0;
  for (int i = 0; i < m; ++i) xs += xv.at({i}) * sg.at({i});
  const double half_lap_x = 0.5 * (lap_s - xs);

  const double tau2 = f.norm2(f.tension());
  // traceless part of Ric^phi
  const JetField& rp = f.ric_phi();
  const JetField& g = f.metric();
  Jet tr = f.trace_chart(rp, 0, 1).c[0];
  JetField ring = f.make_field({Slot::Cov, Slot::Cov}, 0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      ring.at_mut({i, j}) = rp.at({i, j}) - (1.0 / m) * (tr * g.at({i, j}));
  const double ring2 = f.norm2(ring);
  const double sv = s.value();
  const double lam = f.lambda_value();
  double lap_lambda = 0.0;
  const Jet& lj = f.lambda_jet();
  bool lambda_constant = true;
  for (int r = 1; r < lj.space()->size(); ++r)
    if (lj.coeff(r) != 0.0) lambda_constant = false;
  if (!lambda_constant) lap_lambda = laplacian_of(f, lj, f.order());

  return half_lap_x + f.alpha() * tau2 + ring2 + (sv - m * lam) * sv / m -
         (m - 1) * lap_lambda;
}

// ---- catalog construction ----------------------------------------------------

std::vector<IdentityEntry> build_catalog() {
  std::vector<IdentityEntry> cat;
  auto add = [&](IdentityEntry e) { cat.push_back(std::move(e)); };

  // -- curvature oracles on tagged built-in manifolds
  auto oracle_entry = [&](const char* id, const char* name, const char* anchor,
                          auto select_engine, auto select_oracle) {
    IdentityEntry e;
    e.id = id;
    e.name = name;
    e.anchor = anchor;
    e.tolerance = 1e-10;
    e.eval = [select_engine, select_oracle](CheckContext& ctx) {
      if (!ctx.data.geo.oracle)
        fail(ErrorKind::ValidationError, "no closed-form oracle tag declared");
      OracleCurvature oc = oracle_curvature(ctx.data.geo, ctx.frame.point());
      TensorValue engine = select_engine(ctx.frame);
      TensorValue expect = select_oracle(oc);
      return std::make_pair((engine - expect).max_abs(), expect.max_abs());
    };
    add(std::move(e));
  };
  oracle_entry(
      "oracle-christoffel", "Christoffel symbols match the closed form",
      "Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)",
      [](Frame& f) { return f.value(f.gamma()); },
      [](OracleCurvature& o) { return o.gamma; });
  oracle_entry(
      "oracle-riemann", "Riemann tensor matches the closed form",
      "R_ijkt of the tagged model (constant curvature / flat)",
      [](Frame& f) { return f.value(f.riemann()); },
      [](OracleCurvature& o) { return o.riem; });
  oracle_entry(
      "oracle-ricci", "Ricci tensor matches the closed form",
      "Ric_ij of the tagged model",
      [](Frame& f) { return f.value(f.ricci()); },
      [](OracleCurvature& o) { return o.ric; });
  add({.id = "oracle-scalar",
       .name = "scalar curvature matches the closed form",
       .anchor = "S = g^{ij} R_ij of the tagged model",
       .tolerance = 1e-10,
       .eval = [](CheckContext& ctx) {
         if (!ctx.data.geo.oracle)
           fail(ErrorKind::ValidationError, "no closed-form oracle tag declared");
         OracleCurvature oc = oracle_curvature(ctx.data.geo, ctx.frame.point());
         return std::make_pair(abs(ctx.frame.scalar_curv().value() - oc.scalar),
                               abs(oc.scalar));
       }});

  // -- universal identities of the Levi-Civita connection
  add({.id = "riemann-symmetries",
       .name = "Riemann tensor pair and antisymmetry relations",
       .anchor = "R_ijkt = -R_jikt = -R_ijtk = R_ktij",
       .tolerance = 1e-9,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         TensorValue r = f.value(f.riemann());
         const int m = f.m();
         double worst = 0.0;
         for (int i = 0; i < m; ++i)
           for (int j = 0; j < m; ++j)
             for (int k = 0; k < m; ++k)
               for (int t = 0; t < m; ++t) {
                 const double v = r.at({i, j, k, t});
                 worst = max(worst, abs(v + r.at({j, i, k, t})));
                 worst = max(worst, abs(v + r.at({i, j, t, k})));
                 worst = max(worst, abs(v - r.at({k, t, i, j})));
               }
         return std::make_pair(worst, f.norm(f.riemann()));
       }});
  add({.id = "first-bianchi",
       .name = "first Bianchi identity",
       .anchor = "R_ijkt + R_iktj + R_itjk = 0",
       .tolerance = 1e-9,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         TensorValue r = f.value(f.riemann());
         const int m = f.m();
         double worst = 0.0;
         for (int i = 0; i < m; ++i)
           for (int j = 0; j < m; ++j)
             for (int k = 0; k < m; ++k)
               for (int t = 0; t < m; ++t)
                 worst = max(worst, abs(r.at({i, j, k, t}) + r.at({i, k, t, j}) +
                                        r.at({i, t, j, k})));
         return std::make_pair(worst, f.norm(f.riemann()));
       }});
  add({.id = "second-bianchi",
       .name = "second Bianchi identity",
       .anchor = "R_ijkt,l + R_ijtl,k + R_ijlk,t = 0",
       .tolerance = 1e-9,
       .min_order = 3,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         TensorValue nr = f.value(f.nabla_riemann());
         const int m = f.m();
         double worst = 0.0;
         for (int i = 0; i < m; ++i)
           for (int j = 0; j < m; ++j)
             for (int k = 0; k < m; ++k)
               for (int t = 0; t < m; ++t)
                 for (int l = 0; l < m; ++l)
                   worst = max(worst, abs(nr.at({i, j, k, t, l}) +
                                          nr.at({i, j, t, l, k}) +
                                          nr.at({i, j, l, k, t})));
         return std::make_pair(worst, f.norm(f.nabla_riemann()));
       }});
  add({.id = "metric-compatibility",
       .name = "metric compatibility of the connection",
       .anchor = "g_ij,k = 0",
       .tolerance = 1e-10,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         JetField ng = f.nabla(f.metric());
         return std::make_pair(f.value(ng).max_abs(),
                               f.value(f.metric()).max_abs());
       }});
  add({.id = "comm-rule-gradient",
       .name = "commutation rule for third derivatives of a function",
       .anchor = "f_ijk = f_ikj + R^t_ijk f_t",
       .tolerance = 1e-9,
       .min_order = 3,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const bool use_f = f.has_potential_f();
         Jet u = use_f ? f.f() : probe_scalar(f);
         JetField du = scalar_gradient(f, u, f.order());
         JetField hess = f.nabla(du);
         TensorValue d3 = f.value(f.nabla(hess));
         TensorValue dfu = f.value(f.raise(du, 0));
         TensorValue r = f.value(f.riemann());
         const int m = f.m();
         double worst = 0.0;
         for (int i = 0; i < m; ++i)
           for (int j = 0; j < m; ++j)
             for (int k = 0; k < m; ++k) {
               double v = d3.at({i, j, k}) - d3.at({i, k, j});
               for (int t = 0; t < m; ++t)
                 v -= dfu.at({t}) * r.at({t, i, j, k});
               worst = max(worst, abs(v));
             }
         return std::make_pair(worst, d3.max_abs());
       }});
  add({.id = "comm-rule-2tensor",
       .name = "commutation rule for a two times covariant tensor (T = Ric)",
       .anchor = "T_ij,kt = T_ij,tk + R^l_ikt T_lj + R^l_jkt T_il",
       .tolerance = 1e-8,
       .min_order = 4,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         TensorValue d2 = f.value(f.nabla(f.nabla(f.ricci())));
         TensorValue rup = f.value(f.riemann_up());
         TensorValue ric = f.value(f.ricci());
         const int m = f.m();
         double worst = 0.0;
         for (int i = 0; i < m; ++i)
           for (int j = 0; j < m; ++j)
             for (int k = 0; k < m; ++k)
               for (int t = 0; t < m; ++t) {
                 double v = d2.at({i, j, k, t}) - d2.at({i, j, t, k});
                 for (int l = 0; l < m; ++l)
                   v -= rup.at({l, i, k, t}) * ric.at({l, j}) +
                        rup.at({l, j, k, t}) * ric.at({i, l});
                 worst = max(worst, abs(v));
               }
         return std::make_pair(worst, d2.max_abs());
       }});

  // -- map identities
  add({.id = "sff-symmetry",
       .name = "symmetry of the generalized second fundamental tensor",
       .anchor = "phi^a_ij = phi^a_ji",
       .tolerance = 1e-10,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         TensorValue s = f.value(f.second_ff());
         double worst = 0.0;
         for (int a = 0; a < f.n(); ++a)
           for (int i = 0; i < f.m(); ++i)
             for (int j = 0; j < f.m(); ++j)
               worst = max(worst, abs(s.at({a, i, j}) - s.at({a, j, i})));
         return std::make_pair(worst, s.max_abs());
       }});
  add({.id = "harmonic-conservative",
       .name = "harmonic maps are conservative",
       .anchor = "tau(phi) = 0 implies div(T) = 0",
       .gate = Structure::Harmonic,
       .tolerance = 1e-8,
       .eval = [](CheckContext& ctx) {
         return std::make_pair(ctx.frame.norm(ctx.frame.div_stress()), 0.0);
       }});

  // -- phi-curvature trace and divergence identities
  add({.id = "generalized-schur",
       .name = "generalized Schur identity",
       .anchor = "R^phi_ij,j = S^phi_i / 2 - alpha tau^a phi^a_i",
       .tolerance = 1e-8,
       .min_order = 3,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const int m = f.m();
         TensorValue nr = f.value(f.nabla_ric_phi());
         TensorValue giv = f.value(f.metric_inv());
         TensorValue divt = f.value(f.div_stress());
         const Jet& s = f.s_phi();
         double worst = 0.0;
         for (int i = 0; i < m; ++i) {
           double div = 0.0;
           for (int j = 0; j < m; ++j)
             for (int k = 0; k < m; ++k)
               div += giv.at({j, k}) * nr.at({i, j, k});
           double v = div - 0.5 * partial(s, i).value() + f.alpha() * divt.at({i});
           worst = max(worst, abs(v));
         }
         return std::make_pair(worst, f.norm(f.nabla_ric_phi()));
       }});
  add({.id = "trace-phi-cotton",
       .name = "trace of the phi-Cotton tensor",
       .anchor = "C^phi_jji = alpha tau^a phi^a_i",
       .tolerance = 1e-8,
       .min_order = 3,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const int m = f.m();
         TensorValue c = f.value(f.c_phi());
         TensorValue giv = f.value(f.metric_inv());
         TensorValue divt = f.value(f.div_stress());
         double worst = 0.0;
         for (int i = 0; i < m; ++i) {
           double tr = 0.0;
           for (int j = 0; j < m; ++j)
             for (int k = 0; k < m; ++k)
               tr += giv.at({j, k}) * c.at({j, k, i});
           worst = max(worst, abs(tr - f.alpha() * divt.at({i})));
         }
         return std::make_pair(worst, f.norm(f.c_phi()));
       }});
  add({.id = "trace-phi-weyl",
       .name = "trace of the phi-Weyl tensor",
       .anchor = "W^phi_kikj = alpha phi^a_i phi^a_j",
       .tolerance = 1e-8,
       .min_dim = 3,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const int m = f.m();
         TensorValue w = f.value(f.w_phi());
         TensorValue giv = f.value(f.metric_inv());
         TensorValue pb = f.value(f.pullback_metric());
         double worst = 0.0;
         for (int i = 0; i < m; ++i)
           for (int j = 0; j < m; ++j) {
             double tr = 0.0;
             for (int k = 0; k < m; ++k)
               for (int t = 0; t < m; ++t)
                 tr += giv.at({k, t}) * w.at({k, i, t, j});
             worst = max(worst, abs(tr - f.alpha() * pb.at({i, j})));
           }
         return std::make_pair(worst, f.norm(f.w_phi()));
       }});
  add({.id = "div-phi-weyl",
       .name = "divergence of the phi-Weyl tensor",
       .anchor =
           "W^phi_tijk,t = (m-3)/(m-2) C^phi_ikj + alpha (phi^a_ij phi^a_k - "
           "phi^a_ik phi^a_j) + alpha/(m-2) tau^a (phi^a_j g_ik - phi^a_k g_ij)",
       .tolerance = 1e-8,
       .min_dim = 3,
       .min_order = 4,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const int m = f.m(), n = f.n();
         const double a = f.alpha();
         TensorValue dw = f.value(f.div_w_phi());
         TensorValue c = f.value(f.c_phi());
         TensorValue g = f.value(f.metric());
         TensorValue h = f.value(f.h_pull());
         TensorValue sff = f.value(f.second_ff());
         TensorValue dp = f.value(f.dphi());
         TensorValue tau = f.value(f.tension());
         double worst = 0.0;
         for (int i = 0; i < m; ++i)
           for (int j = 0; j < m; ++j)
             for (int k = 0; k < m; ++k) {
               double rhs = (m - 3.0) / (m - 2.0) * c.at({i, k, j});
               for (int aa = 0; aa < n; ++aa)
                 for (int bb = 0; bb < n; ++bb) {
                   rhs += a * h.at({aa, bb}) *
                          (sff.at({aa, i, j}) * dp.at({bb, k}) -
                           sff.at({aa, i, k}) * dp.at({bb, j}));
                   rhs += a / (m - 2.0) * h.at({aa, bb}) * tau.at({aa}) *
                          (dp.at({bb, j}) * g.at({i, k}) -
                           dp.at({bb, k}) * g.at({i, j}));
                 }
               worst = max(worst, abs(dw.at({i, j, k}) - rhs));
             }
         return std::make_pair(worst, dw.max_abs() + c.max_abs());
       }});
  add({.id = "trace-phi-bach",
       .name = "trace of the phi-Bach tensor",
       .anchor = "(m-2) tr(B^phi) = alpha (m-4)/(m-2) |tau(phi)|^2",
       .tolerance = 1e-8,
       .min_dim = 3,
       .min_order = 4,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const int m = f.m();
         const double tr = f.trace_chart(f.b_phi(), 0, 1).c[0].value();
         const double t2 = f.norm2(f.tension());
         const double res = (m - 2.0) * tr - f.alpha() * (m - 4.0) / (m - 2.0) * t2;
         return std::make_pair(abs(res), f.norm(f.b_phi()) + t2);
       }});
  add({.id = "phi-bach-symmetry",
       .name = "symmetry of the phi-Bach tensor",
       .anchor = "B^phi_ij = B^phi_ji",
       .tolerance = 1e-8,
       .min_dim = 3,
       .min_order = 4,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         TensorValue b = f.value(f.b_phi());
         double worst = 0.0;
         for (int i = 0; i < f.m(); ++i)
           for (int j = 0; j < f.m(); ++j)
             worst = max(worst, abs(b.at({i, j}) - b.at({j, i})));
         return std::make_pair(worst, b.max_abs());
       }});
  add({.id = "f-phi-norm",
       .name = "norm relation between F^phi and C^phi",
       .anchor = "|F^phi|^2 = |C^phi|^2 + 2 alpha/(m-1) div(T)(grad S^phi) + "
                 "|grad S^phi|^2 / (2(m-1))",
       .tolerance = 1e-8,
       .min_order = 3,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const int m = f.m();
         const double f2 = f.norm2(f.f_phi());
         const double c2 = f.norm2(f.c_phi());
         JetField sgrad = scalar_gradient(f, f.s_phi(), f.order() - 2);
         const double sg2 = f.norm2(sgrad);
         TensorValue divt = f.value(f.div_stress());
         TensorValue sgu = f.value(f.raise(sgrad, 0));
         double pairing = 0.0;
         for (int i = 0; i < m; ++i) pairing += divt.at({i}) * sgu.at({i});
         const double res =
             f2 - c2 - 2.0 * f.alpha() / (m - 1.0) * pairing - sg2 / (2.0 * (m - 1.0));
         return std::make_pair(abs(res), f2 + c2 + sg2);
       }});
  add({.id = "f-phi-codazzi",
       .name = "norm of F^phi when the phi-Schouten tensor is Codazzi",
       .anchor = "C^phi = 0 implies |F^phi|^2 = |grad S^phi|^2 / (2(m-1))",
       .gate = Structure::CottonFlat,
       .tolerance = 1e-8,
       .min_order = 3,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const double f2 = f.norm2(f.f_phi());
         JetField sgrad = scalar_gradient(f, f.s_phi(), f.order() - 2);
         const double sg2 = f.norm2(sgrad);
         return std::make_pair(abs(f2 - sg2 / (2.0 * (f.m() - 1.0))), f2 + sg2);
       }});

  // -- defining soliton equations (diagnostic; skipped without a potential)
  add({.id = "soliton-h1",
       .name = "gradient soliton equation (metric part)",
       .anchor = "h1 = Ric^phi + Hess(f) - lambda g",
       .tolerance = 1e-8,
       .eval = [](CheckContext& ctx) {
         if (!ctx.frame.has_potential_f())
           fail(ErrorKind::ValidationError, "no potential function declared");
         return h1_parts(ctx.frame);
       }});
  add({.id = "soliton-h2",
       .name = "gradient soliton equation (map part)",
       .anchor = "h2 = tau(phi) - dphi(grad f)",
       .tolerance = 1e-8,
       .eval = [](CheckContext& ctx) {
         if (!ctx.frame.has_potential_f())
           fail(ErrorKind::ValidationError, "no potential function declared");
         return h2_parts(ctx.frame);
       }});
  add({.id = "soliton-b1",
       .name = "vector-field soliton equation (metric part)",
       .anchor = "b1 = Ric^phi + L_X g / 2 - lambda g",
       .tolerance = 1e-8,
       .eval = [](CheckContext& ctx) {
         if (!ctx.frame.has_vector_field())
           fail(ErrorKind::ValidationError, "no vector field declared");
         return b1_parts(ctx.frame);
       }});
  add({.id = "soliton-b2",
       .name = "vector-field soliton equation (map part)",
       .anchor = "b2 = tau(phi) - dphi(X)",
       .tolerance = 1e-8,
       .eval = [](CheckContext& ctx) {
         if (!ctx.frame.has_vector_field())
           fail(ErrorKind::ValidationError, "no vector field declared");
         return b2_parts(ctx.frame);
       }});

  // -- the seven gradient-soliton formulas
  add({.id = "soliton-form-commutation",
       .name = "commutation form of the phi-Ricci derivative",
       .anchor = "F^phi_ijk = R_tikj f_t",
       .gate = Structure::GradientSoliton,
       .tolerance = 1e-7,
       .min_order = 3,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const int m = f.m();
         TensorValue fp = f.value(f.f_phi());
         TensorValue r = f.value(f.riemann());
         TensorValue dfu = f.value(f.raise(f.grad_f(), 0));
         double worst = 0.0;
         for (int i = 0; i < m; ++i)
           for (int j = 0; j < m; ++j)
             for (int k = 0; k < m; ++k) {
               double v = fp.at({i, j, k});
               for (int t = 0; t < m; ++t) v -= dfu.at({t}) * r.at({t, i, k, j});
               worst = max(worst, abs(v));
             }
         return std::make_pair(worst, f.norm(f.f_phi()) + f.norm(f.riemann()));
       }});
  add({.id = "soliton-form-grad-sphi",
       .name = "gradient of the phi-scalar curvature",
       .anchor = "S^phi_i / 2 = R^phi_ij f_j",
       .gate = Structure::GradientSoliton,
       .tolerance = 1e-7,
       .min_order = 3,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const int m = f.m();
         TensorValue rp = f.value(f.ric_phi());
         TensorValue dfu = f.value(f.raise(f.grad_f(), 0));
         const Jet& s = f.s_phi();
         double worst = 0.0;
         for (int i = 0; i < m; ++i) {
           double v = 0.5 * partial(s, i).value();
           for (int j = 0; j < m; ++j) v -= rp.at({i, j}) * dfu.at({j});
           worst = max(worst, abs(v));
         }
         return std::make_pair(worst, f.norm(f.ric_phi()) * f.norm(f.grad_f()));
       }});
  add({.id = "soliton-form-div-riem",
       .name = "divergence of the Riemann tensor on a gradient soliton",
       .anchor = "R_tikj,t = R_tikj f_t + alpha (phi^a_ik phi^a_j - phi^a_ij "
                 "phi^a_k)",
       .gate = Structure::GradientSoliton,
       .tolerance = 1e-7,
       .min_order = 3,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const int m = f.m(), n = f.n();
         const double a = f.alpha();
         TensorValue divr = f.value(f.trace_chart(f.nabla_riemann(), 0, 4));
         TensorValue r = f.value(f.riemann());
         TensorValue dfu = f.value(f.raise(f.grad_f(), 0));
         TensorValue h = f.value(f.h_pull());
         TensorValue sff = f.value(f.second_ff());
         TensorValue dp = f.value(f.dphi());
         double worst = 0.0;
         for (int i = 0; i < m; ++i)
           for (int k = 0; k < m; ++k)
             for (int j = 0; j < m; ++j) {
               double v = divr.at({i, k, j});
               for (int t = 0; t < m; ++t) v -= dfu.at({t}) * r.at({t, i, k, j});
               for (int aa = 0; aa < n; ++aa)
                 for (int bb = 0; bb < n; ++bb)
                   v -= a * h.at({aa, bb}) *
                        (sff.at({aa, i, k}) * dp.at({bb, j}) -
                         sff.at({aa, i, j}) * dp.at({bb, k}));
               worst = max(worst, abs(v));
             }
         return std::make_pair(worst, f.norm(f.nabla_riemann()));
       }});
  add({.id = "soliton-form-fnorm",
       .name = "radial pairing of the phi-Ricci derivative",
       .anchor = "f_t R_tikj R^phi_ij,k = |F^phi|^2 / 2",
       .gate = Structure::GradientSoliton,
       .tolerance = 1e-7,
       .min_order = 3,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const int m = f.m();
         TensorValue r = f.value(f.riemann());
         TensorValue dfu = f.value(f.raise(f.grad_f(), 0));
         JetField nrp_up =
             f.raise(f.raise(f.raise(f.nabla_ric_phi(), 0), 1), 2);
         TensorValue nu = f.value(nrp_up);
         double lhs = 0.0;
         for (int t = 0; t < m; ++t)
           for (int i = 0; i < m; ++i)
             for (int k = 0; k < m; ++k)
               for (int j = 0; j < m; ++j)
                 lhs += dfu.at({t}) * r.at({t, i, k, j}) * nu.at({i, j, k});
         const double f2 = f.norm2(f.f_phi());
         return std::make_pair(abs(lhs - 0.5 * f2), f2);
       }});
  auto lap_ric_entry = [&](const char* id, const char* name, const char* anchor,
                           bool hessian_form) {
    IdentityEntry e;
    e.id = id;
    e.name = name;
    e.anchor = anchor;
    e.gate = Structure::GradientSoliton;
    e.tolerance = 1e-7;
    e.min_order = 4;
    e.eval = [hessian_form](CheckContext& ctx) {
      Frame& f = ctx.frame;
      const int m = f.m(), n = f.n();
      const double a = f.alpha();
      const double lam = f.lambda_value();
      TensorValue d2 = f.value(f.nabla(f.nabla_ric_phi()));
      TensorValue nrp = f.value(f.nabla_ric_phi());
      TensorValue giv = f.value(f.metric_inv());
      TensorValue rp = f.value(f.ric_phi());
      TensorValue rp_up = f.value(f.raise(f.raise(f.ric_phi(), 0), 1));
      TensorValue r = f.value(f.riemann());
      TensorValue dfu = f.value(f.raise(f.grad_f(), 0));
      TensorValue hess = f.value(f.hess_f());
      TensorValue h = f.value(f.h_pull());
      TensorValue dp_up = f.value(f.raise(f.dphi(), 1));  // phi^a with i raised
      TensorValue dp = f.value(f.dphi());
      TensorValue sff = f.value(f.second_ff());
      TensorValue tau = f.value(f.tension());
      double worst = 0.0, scale = 0.0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          double lap = 0.0;
          for (int k = 0; k < m; ++k)
            for (int l = 0; l < m; ++l)
              lap += giv.at({k, l}) * d2.at({i, j, k, l});
          for (int k = 0; k < m; ++k) lap -= dfu.at({k}) * nrp.at({i, j, k});
          double rhs = 0.0;
          if (!hessian_form) {
            // lambda R^phi_ij + R_tijk R^phi_tk + alpha/2 phi^a_k (R^phi_kj
            // phi^a_i + phi^a_j R^phi_ik) - alpha tau^a phi^a_ij
            rhs = lam * rp.at({i, j});
            for (int t = 0; t < m; ++t)
              for (int k = 0; k < m; ++k)
                rhs += r.at({t, i, j, k}) * rp_up.at({t, k});
            for (int aa = 0; aa < n; ++aa)
              for (int bb = 0; bb < n; ++bb) {
                double inner = 0.0;
                for (int k = 0; k < m; ++k)
                  inner += dp_up.at({aa, k}) *
                           (rp.at({k, j}) * dp.at({bb, i}) +
                            dp.at({bb, j}) * rp.at({i, k}));
                rhs += 0.5 * a * h.at({aa, bb}) * inner;
                rhs -= a * h.at({aa, bb}) * tau.at({aa}) * sff.at({bb, i, j});
              }
          } else {
            // -R_tijk f_tk - alpha/2 phi^a_k (f_kj phi^a_i + phi^a_j f_ik)
            // - alpha tau^a phi^a_ij
            for (int t = 0; t < m; ++t)
              for (int k = 0; k < m; ++k)
                for (int tt = 0; tt < m; ++tt)
                  for (int kk = 0; kk < m; ++kk)
                    rhs -= giv.at({t, tt}) * giv.at({k, kk}) *
                           r.at({tt, i, j, kk}) * hess.at({t, k});
            for (int aa = 0; aa < n; ++aa)
              for (int bb = 0; bb < n; ++bb) {
                double inner = 0.0;
                for (int k = 0; k < m; ++k)
                  inner += dp_up.at({aa, k}) *
                           (hess.at({k, j}) * dp.at({bb, i}) +
                            dp.at({bb, j}) * hess.at({i, k}));
                rhs -= 0.5 * a * h.at({aa, bb}) * inner;
                rhs -= a * h.at({aa, bb}) * tau.at({aa}) * sff.at({bb, i, j});
              }
          }
          worst = max(worst, abs(0.5 * lap - rhs));
          scale = max(scale, abs(lap) + abs(rhs));
        }
      return std::make_pair(worst, scale);
    };
    add(std::move(e));
  };
  lap_ric_entry("soliton-form-lap-ric-a",
                "weighted Laplacian of the phi-Ricci tensor (curvature form)",
                "Delta_f R^phi_ij / 2 = lambda R^phi_ij + R_tijk R^phi_tk + "
                "alpha/2 phi^a_k (R^phi_kj phi^a_i + phi^a_j R^phi_ik) - alpha "
                "tau^a phi^a_ij",
                false);
  lap_ric_entry("soliton-form-lap-ric-b",
                "weighted Laplacian of the phi-Ricci tensor (Hessian form)",
                "Delta_f R^phi_ij / 2 = -R_tijk f_tk - alpha/2 phi^a_k (f_kj "
                "phi^a_i + phi^a_j f_ik) - alpha tau^a phi^a_ij",
                true);
  add({.id = "soliton-form-lap-sphi",
       .name = "weighted Laplacian of the phi-scalar curvature",
       .anchor =
           "Delta_f S^phi / 2 = lambda S^phi - |Ric^phi|^2 - alpha |tau|^2",
       .gate = Structure::GradientSoliton,
       .tolerance = 1e-7,
       .min_order = 4,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const Jet& s = f.s_phi();
         JetField sgrad = scalar_gradient(f, s, f.order() - 2);
         JetField shess = f.nabla(sgrad);
         const double lap = f.trace_chart(shess, 0, 1).c[0].value();
         TensorValue sgu = f.value(f.raise(sgrad, 0));
         TensorValue sg = f.value(sgrad);
         double fs = 0.0;
         TensorValue dfv = f.value(f.grad_f());
         TensorValue giv = f.value(f.metric_inv());
         for (int i = 0; i < f.m(); ++i)
           for (int j = 0; j < f.m(); ++j)
             fs += giv.at({i, j}) * dfv.at({i}) * sg.at({j});
         const double lam = f.lambda_value();
         const double rp2 = f.norm2(f.ric_phi());
         const double t2 = f.norm2(f.tension());
         const double res =
             0.5 * (lap - fs) - lam * s.value() + rp2 + f.alpha() * t2;
         return std::make_pair(abs(res), abs(lap) + rp2 + t2);
       }});

  // -- integrability conditions and D^phi
  add({.id = "first-integrability",
       .name = "first integrability condition",
       .anchor = "C^phi_ijk + f_t W^phi_tijk = D^phi_ijk",
       .gate = Structure::GradientSoliton,
       .tolerance = 1e-7,
       .min_dim = 3,
       .min_order = 3,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const int m = f.m();
         TensorValue c = f.value(f.c_phi());
         TensorValue w = f.value(f.w_phi());
         TensorValue d = f.value(f.d_phi());
         TensorValue dfu = f.value(f.raise(f.grad_f(), 0));
         double worst = 0.0;
         for (int i = 0; i < m; ++i)
           for (int j = 0; j < m; ++j)
             for (int k = 0; k < m; ++k) {
               double v = c.at({i, j, k}) - d.at({i, j, k});
               for (int t = 0; t < m; ++t) v += dfu.at({t}) * w.at({t, i, j, k});
               worst = max(worst, abs(v));
             }
         return std::make_pair(worst,
                               c.max_abs() + d.max_abs() + w.max_abs());
       }});
  add({.id = "second-integrability",
       .name = "second integrability condition",
       .anchor = "(m-2) B^phi_ij - (m-3)/(m-2) C^phi_jik f_k = D^phi_ijk,k - "
                 "alpha/(m-2) tau^a phi^a_i f_j",
       .gate = Structure::GradientSoliton,
       .tolerance = 1e-7,
       .min_dim = 3,
       .min_order = 4,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const int m = f.m();
         TensorValue b = f.value(f.b_phi());
         TensorValue c = f.value(f.c_phi());
         TensorValue divd = f.value(f.trace_chart(f.nabla(f.d_phi()), 2, 3));
         TensorValue dfu = f.value(f.raise(f.grad_f(), 0));
         TensorValue dfv = f.value(f.grad_f());
         TensorValue divt = f.value(f.div_stress());
         double worst = 0.0;
         for (int i = 0; i < m; ++i)
           for (int j = 0; j < m; ++j) {
             double v = (m - 2.0) * b.at({i, j}) - divd.at({i, j}) +
                        f.alpha() / (m - 2.0) * divt.at({i}) * dfv.at({j});
             for (int k = 0; k < m; ++k)
               v -= (m - 3.0) / (m - 2.0) * c.at({j, i, k}) * dfu.at({k});
             worst = max(worst, abs(v));
           }
         return std::make_pair(worst, b.max_abs() + divd.max_abs() + c.max_abs());
       }});
  add({.id = "d-phi-norm",
       .name = "norm relation for D^phi",
       .anchor = "|D^phi|^2 = 2/(m-2) D^phi_ijk R^phi_ij f_k",
       .gate = Structure::GradientSoliton,
       .tolerance = 1e-8,
       .min_dim = 3,
       .min_order = 3,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const int m = f.m();
         const double d2 = f.norm2(f.d_phi());
         TensorValue du = f.value(f.raise(f.raise(f.raise(f.d_phi(), 0), 1), 2));
         TensorValue rp = f.value(f.ric_phi());
         TensorValue dfv = f.value(f.grad_f());
         double rhs = 0.0;
         for (int i = 0; i < m; ++i)
           for (int j = 0; j < m; ++j)
             for (int k = 0; k < m; ++k)
               rhs += du.at({i, j, k}) * rp.at({i, j}) * dfv.at({k});
         rhs *= 2.0 / (m - 2.0);
         return std::make_pair(abs(d2 - rhs), d2);
       }});

  // -- constancy checks
  add({.id = "hamilton-identity",
       .name = "Hamilton-type identity",
       .anchor = "S^phi + |grad f|^2 - 2 lambda f is constant",
       .gate = Structure::ShrinkingGradient,
       .tolerance = 1e-8,
       .spread_check = true,
       .value = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const double df2 = f.norm2(f.grad_f());
         return f.s_phi().value() + df2 - 2.0 * f.lambda_value() * f.f().value();
       }});
  add({.id = "muller-perelman",
       .name = "Muller-Perelman potential constancy",
       .anchor = "S^phi + 2 Delta f - |grad f|^2 + 2 lambda f is constant",
       .tolerance = 1e-8,
       .spread_check = true,
       .value = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         if (!f.has_potential_f())
           fail(ErrorKind::ValidationError, "no potential function declared");
         if (!(f.lambda_value() > 0.0))
           fail(ErrorKind::ValidationError, "requires lambda > 0");
         const double lap = f.trace_chart(f.hess_f(), 0, 1).c[0].value();
         const double df2 = f.norm2(f.grad_f());
         return f.s_phi().value() + 2.0 * lap - df2 +
                2.0 * f.lambda_value() * f.f().value();
       }});
  add({.id = "x-laplacian-sphi",
       .name = "X-Laplacian identity for the phi-scalar curvature",
       .anchor = "Delta_X S^phi / 2 + alpha |tau|^2 + |ring Ric^phi|^2 + "
                 "(S^phi - m lambda) S^phi / m - (m-1) Delta lambda = 0",
       .gate = Structure::AnySoliton,
       .tolerance = 1e-7,
       .min_order = 4,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const double res = x_laplacian_residual(f);
         return std::make_pair(abs(res),
                               abs(f.s_phi().value()) + f.norm2(f.ric_phi()));
       }});

  // -- harmonic-Einstein consequences
  add({.id = "he-parallel-ric-phi",
       .name = "harmonic-Einstein manifolds have parallel phi-Ricci",
       .anchor = "Ric^phi = lambda g, tau = 0 imply R^phi_ij,k = 0",
       .gate = Structure::HarmonicEinstein,
       .tolerance = 1e-9,
       .min_order = 3,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         return std::make_pair(f.norm(f.nabla_ric_phi()), f.norm(f.ric_phi()));
       }});
  add({.id = "he-phi-cotton-zero",
       .name = "harmonic-Einstein manifolds are phi-Cotton flat",
       .anchor = "C^phi = 0 on harmonic-Einstein structures",
       .gate = Structure::HarmonicEinstein,
       .tolerance = 1e-9,
       .min_order = 3,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         return std::make_pair(f.norm(f.c_phi()), f.norm(f.a_phi()));
       }});
  add({.id = "he-phi-bach-zero",
       .name = "harmonic-Einstein manifolds are phi-Bach flat",
       .anchor = "B^phi = 0 on harmonic-Einstein structures",
       .gate = Structure::HarmonicEinstein,
       .tolerance = 1e-8,
       .min_dim = 3,
       .min_order = 4,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         return std::make_pair(f.norm(f.b_phi()), f.norm(f.ric_phi()));
       }});
  add({.id = "he-j-zero",
       .name = "harmonic-Einstein manifolds satisfy J = 0",
       .anchor = "J = 0 on harmonic-Einstein structures",
       .gate = Structure::HarmonicEinstein,
       .tolerance = 1e-8,
       .min_dim = 3,
       .min_order = 4,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         return std::make_pair(f.norm(f.j_field()), f.norm(f.ric_phi()));
       }});
  add({.id = "j-parallel-reduction",
       .name = "J against the parallel phi-Ricci reduction",
       .anchor = "parallel Ric^phi implies J^a = -2 R^phi_jk phi^a_jk",
       .gate = Structure::ParallelRicPhi,
       .tolerance = 1e-8,
       .min_dim = 3,
       .min_order = 4,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const int m = f.m(), n = f.n();
         TensorValue j = f.value(f.j_field());
         TensorValue rp_up = f.value(f.raise(f.raise(f.ric_phi(), 0), 1));
         TensorValue sff = f.value(f.second_ff());
         TensorValue res = j;
         for (int a = 0; a < n; ++a) {
           double v = j.at({a});
           for (int jj = 0; jj < m; ++jj)
             for (int k = 0; k < m; ++k)
               v += 2.0 * rp_up.at({jj, k}) * sff.at({a, jj, k});
           res.comp[a] = v;
         }
         return std::make_pair(f.norm2(res) > 0 ? std::sqrt(f.norm2(res)) : 0.0,
                               j.max_abs() + rp_up.max_abs());
       }});

  // -- rigid product models
  add({.id = "rigid-parallel-ric-phi",
       .name = "rigid models have parallel phi-Ricci",
       .anchor = "nabla Ric^phi = 0 on L x R^k products",
       .gate = Structure::RigidModel,
       .tolerance = 1e-9,
       .min_order = 3,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         return std::make_pair(f.norm(f.nabla_ric_phi()), f.norm(f.ric_phi()));
       }});
  add({.id = "phi-bach-rigid-closed-form",
       .name = "phi-Bach of a rigid model matches its closed form",
       .anchor = "B^phi = (k-1) lambda^2 / ((m+k-1)(m+k-2)^2) (k g_L - m g_can)",
       .gate = Structure::RigidModel,
       .tolerance = 1e-8,
       .min_dim = 3,
       .min_order = 4,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const RigidMeta& meta = *ctx.data.rigid;
         const int ml = meta.l_dim, k = meta.k;
         const double lam = f.lambda_value();
         const double coeff = (k - 1) * lam * lam /
                              ((ml + k - 1.0) * (ml + k - 2.0) * (ml + k - 2.0));
         TensorValue b = f.value(f.b_phi());
         TensorValue g = f.value(f.metric());
         double worst = 0.0;
         for (int i = 0; i < f.m(); ++i)
           for (int j = 0; j < f.m(); ++j) {
             double expect = 0.0;
             if (i < ml && j < ml) expect = coeff * k * g.at({i, j});
             if (i >= ml && j >= ml) expect = -coeff * ml * g.at({i, j});
             worst = max(worst, abs(b.at({i, j}) - expect));
           }
         return std::make_pair(worst, b.max_abs());
       }});
  add({.id = "rigid-phi-bach-trace",
       .name = "phi-Bach of a rigid model is traceless",
       .anchor = "tr(B^phi) = 0 when tau(phi) = 0",
       .gate = Structure::RigidModel,
       .tolerance = 1e-9,
       .min_dim = 3,
       .min_order = 4,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         const double tr = f.trace_chart(f.b_phi(), 0, 1).c[0].value();
         return std::make_pair(abs(tr), f.norm(f.b_phi()));
       }});
  add({.id = "rigid-j-zero",
       .name = "J vanishes on rigid models",
       .anchor = "J = 0 on L x R^k products",
       .gate = Structure::RigidModel,
       .tolerance = 1e-9,
       .min_dim = 3,
       .min_order = 4,
       .eval = [](CheckContext& ctx) {
         Frame& f = ctx.frame;
         return std::make_pair(f.norm(f.j_field()), f.norm(f.ric_phi()));
       }});

  return cat;
}

}  // namespace

double gradient_residual_frame(Frame& f) {
  return max(scaled(h1_parts(f)), scaled(h2_parts(f)));
}

double vector_residual_frame(Frame& f) {
  return max(scaled(b1_parts(f)), scaled(b2_parts(f)));
}

double he_residual_frame(Frame& f) { return scaled(he_parts(f)); }

double x_laplacian_residual_frame(Frame& f) { return x_laplacian_residual(f); }

const std::vector<IdentityEntry>& identity_catalog() {
  static const std::vector<IdentityEntry> cat = build_catalog();
  return cat;
}

const IdentityEntry* find_identity(const std::string& id) {
  for (const auto& e : identity_catalog())
    if (e.id == id) return &e;
  return nullptr;
}

GateResult evaluate_gate(Structure gate, const SolitonData& data,
                         std::vector<Frame>& frames) {
  auto max_over = [&](auto&& fn) {
    double worst = 0.0;
    for (Frame& f : frames) worst = max(worst, fn(f));
    return worst;
  };
  switch (gate) {
    case Structure::Any:
      return {true, ""};
    case Structure::GradientSoliton: {
      if (!data.potential.has_f())
        return {false, "structure gate: no potential function declared"};
      const double r =
          max_over([](Frame& f) { return max(scaled(h1_parts(f)), scaled(h2_parts(f))); });
      if (r > 1e-8)
        return {false, "structure gate: gradient soliton residual " +
                           std::to_string(r) + " exceeds 1e-8"};
      return {true, ""};
    }
    case Structure::VectorSoliton: {
      if (!data.potential.has_X())
        return {false, "structure gate: no vector field declared"};
      const double r =
          max_over([](Frame& f) { return max(scaled(b1_parts(f)), scaled(b2_parts(f))); });
      if (r > 1e-8)
        return {false, "structure gate: vector-field soliton residual " +
                           std::to_string(r) + " exceeds 1e-8"};
      return {true, ""};
    }
    case Structure::AnySoliton: {
      if (data.potential.has_f())
        return evaluate_gate(Structure::GradientSoliton, data, frames);
      if (data.potential.has_X())
        return evaluate_gate(Structure::VectorSoliton, data, frames);
      return {false, "structure gate: no potential or vector field declared"};
    }
    case Structure::ShrinkingGradient: {
      if (data.lambda_field)
        return {false, "structure gate: requires a constant lambda"};
      if (!(data.lambda > 0.0))
        return {false, "structure gate: requires lambda > 0 (shrinking)"};
      return evaluate_gate(Structure::GradientSoliton, data, frames);
    }
    case Structure::HarmonicEinstein: {
      const double r = max_over([](Frame& f) { return scaled(he_parts(f)); });
      if (r > 1e-9)
        return {false, "structure gate: harmonic-Einstein residual " +
                           std::to_string(r) + " exceeds 1e-9"};
      return {true, ""};
    }
    case Structure::ParallelRicPhi: {
      const double r = max_over([](Frame& f) {
        return f.norm(f.nabla_ric_phi()) / (1.0 + f.norm(f.ric_phi()));
      });
      if (r > 1e-8)
        return {false, "structure gate: nabla Ric^phi residual " +
                           std::to_string(r) + " exceeds 1e-8"};
      return {true, ""};
    }
    case Structure::RigidModel: {
      if (!data.rigid)
        return {false, "structure gate: input is not a built rigid product"};
      return evaluate_gate(Structure::GradientSoliton, data, frames);
    }
    case Structure::CottonFlat: {
      const double r = max_over([](Frame& f) {
        return f.norm(f.c_phi()) / (1.0 + f.norm(f.a_phi()));
      });
      if (r > 1e-10)
        return {false, "structure gate: phi-Cotton norm " + std::to_string(r) +
                           " exceeds 1e-10"};
      return {true, ""};
    }
    case Structure::Harmonic: {
      const double r = max_over([](Frame& f) {
        return f.norm(f.tension()) / (1.0 + f.norm(f.dphi()));
      });
      if (r > 1e-10)
        return {false, "structure gate: tension norm " + std::to_string(r) +
                           " exceeds 1e-10"};
      return {true, ""};
    }
  }
  return {false, "unknown structure gate"};
}

ResidualReport run_checks(const SolitonData& data, const std::vector<std::string>& ids,
                          int order, double tol_scale) {
  for (const auto& id : ids)
    if (!find_identity(id))
      fail(ErrorKind::UnknownIdentityId, "unknown identity id '" + id + "'");

  std::vector<Frame> frames;
  frames.reserve(data.probes.size());
  for (const auto& p : data.probes) frames.push_back(make_frame(data, p, order));

  std::map<Structure, GateResult> gates;
  auto gate_of = [&](Structure s) -> const GateResult& {
    auto it = gates.find(s);
    if (it == gates.end()) it = gates.emplace(s, evaluate_gate(s, data, frames)).first;
    return it->second;
  };

  ResidualReport report;
  report.jet_order = order;
  report.tol_scale = tol_scale;
  for (const IdentityEntry& entry : identity_catalog()) {
    if (!ids.empty() &&
        std::find(ids.begin(), ids.end(), entry.id) == ids.end())
      continue;
    CheckResult res;
    res.id = entry.id;
    res.name = entry.name;
    res.anchor = entry.anchor;
    res.tolerance = entry.tolerance * tol_scale;
    if (data.geo.dim < entry.min_dim) {
      res.status = CheckResult::Status::Skipped;
      res.skip_reason =
          "requires dimension >= " + std::to_string(entry.min_dim);
      report.checks.push_back(std::move(res));
      continue;
    }
    if (order < entry.min_order) {
      res.status = CheckResult::Status::Skipped;
      res.skip_reason = "requires jet order >= " + std::to_string(entry.min_order);
      report.checks.push_back(std::move(res));
      continue;
    }
    const GateResult& gate = gate_of(entry.gate);
    if (!gate.ok) {
      res.status = CheckResult::Status::Skipped;
      res.skip_reason = gate.reason;
      report.checks.push_back(std::move(res));
      continue;
    }
    try {
      if (entry.spread_check) {
        std::vector<double> values;
        double vmax = 0.0;
        for (Frame& f : frames) {
          CheckContext ctx{f, data};
          values.push_back(entry.value(ctx));
          vmax = max(vmax, abs(values.back()));
        }
        double lo = values[0], hi = values[0];
        for (double v : values) {
          lo = std::min(lo, v);
          hi = max(hi, v);
        }
        res.residuals = values;
        res.max_residual = (hi - lo) / (1.0 + vmax);
        res.status = res.max_residual <= res.tolerance
                         ? CheckResult::Status::Pass
                         : CheckResult::Status::Fail;
      } else {
        double worst = 0.0;
        for (Frame& f : frames) {
          CheckContext ctx{f, data};
          auto [raw, scale] = entry.eval(ctx);
          const double r = raw / (1.0 + scale);
          res.residuals.push_back(r);
          worst = max(worst, r);
        }
        res.max_residual = worst;
        res.status = worst <= res.tolerance ? CheckResult::Status::Pass
                                            : CheckResult::Status::Fail;
      }
    } catch (const Error& e) {
      switch (e.kind()) {
        case ErrorKind::InsufficientJetOrder:
        case ErrorKind::DimensionTooLow:
        case ErrorKind::ValidationError:
        case ErrorKind::NotASoliton:
          res.status = CheckResult::Status::Skipped;
          res.skip_reason = e.what();
          res.residuals.clear();
          break;
        default:
          throw;
      }
    }
    report.checks.push_back(std::move(res));
  }
  return report;
}

}  // namespace phicurv
