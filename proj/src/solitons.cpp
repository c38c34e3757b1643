#include "phicurv/solitons.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "phicurv/catalog.hpp"
#include "phicurv/linalg.hpp"
#include "phicurv/probes.hpp"

namespace phicurv {

Frame make_frame(const SolitonData& data, const std::vector<double>& probe,
                 int order) {
  FrameInputs in;
  in.geo = &data.geo;
  in.map = data.map_ptr();
  in.potential = &data.potential;
  in.alpha = data.alpha;
  in.lambda = data.lambda;
  in.lambda_field = data.lambda_field;
  in.ctx.order = order;
  return Frame(std::move(in), probe);
}

double structure_residual(const SolitonData& data, int order) {
  double worst = 0.0;
  for (const auto& p : data.probes) {
    Frame f = make_frame(data, p, order);
    if (data.potential.has_f())
      worst = std::max(worst, gradient_residual_frame(f));
    else if (data.potential.has_X())
      worst = std::max(worst, vector_residual_frame(f));
    else
      fail(ErrorKind::ValidationError,
           "no potential function or vector field declared");
  }
  return worst;
}

double harmonic_einstein_residual(const SolitonData& data, int order) {
  double worst = 0.0;
  for (const auto& p : data.probes) {
    Frame f = make_frame(data, p, order);
    worst = std::max(worst, he_residual_frame(f));
  }
  return worst;
}

double best_fit_lambda(const SolitonData& data, int order) {
  if (!data.potential.has_f())
    fail(ErrorKind::ValidationError, "the lambda diagnostic requires a potential");
  // The projection of Ric^phi + Hess(f) onto g is its g-trace over m, so the
  // least-squares constant is the probe average of that trace.
  double sum = 0.0;
  for (const auto& p : data.probes) {
    Frame f = make_frame(data, p, order);
    JetField s = f.make_field({Slot::Cov, Slot::Cov}, 0);
    const JetField& rp = f.ric_phi();
    const JetField& hf = f.hess_f();
    for (int i = 0; i < f.m(); ++i)
      for (int j = 0; j < f.m(); ++j)
        s.at_mut({i, j}) = rp.at({i, j}) + hf.at({i, j});
    sum += f.trace_chart(s, 0, 1).c[0].value() / f.m();
  }
  return sum / static_cast<double>(data.probes.size());
}

ResidualReport soliton_residual(const SolitonData& data, int order) {
  std::vector<std::string> ids;
  if (data.potential.has_f())
    ids = {"soliton-h1", "soliton-h2"};
  else if (data.potential.has_X())
    ids = {"soliton-b1", "soliton-b2"};
  else
    fail(ErrorKind::ValidationError,
         "no potential function or vector field declared");
  return run_checks(data, ids, order);
}

ResidualReport check_soliton_formulas(const SolitonData& data, int order) {
  if (!data.potential.has_f())
    fail(ErrorKind::NotASoliton, "the formula suite requires a gradient soliton");
  const double r = structure_residual(data, order);
  if (r > 1e-8)
    fail(ErrorKind::NotASoliton,
         "gradient soliton residual " + std::to_string(r) + " exceeds 1e-8");
  return run_checks(data,
                    {"soliton-form-commutation", "soliton-form-grad-sphi",
                     "soliton-form-div-riem", "soliton-form-fnorm",
                     "soliton-form-lap-ric-a", "soliton-form-lap-ric-b",
                     "soliton-form-lap-sphi"},
                    order);
}

namespace {

ConstancyResult constancy_from(const CheckResult& check) {
  ConstancyResult out;
  out.values = check.residuals;
  if (!out.values.empty()) {
    auto [lo, hi] = std::minmax_element(out.values.begin(), out.values.end());
    out.spread = *hi - *lo;
  }
  out.tolerance = check.tolerance;
  out.pass = check.status == CheckResult::Status::Pass;
  return out;
}

}  // namespace

ConstancyResult hamilton_identity(const SolitonData& data, int order) {
  if (!data.potential.has_f() || !(data.lambda > 0.0) || data.lambda_field)
    fail(ErrorKind::NotASoliton,
         "the Hamilton identity requires a shrinking gradient soliton");
  const double r = structure_residual(data, order);
  if (r > 1e-8)
    fail(ErrorKind::NotASoliton,
         "gradient soliton residual " + std::to_string(r) + " exceeds 1e-8");
  ResidualReport rep = run_checks(data, {"hamilton-identity"}, order);
  return constancy_from(rep.checks.at(0));
}

ConstancyResult muller_perelman_check(const SolitonData& data,
                                      const ExprPtr& candidate, int order) {
  if (!(data.lambda > 0.0))
    fail(ErrorKind::ValidationError, "the Muller-Perelman check requires lambda > 0");
  SolitonData work = data;
  if (candidate) {
    work.potential.f = candidate;
    work.potential.X.clear();
  }
  if (!work.potential.has_f())
    fail(ErrorKind::ValidationError, "no candidate potential supplied");
  ResidualReport rep = run_checks(work, {"muller-perelman"}, order);
  if (rep.checks.at(0).status == CheckResult::Status::Skipped)
    fail(ErrorKind::ValidationError, rep.checks.at(0).skip_reason);
  return constancy_from(rep.checks.at(0));
}

ResidualReport vertical_killing_check(const GeometryData& geo, const MapData* map,
                                      const std::vector<ExprPtr>& X,
                                      const std::vector<std::vector<double>>& probes,
                                      int order) {
  SolitonData data;
  data.geo = geo;
  if (map) data.map = *map;
  data.potential.X = X;
  data.probes = probes;

  ResidualReport report;
  report.jet_order = order;
  CheckResult lie;
  lie.id = "vertical-killing-lie";
  lie.name = "Killing equation";
  lie.anchor = "L_X g = 0";
  lie.tolerance = 1e-8;
  CheckResult vert;
  vert.id = "vertical-killing-dphi";
  vert.name = "verticality of the field";
  vert.anchor = "dphi(X) = 0";
  vert.tolerance = 1e-8;
  for (const auto& p : probes) {
    Frame f = make_frame(data, p, order);
    JetField dx = f.nabla(f.lower(f.vector_field(), 0));
    JetField lxg = f.make_field({Slot::Cov, Slot::Cov}, 0);
    for (int i = 0; i < f.m(); ++i)
      for (int j = 0; j < f.m(); ++j)
        lxg.at_mut({i, j}) = dx.at({i, j}) + dx.at({j, i});
    lie.residuals.push_back(f.norm(lxg) / (1.0 + f.norm(f.vector_field())));

    const JetField& dp = f.dphi();
    const JetField& x = f.vector_field();
    JetField dphix = f.make_field({Slot::NCon}, 0);
    for (int a = 0; a < f.n(); ++a) {
      Jet v = f.make_constant(0.0);
      for (int i = 0; i < f.m(); ++i) v = v + dp.at({a, i}) * x.at({i});
      dphix.at_mut({a}) = v;
    }
    vert.residuals.push_back(f.norm(dphix) / (1.0 + f.norm(dp) * f.norm(x)));
  }
  for (CheckResult* c : {&lie, &vert}) {
    c->max_residual = 0.0;
    for (double r : c->residuals) c->max_residual = std::max(c->max_residual, r);
    c->status = c->max_residual <= c->tolerance ? CheckResult::Status::Pass
                                                : CheckResult::Status::Fail;
    report.checks.push_back(*c);
  }
  return report;
}

RigidityReport rigidity_classify(const SolitonData& data, int order, double tol) {
  RigidityReport rep;
  if (tol < 0) tol = 1e-6 * (1.0 + std::abs(data.lambda));
  if (!data.potential.has_f()) {
    rep.status = RigidityReport::Status::NotASoliton;
    rep.detail = "the classifier requires a gradient soliton";
    return rep;
  }
  rep.structure_residual = structure_residual(data, order);
  if (rep.structure_residual > 1e-8) {
    rep.status = RigidityReport::Status::NotASoliton;
    rep.detail = "gradient soliton residual " +
                 std::to_string(rep.structure_residual) + " exceeds 1e-8";
    return rep;
  }

  const int m = data.geo.dim;
  std::vector<int> lambda_mults;
  std::vector<double> sphi_values, gradf_norms;
  double hess_norm = 0.0;
  for (const auto& p : data.probes) {
    Frame f = make_frame(data, p, order);
    rep.nabla_ric_phi_norm =
        std::max(rep.nabla_ric_phi_norm,
                 f.norm(f.nabla_ric_phi()) / (1.0 + f.norm(f.ric_phi())));
    sphi_values.push_back(f.s_phi().value());
    gradf_norms.push_back(f.norm(f.grad_f()));
    hess_norm = std::max(hess_norm, f.norm(f.hess_f()));

    // Eigenvalues of the g-self-adjoint Hessian endomorphism through the
    // Cholesky congruence L^{-1} H L^{-T}.
    TensorValue gv = f.value(f.metric());
    TensorValue hv = f.value(f.hess_f());
    std::vector<double> L;
    if (!cholesky(gv.comp, m, L))
      fail(ErrorKind::MetricNotPositiveDefinite, "metric not SPD at a probe");
    auto forward = [&](std::vector<double>& col) {
      for (int i = 0; i < m; ++i) {
        double v = col[i];
        for (int k = 0; k < i; ++k) v -= L[i * m + k] * col[k];
        col[i] = v / L[i * m + i];
      }
    };
    // W = L^{-1} H (columns), then B^T = L^{-1} W^T.
    std::vector<double> w(m * m), b(m * m);
    for (int col = 0; col < m; ++col) {
      std::vector<double> c(m);
      for (int i = 0; i < m; ++i) c[i] = hv.at({i, col});
      forward(c);
      for (int i = 0; i < m; ++i) w[i * m + col] = c[i];
    }
    for (int row = 0; row < m; ++row) {
      std::vector<double> c(m);
      for (int j = 0; j < m; ++j) c[j] = w[row * m + j];
      forward(c);
      for (int j = 0; j < m; ++j) b[row * m + j] = c[j];
    }
    std::vector<double> eig = sym_eigenvalues(b, m);
    int near_lambda = 0;
    for (double e : eig) {
      if (std::abs(e - data.lambda) <= tol)
        ++near_lambda;
      else if (std::abs(e) > tol)
        near_lambda = -1000000;  // eigenvalue away from {0, lambda}
    }
    lambda_mults.push_back(near_lambda);
    rep.eigenvalues.push_back(std::move(eig));
  }

  if (data.lambda != 0.0 && !data.lambda_field) {
    rep.eigenvalues_match = true;
    for (int mult : lambda_mults) rep.eigenvalues_match &= mult >= 0;
    rep.multiplicity_consistent =
        std::adjacent_find(lambda_mults.begin(), lambda_mults.end(),
                           std::not_equal_to<>()) == lambda_mults.end();
    rep.inferred_k = rep.eigenvalues_match ? lambda_mults.front() : -1;
    const bool parallel = rep.nabla_ric_phi_norm <= tol;
    rep.status = (rep.eigenvalues_match && rep.multiplicity_consistent && parallel)
                     ? RigidityReport::Status::RigidConsistent
                     : RigidityReport::Status::NotConsistent;
    if (rep.status != RigidityReport::Status::RigidConsistent) {
      rep.detail = !rep.eigenvalues_match ? "Hess(f) eigenvalues leave {0, lambda}"
                   : !rep.multiplicity_consistent
                       ? "eigenvalue multiplicities vary across probes"
                       : "phi-Ricci tensor is not parallel";
    }
  } else {
    // Steady branch: S^phi = 0, parallel Hessian-free potential with |grad f|
    // constant.
    rep.steady_branch = true;
    auto [smin, smax] = std::minmax_element(sphi_values.begin(), sphi_values.end());
    auto [gmin, gmax] = std::minmax_element(gradf_norms.begin(), gradf_norms.end());
    const bool sphi_zero = std::abs(*smin) <= tol && std::abs(*smax) <= tol;
    const bool hess_zero = hess_norm <= tol;
    const bool grad_const = (*gmax - *gmin) <= tol * (1.0 + *gmax);
    rep.eigenvalues_match = hess_zero;
    rep.multiplicity_consistent = true;
    rep.inferred_k = *gmax > tol ? 1 : 0;
    rep.status = (sphi_zero && hess_zero && grad_const)
                     ? RigidityReport::Status::RigidConsistent
                     : RigidityReport::Status::NotConsistent;
    if (rep.status != RigidityReport::Status::RigidConsistent)
      rep.detail = !sphi_zero ? "phi-scalar curvature does not vanish"
                   : !hess_zero ? "Hess(f) does not vanish"
                                : "|grad f| is not constant across probes";
  }
  return rep;
}

XLaplacianResult x_laplacian_sphi_check(const SolitonData& data, int order) {
  const double r = structure_residual(data, order);
  if (r > 1e-8)
    fail(ErrorKind::NotASoliton,
         "structure residual " + std::to_string(r) + " exceeds 1e-8");
  XLaplacianResult out;
  for (const auto& p : data.probes) {
    Frame f = make_frame(data, p, order);
    const double res = std::abs(x_laplacian_residual_frame(f)) /
                       (1.0 + std::abs(f.s_phi().value()) + f.norm2(f.ric_phi()));
    out.residuals.push_back(res);
    out.max_residual = std::max(out.max_residual, res);
  }
  out.pass = out.max_residual <= 1e-7;
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SolitonData build_rigid_model(const RigidModelSpec& spec, int order) {
  const SolitonData& L = spec.einstein_factor;
  if (spec.k < 0)
    fail(ErrorKind::ValidationError, "the flat factor dimension must be >= 0");
  if (static_cast<int>(spec.b.size()) != spec.k && !spec.b.empty())
    fail(ErrorKind::ValidationError, "b must have one entry per flat coordinate");
  const double he = harmonic_einstein_residual(L, order);
  if (he > 1e-9)
    fail(ErrorKind::NotHarmonicEinstein,
         "harmonic-Einstein residual " + std::to_string(he) + " exceeds 1e-9");

  const int m = L.geo.dim;
  SolitonData out;
  out.alpha = L.alpha;
  out.lambda = L.lambda;
  out.map = L.map;
  out.rigid = RigidMeta{m, spec.k};

  if (spec.k == 0) {
    out.geo = L.geo;
    FieldEnv env = L.geo.env;
    out.potential.f = parse(fmt(spec.c), env);
    out.probes = L.probes;
    return out;
  }

  GeometryData geo;
  geo.dim = m + spec.k;
  geo.env = L.geo.env;
  geo.env.chart_dim = geo.dim;
  geo.family = VarFamily::Chart;
  geo.singular_margin = L.geo.singular_margin;
  geo.box = L.geo.box;
  Box flat = spec.flat_box;
  if (flat.lo.empty()) {
    flat.lo.assign(spec.k, -1.0);
    flat.hi.assign(spec.k, 1.0);
  }
  for (int a = 0; a < spec.k; ++a) {
    geo.box.lo.push_back(flat.lo[a]);
    geo.box.hi.push_back(flat.hi[a]);
  }

  ExprPtr zero = parse("0", geo.env);
  ExprPtr one = parse("1", geo.env);
  geo.metric.assign(static_cast<std::size_t>(geo.dim) * geo.dim, zero);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      geo.metric[i * geo.dim + j] = L.geo.metric[i * m + j];
  for (int a = 0; a < spec.k; ++a) geo.metric[(m + a) * geo.dim + (m + a)] = one;
  out.geo = std::move(geo);

  // Gaussian potential on the flat factor: lambda/2 |x|^2 + <b, x> + c.
  std::ostringstream f;
  f << fmt(L.lambda / 2.0) << "*(";
  for (int a = 0; a < spec.k; ++a)
    f << (a ? " + " : "") << "x" << (m + a + 1) << "^2";
  f << ")";
  for (int a = 0; a < spec.k; ++a) {
    const double ba = spec.b.empty() ? 0.0 : spec.b[a];
    if (ba != 0.0) f << " + " << fmt(ba) << "*x" << (m + a + 1);
  }
  if (spec.c != 0.0) f << " + " << fmt(spec.c);
  out.potential.f = parse(f.str(), out.geo.env);

  out.probes = generate_probes(out.geo.box, out.geo.singular_margin,
                               spec.probe_count, spec.probe_seed);
  return out;
}

}  // namespace phicurv
