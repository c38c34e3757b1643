#include "phicurv/ansatz.hpp"

#include <algorithm>
#include <cmath>

#include "phicurv/linalg.hpp"

namespace phicurv {

namespace {

// Lower Cholesky factor of a symmetric positive-definite jet matrix.
std::vector<Jet> jet_cholesky(const JetField& a, int dim, const Jet& zero) {
  std::vector<Jet> L(static_cast<std::size_t>(dim) * dim, zero);
  for (int j = 0; j < dim; ++j) {
    Jet d = a.at({j, j});
    for (int k = 0; k < j; ++k) d = d - L[j * dim + k] * L[j * dim + k];
    if (!(d.value() > 0.0))
      fail(ErrorKind::MetricNotPositiveDefinite,
           "ansatz residual metric is not positive definite");
    L[j * dim + j] = sqrt(d);
    for (int i = j + 1; i < dim; ++i) {
      Jet v = a.at({i, j});
      for (int k = 0; k < j; ++k) v = v - L[i * dim + k] * L[j * dim + k];
      L[i * dim + j] = v / L[j * dim + j];
    }
  }
  return L;
}

// Residual jets of one probe: chol(g)^-1 (Ric^phi - lambda g) chol(g)^-T
// flattened, then chol(h)^T tau. The Frobenius norm of the stack equals
// |Ric^phi - lambda g|_g^2 + |tau|_h^2.
void probe_residuals(Frame& f, std::vector<Jet>& out) {
  const int m = f.m(), n = f.n();
  const JetField& rp = f.ric_phi();
  const JetField& g = f.metric();
  const Jet& lam = f.lambda_jet();
  JetField e = f.make_field({Slot::Cov, Slot::Cov}, 0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      e.at_mut({i, j}) = rp.at({i, j}) - lam * g.at({i, j});

  const JetField& L = f.metric_chol();
  auto forward = [&](std::vector<Jet>& col) {
    for (int i = 0; i < m; ++i) {
      Jet v = col[i];
      for (int k = 0; k < i; ++k) v = v - L.at({i, k}) * col[k];
      col[i] = v / L.at({i, i});
    }
  };
  // W = L^-1 E, then R^T = L^-1 W^T.
  std::vector<Jet> w(static_cast<std::size_t>(m) * m, f.make_constant(0.0));
  for (int col = 0; col < m; ++col) {
    std::vector<Jet> c;
    c.reserve(m);
    for (int i = 0; i < m; ++i) c.push_back(e.at({i, col}));
    forward(c);
    for (int i = 0; i < m; ++i) w[i * m + col] = c[i];
  }
  for (int row = 0; row < m; ++row) {
    std::vector<Jet> c;
    c.reserve(m);
    for (int j = 0; j < m; ++j) c.push_back(w[row * m + j]);
    forward(c);
    for (int j = 0; j < m; ++j) out.push_back(c[j]);
  }

  const JetField& tau = f.tension();
  std::vector<Jet> lh = jet_cholesky(f.h_pull(), n, f.make_constant(0.0));
  for (int a = 0; a < n; ++a) {
    Jet v = f.make_constant(0.0);
    for (int b = a; b < n; ++b) v = v + lh[b * n + a] * tau.at({b});
    out.push_back(v);
  }
}

}  // namespace

AnsatzResult ansatz_solve(const AnsatzFamily& family, const AnsatzOptions& opt) {
  const int np = static_cast<int>(family.parameters.size());
  if (np == 0) fail(ErrorKind::ValidationError, "the family has no free parameters");
  if (family.lower.size() != family.parameters.size() ||
      family.upper.size() != family.parameters.size())
    fail(ErrorKind::ValidationError, "parameter box does not match the parameters");
  if (family.data.probes.empty())
    fail(ErrorKind::ValidationError, "the family declares no probes");
  if (opt.order < 3)
    fail(ErrorKind::InsufficientJetOrder,
         "parameter sensitivities of Ric^phi require jet order >= 3");

  const int m = family.data.geo.dim;
  EvalContext ctx;
  ctx.order = opt.order;
  for (int j = 0; j < np; ++j)
    ctx.param_slots[family.parameters[j]] = m + j;

  // A free "lambda" parameter turns the soliton constant into a jet variable.
  SolitonData data = family.data;
  if (ctx.param_slots.count("lambda") && !data.lambda_field)
    data.lambda_field = parse("lambda", data.geo.env);

  std::vector<double> theta(np);
  for (int j = 0; j < np; ++j)
    theta[j] = 0.5 * (family.lower[j] + family.upper[j]);

  const double root_weight = std::sqrt(opt.weight);

  auto evaluate = [&](const std::vector<double>& th, std::vector<double>& f_out,
                      std::vector<double>& jac_out) {
    ctx.param_values = th;
    std::vector<Jet> residuals;
    for (const auto& p : data.probes) {
      FrameInputs in;
      in.geo = &data.geo;
      in.map = data.map_ptr();
      in.potential = &data.potential;
      in.alpha = data.alpha;
      in.lambda = data.lambda;
      in.lambda_field = data.lambda_field;
      in.ctx = ctx;
      Frame frame(std::move(in), p);
      probe_residuals(frame, residuals);
    }
    const int nr = static_cast<int>(residuals.size());
    f_out.resize(nr);
    jac_out.assign(static_cast<std::size_t>(nr) * np, 0.0);
    const auto& space = *residuals[0].space();
    std::vector<int> theta_rank(np);
    for (int j = 0; j < np; ++j) {
      MultiIndex mi{};
      mi.e[m + j] = 1;
      mi.deg = 1;
      theta_rank[j] = space.rank(mi);
    }
    for (int i = 0; i < nr; ++i) {
      f_out[i] = root_weight * residuals[i].value();
      for (int j = 0; j < np; ++j)
        jac_out[i * np + j] = root_weight * residuals[i].coeff(theta_rank[j]);
    }
  };

  std::vector<double> f_vec, jac;
  evaluate(theta, f_vec, jac);
  auto sumsq = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
  };
  double current = sumsq(f_vec);

  AnsatzResult result;
  double mu = 1e-3;
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    if (current <= opt.target_residual) {
      result.theta = theta;
      result.residual = current;
      result.iterations = iter;
      result.converged = true;
      return result;
    }
    const int nr = static_cast<int>(f_vec.size());
    std::vector<double> a(static_cast<std::size_t>(np) * np, 0.0), grad(np, 0.0);
    for (int i = 0; i < nr; ++i) {
      for (int j = 0; j < np; ++j) {
        grad[j] += jac[i * np + j] * f_vec[i];
        for (int k = 0; k < np; ++k)
          a[j * np + k] += jac[i * np + j] * jac[i * np + k];
      }
    }
    bool accepted = false;
    for (int attempt = 0; attempt < 40 && !accepted; ++attempt) {
      // Marquardt-scaled damping keeps steps invariant under a uniform
      // reweighting of the residuals.
      std::vector<double> damped = a;
      for (int j = 0; j < np; ++j)
        damped[j * np + j] += mu * (a[j * np + j] > 0 ? a[j * np + j] : 1.0);
      std::vector<double> rhs(np), delta;
      for (int j = 0; j < np; ++j) rhs[j] = -grad[j];
      if (!solve_spd(damped, np, rhs, delta)) {
        mu *= 4.0;
        continue;
      }
      std::vector<double> trial(np);
      for (int j = 0; j < np; ++j)
        trial[j] = std::clamp(theta[j] + delta[j], family.lower[j], family.upper[j]);
      std::vector<double> f_trial, jac_trial;
      evaluate(trial, f_trial, jac_trial);
      const double next = sumsq(f_trial);
      if (next < current) {
        theta = trial;
        f_vec = std::move(f_trial);
        jac = std::move(jac_trial);
        current = next;
        mu = std::max(mu / 3.0, 1e-14);
        accepted = true;
      } else {
        mu *= 4.0;
      }
    }
    if (!accepted)
      fail(ErrorKind::SingularNormalEquations,
           "Levenberg damping exhausted without a decrease (residual " +
               std::to_string(current) + ")");
  }
  if (current <= opt.target_residual) {
    result.theta = theta;
    result.residual = current;
    result.iterations = opt.max_iterations;
    result.converged = true;
    return result;
  }
  fail(ErrorKind::MaxIterations,
       "Gauss-Newton did not reach the target residual (final " +
           std::to_string(current) + ")");
}

}  // namespace phicurv
