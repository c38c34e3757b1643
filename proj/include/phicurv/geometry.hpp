#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phicurv/expr.hpp"
#include "phicurv/tensor.hpp"

namespace phicurv {

struct Box {
  std::vector<double> lo, hi;
  bool contains(std::span<const double> p, double margin = 0.0) const;
};

/// Built-in manifolds with closed-form curvature, used as test oracles.
enum class OracleKind { Euclidean, Torus, Sphere, ConformalE2X1 };

struct OracleTag {
  OracleKind kind;
  double radius = 1.0;  // Sphere only
};

std::optional<OracleTag> parse_oracle_tag(const std::string& text);

/// Chart dimension, metric component expressions and the chart box. Metric
/// expressions are stored mirrored (full m x m).
struct GeometryData {
  int dim = 0;
  std::vector<ExprPtr> metric;  // dim*dim, row major
  Box box;
  double singular_margin = 0.0;
  std::optional<OracleTag> oracle;
  FieldEnv env;
  VarFamily family = VarFamily::Chart;

  const ExprAst& g(int i, int j) const { return *metric[i * dim + j]; }
};

/// Soliton potential: a scalar f (gradient form) or a vector field X.
struct PotentialData {
  ExprPtr f;
  std::vector<ExprPtr> X;

  bool has_f() const { return static_cast<bool>(f); }
  bool has_X() const { return !X.empty(); }
};

class Frame;

// ---- pointwise operations ---------------------------------------------------

/// Christoffel symbols of the Levi-Civita connection at p, signature
/// (Con, Cov, Cov), symmetric in the lower pair.
TensorValue christoffel(const GeometryData& geo, const std::vector<double>& p,
                        int order = 4);

struct CurvatureResult {
  TensorValue riem;  // R_ijkt, all slots covariant
  TensorValue ric;
  double scalar;
};

/// Riemann, Ricci and scalar curvature at p. Sign convention: the unit round
/// sphere has sectional curvature +1 and Ric = (m-1) g.
CurvatureResult curvature(const GeometryData& geo, const std::vector<double>& p,
                          int order = 4);

struct LaplacianResult {
  TensorValue hess_f;
  double lap_f;                      // Laplace-Beltrami of f
  std::optional<double> lap_f_u;     // weighted Laplacian of u with weight f
  std::optional<double> lap_X_u;     // X-Laplacian of u
};

/// Hessian and (weighted) Laplacians of the potential; when `u` is given its
/// f-Laplacian and (when X is present) X-Laplacian are also returned.
LaplacianResult hessian_and_laplacians(const GeometryData& geo,
                                       const PotentialData& pot,
                                       const std::vector<double>& p,
                                       const ExprPtr& u = nullptr, int order = 4);

/// (L_X g)_ij = nabla_i X_j + nabla_j X_i with X index-lowered.
TensorValue lie_derivative_metric(const GeometryData& geo,
                                  const std::vector<ExprPtr>& X,
                                  const std::vector<double>& p, int order = 4);

/// Repeated covariant derivative (depth 1..3) of a frame tensor; the new
/// covariant slots are appended last, one per derivative.
TensorValue covariant_derivative(Frame& frame, const JetField& t, int depth);

/// Kulkarni-Nomizu product of two symmetric 2-tensors (pure component
/// arithmetic; no metric involved).
TensorValue kulkarni_nomizu(const TensorValue& A, const TensorValue& B);

/// Totally traceless part of a symmetric 2-tensor at p.
TensorValue traceless_part(const TensorValue& A, const GeometryData& geo,
                           const std::vector<double>& p, int order = 2);

// ---- closed-form oracles ----------------------------------------------------

struct OracleCurvature {
  TensorValue gamma;
  TensorValue riem;
  TensorValue ric;
  double scalar;
};

/// Closed-form Christoffels and curvature of the tagged built-in manifold,
/// derived analytically and independent of the jet pipeline.
OracleCurvature oracle_curvature(const GeometryData& geo,
                                 const std::vector<double>& p);

}  // namespace phicurv
