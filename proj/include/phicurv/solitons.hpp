#pragma once

#include <optional>

#include "phicurv/frame.hpp"
#include "phicurv/report.hpp"

namespace phicurv {

/// Dimensions of the harmonic-Einstein factor and the flat factor of a
/// product built by build_rigid_model; carried so the closed-form checks can
/// reconstruct the block structure.
struct RigidMeta {
  int l_dim = 0;
  int k = 0;
};

/// One candidate soliton structure: geometry, map, coupling, soliton constant
/// and a potential (gradient form) or vector field, plus its probe set.
struct SolitonData {
  GeometryData geo;
  std::optional<MapData> map;
  PotentialData potential;
  double alpha = 1.0;
  double lambda = 0.0;
  ExprPtr lambda_field;  // optional non-constant soliton function
  std::vector<std::vector<double>> probes;
  std::optional<RigidMeta> rigid;

  const MapData* map_ptr() const { return map ? &*map : nullptr; }
};

/// Frame over one probe of the candidate structure.
Frame make_frame(const SolitonData& data, const std::vector<double>& probe,
                 int order = 4);

/// Largest scaled residual of the defining soliton equations over the probe
/// set (gradient form when f is present, vector form when X is).
double structure_residual(const SolitonData& data, int order = 4);

/// Largest scaled harmonic-Einstein residual max(|Ric^phi - lambda g|, |tau|).
double harmonic_einstein_residual(const SolitonData& data, int order = 4);

/// Diagnostic only: the constant minimizing
/// sum over probes of |Ric^phi + Hess(f) - lambda g|^2. The engine never
/// substitutes it for the declared soliton constant.
double best_fit_lambda(const SolitonData& data, int order = 4);

/// Residuals of the defining equations: h1/h2 in the gradient case, b1/b2 in
/// the vector-field case.
ResidualReport soliton_residual(const SolitonData& data, int order = 4);

/// Residuals of the seven gradient-soliton formulas; requires the structure
/// residual to pass first (throws NotASoliton otherwise).
ResidualReport check_soliton_formulas(const SolitonData& data, int order = 4);

struct ConstancyResult {
  std::vector<double> values;  // per probe
  double spread = 0.0;         // max - min
  bool pass = false;
  double tolerance = 0.0;
};

/// S^phi + |grad f|^2 - 2 lambda f per probe; constant on shrinking gradient
/// solitons.
ConstancyResult hamilton_identity(const SolitonData& data, int order = 4);

/// S^phi + 2 Delta f - |grad f|^2 + 2 lambda f per probe for a candidate
/// potential (the declared one when `candidate` is null). Requires lambda > 0.
ConstancyResult muller_perelman_check(const SolitonData& data,
                                      const ExprPtr& candidate = nullptr,
                                      int order = 4);

/// L_X g = 0 and dphi(X) = 0 residuals.
ResidualReport vertical_killing_check(const GeometryData& geo, const MapData* map,
                                      const std::vector<ExprPtr>& X,
                                      const std::vector<std::vector<double>>& probes,
                                      int order = 4);

struct RigidityReport {
  enum class Status { RigidConsistent, NotConsistent, NotASoliton };
  Status status = Status::NotConsistent;
  std::vector<std::vector<double>> eigenvalues;  // per probe, ascending
  bool eigenvalues_match = false;   // every eigenvalue near {0, lambda}
  bool multiplicity_consistent = false;
  int inferred_k = -1;              // multiplicity of lambda (gradient factor)
  double nabla_ric_phi_norm = 0.0;
  bool steady_branch = false;
  double structure_residual = 0.0;
  std::string detail;
};

/// Eigenvalue split of Hess f, parallelism of Ric^phi and the rigidity
/// verdict. Non-soliton inputs are reported (not thrown) as NotASoliton.
RigidityReport rigidity_classify(const SolitonData& data, int order = 4,
                                 double tol = -1.0);

struct XLaplacianResult {
  std::vector<double> residuals;
  double max_residual = 0.0;
  bool pass = false;
};

/// Residual of the X-Laplacian identity for S^phi
///   Delta_X S^phi / 2 + alpha |tau|^2 + |tracefree Ric^phi|^2
///   + (S^phi - m lambda) S^phi / m - (m-1) Delta lambda = 0,
/// with X = grad f in the gradient case.
XLaplacianResult x_laplacian_sphi_check(const SolitonData& data, int order = 4);

struct RigidModelSpec {
  SolitonData einstein_factor;  // harmonic-Einstein candidate L
  int k = 0;
  std::vector<double> b;  // linear coefficients on the flat factor
  double c = 0.0;
  Box flat_box;           // chart box of the flat factor; defaults to [-1,1]^k
  int probe_count = 8;
  std::uint64_t probe_seed = 1;
};

/// Product of a verified harmonic-Einstein factor with flat R^k carrying the
/// Gaussian potential; the result passes soliton_residual by construction.
SolitonData build_rigid_model(const RigidModelSpec& spec, int order = 4);

}  // namespace phicurv
