#pragma once

#include "phicurv/solitons.hpp"

namespace phicurv {

/// A parametric harmonic-Einstein candidate: the geometry / map expressions
/// may reference the named free parameters, which are boxed. The fit starts
/// from the box center.
struct AnsatzFamily {
  SolitonData data;
  std::vector<std::string> parameters;
  std::vector<double> lower, upper;
};

struct AnsatzOptions {
  int order = 4;
  int max_iterations = 50;
  double target_residual = 1e-10;  // on the sum of squared residuals
  double weight = 1.0;             // uniform probe weight
};

struct AnsatzResult {
  std::vector<double> theta;
  double residual = 0.0;  // final sum of squares
  int iterations = 0;
  bool converged = false;
};

/// Gauss-Newton with Levenberg damping on the stacked residual
///   [ chol(g)^-1 (Ric^phi - lambda g) chol(g)^-T , chol(h)^T tau ]
/// over all probes. Parameter sensitivities come from first-order jet
/// coefficients, not finite differences. Deterministic for a fixed family.
AnsatzResult ansatz_solve(const AnsatzFamily& family,
                          const AnsatzOptions& options = {});

}  // namespace phicurv
