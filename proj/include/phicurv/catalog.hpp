#pragma once

#include <functional>

#include "phicurv/solitons.hpp"

namespace phicurv {

/// Structural precondition of an identity.
enum class Structure {
  Any,
  GradientSoliton,     // h1, h2 within gate tolerance
  VectorSoliton,       // b1, b2 within gate tolerance
  AnySoliton,          // gradient or vector form
  ShrinkingGradient,   // gradient soliton with lambda > 0
  HarmonicEinstein,    // Ric^phi = lambda g, tau = 0 within gate tolerance
  ParallelRicPhi,      // nabla Ric^phi = 0 within gate tolerance
  RigidModel,          // product metadata present + gradient soliton
  CottonFlat,          // C^phi = 0 within gate tolerance
  Harmonic,            // tau = 0 within gate tolerance
};

const char* to_string(Structure s);

struct CheckContext {
  Frame& frame;
  const SolitonData& data;
};

/// One catalog identity: a residual (with its own scale) evaluated per probe,
/// or a per-probe value whose constancy across probes is the check.
struct IdentityEntry {
  std::string id;
  std::string name;
  std::string anchor;  // the formula being checked, ASCII notation
  Structure gate = Structure::Any;
  double tolerance = 1e-8;
  int min_dim = 2;
  int min_order = 2;
  bool spread_check = false;
  // residual evaluation: returns (raw residual, scale); the scaled residual
  // raw/(1+scale) is compared against the tolerance.
  std::function<std::pair<double, double>(CheckContext&)> eval;
  // spread evaluation: per-probe value; spread/(1+max|value|) vs tolerance.
  std::function<double(CheckContext&)> value;
};

/// The full identity catalog in declaration order.
const std::vector<IdentityEntry>& identity_catalog();

const IdentityEntry* find_identity(const std::string& id);

// Scaled per-frame residuals of the defining structures; shared between the
// catalog gates and the soliton operations.
double gradient_residual_frame(Frame& f);
double vector_residual_frame(Frame& f);
double he_residual_frame(Frame& f);
double x_laplacian_residual_frame(Frame& f);

struct GateResult {
  bool ok = true;
  std::string reason;
};

/// Evaluate a structural gate over already-built frames (one per probe).
GateResult evaluate_gate(Structure gate, const SolitonData& data,
                         std::vector<Frame>& frames);

/// Run catalog entries over the probe set. `ids` empty means every entry.
/// Gate failures become Skipped results carrying the reason.
ResidualReport run_checks(const SolitonData& data, const std::vector<std::string>& ids,
                          int order = 4, double tol_scale = 1.0);

}  // namespace phicurv
