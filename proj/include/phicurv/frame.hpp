#pragma once

#include <map>
#include <memory>
#include <optional>

#include "phicurv/maps.hpp"

namespace phicurv {

/// Jet evaluation context: truncation order plus ansatz parameters lifted as
/// extra first-class jet variables (chart coordinates occupy slots 0..m-1,
/// parameters the slots after them).
struct EvalContext {
  int order = 4;
  std::map<std::string, int> param_slots;  // absolute jet-variable slot
  std::vector<double> param_values;        // one per parameter, slot order
};

struct FrameInputs {
  const GeometryData* geo = nullptr;
  const MapData* map = nullptr;            // null: constant map to flat R^1
  const PotentialData* potential = nullptr;
  double alpha = 1.0;
  double lambda = 0.0;
  ExprPtr lambda_field;                    // optional non-constant lambda
  EvalContext ctx;
};

/// All jets of one (geometry, map, potential) triple at one probe point, with
/// lazy assembly and memoization. Each probe point gets its own frame and
/// nothing is shared mutably, so distinct probes may be evaluated
/// concurrently.
class Frame {
 public:
  Frame(FrameInputs inputs, std::vector<double> point);
  ~Frame();
  Frame(Frame&&) noexcept;

  int m() const;                       // chart dimension
  int n() const;                       // target dimension
  int order() const;
  double alpha() const;
  const std::vector<double>& point() const;
  const JetSpaceRef& space() const;    // chart-side jet space (m + #params)
  bool has_map() const;
  bool has_potential_f() const;
  bool has_vector_field() const;

  // -- metric level
  const JetField& metric();        // valid = order
  const JetField& metric_inv();
  const JetField& metric_chol();   // lower Cholesky factor of g
  const JetField& gamma();         // Christoffels (Con,Cov,Cov)
  const JetField& riemann_up();    // R^l_{jkt}
  const JetField& riemann();       // R_{ijkt}
  const JetField& ricci();
  const Jet& scalar_curv();
  const JetField& nabla_riemann();

  // -- map level
  std::vector<double> map_point();     // phi(p), validated against target box
  const JetField& dphi();              // (NCon, Cov)
  const JetField& second_ff();         // phi^a_{ij}
  const JetField& nabla3_phi();
  const JetField& nabla4_phi();
  const JetField& pullback_metric();   // phi^* h (Cov,Cov)
  const Jet& energy_density();         // |dphi|^2
  const JetField& stress();            // T
  const JetField& div_stress();        // (Cov)
  const JetField& tension();           // (NCon)
  const JetField& nabla_tension();     // (NCon, Cov)
  const JetField& bitension();         // (NCon)
  const JetField& h_pull();            // h_ab along phi (NCov,NCov)
  const JetField& hinv_pull();
  const JetField& ngamma_pull();       // target Christoffels along phi
  const JetField& ngamma_dphi();       // NGamma^a_{bc} phi^c_k (NCon,NCov,Cov)
  const JetField& nriem_pull();        // target Riemann along phi (NCov^4)

  // -- potential level
  const Jet& f();
  const JetField& grad_f();            // (Cov)
  const JetField& hess_f();
  const JetField& vector_field();      // X^i (Con)
  const Jet& lambda_jet();
  double lambda_value();

  // -- phi-curvature level
  const JetField& ric_phi();
  const JetField& nabla_ric_phi();
  const Jet& s_phi();
  const JetField& a_phi();             // phi-Schouten
  const JetField& c_phi();             // (Cov,Cov,Cov), antisym in last two
  const JetField& f_phi();
  const JetField& w_phi();             // (Cov^4)
  const JetField& div_w_phi();         // g^{tl} W_{tijk,l} -> (Cov^3) over (i,j,k)
  const JetField& b_phi();             // phi-Bach (Cov,Cov)
  const JetField& j_field();           // (NCon)
  const JetField& d_phi();             // (Cov^3)
  const JetField& y_field();           // Y_k = D_{ijk} f^i f^j (Cov)

  // -- machinery
  /// Covariant derivative; the new covariant slot is appended last.
  JetField nabla(const JetField& t) const;
  JetField raise(const JetField& t, int slot) const;
  JetField lower(const JetField& t, int slot) const;
  /// Metric-aware trace of two chart slots (inserts g or g^{-1} as needed).
  JetField trace_chart(const JetField& t, int s1, int s2) const;
  /// Metric-aware trace of two pullback slots.
  JetField trace_target(const JetField& t, int s1, int s2) const;
  JetField make_field(std::vector<Slot> sig, int valid) const;
  Jet make_constant(double v) const;

  /// Pointwise tensor norm squared with all slots contracted by the metric
  /// appropriate to their variance.
  double norm2(const JetField& t);
  double norm2(const TensorValue& t);
  double norm(const JetField& t);
  TensorValue value(const JetField& t) const;

  // Cache layout shared by the implementation units; see frame_impl.hpp.
  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace phicurv
