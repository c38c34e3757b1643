#pragma once

// Private cache layout of Frame, shared by the geometry / maps / phi-curvature
// translation units that together implement it.

#include <memory>
#include <optional>

#include "phicurv/frame.hpp"

namespace phicurv {

struct Frame::Impl {
  FrameInputs in;
  std::vector<double> pt;    // chart point (dim m)
  std::vector<double> base;  // jet base point: chart coords then parameters
  JetSpaceRef sp;
  int m = 0;
  int nparams = 0;

  JetBinding chart_binding() const;
  const JetField& chol(Frame& f);
  const MapData& map();  // declared map or the trivial constant map

  // metric level
  std::optional<JetField> g_, ginv_, chol_, gamma_, riem_up_, riem_, ric_,
      nabla_riem_;
  std::optional<Jet> scal_;

  // map level
  std::unique_ptr<MapData> trivial_map_;
  std::optional<std::vector<double>> phi_pt_;
  std::unique_ptr<Frame> target_;
  std::optional<std::vector<Jet>> phi_jets_;
  std::optional<JetField> dphi_, sff_, n3phi_, n4phi_, h_pull_, hinv_pull_,
      ngamma_pull_, ngamma_dphi_, nriem_pull_, pullback_, stress_, div_stress_,
      tension_, nabla_tension_, bitension_;
  std::optional<Jet> energy_;

  // potential level
  std::optional<Jet> f_, lambda_;
  std::optional<JetField> grad_f_, hess_f_, x_;

  // phi-curvature level
  std::optional<Jet> s_phi_;
  std::optional<JetField> ric_phi_, nabla_ric_phi_, a_phi_, c_phi_, f_phi_, w_phi_, div_w_,
      b_phi_, j_, d_phi_, y_;
};

}  // namespace phicurv
