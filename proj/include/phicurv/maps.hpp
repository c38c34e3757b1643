#pragma once

#include "phicurv/geometry.hpp"

namespace phicurv {

/// The smooth map phi: M -> N given by component expressions in chart
/// coordinates, together with the target geometry in y-coordinates.
struct MapData {
  GeometryData target;              // family == VarFamily::Target
  bool flat_target = false;         // target Christoffels short-circuit to zero
  std::vector<ExprPtr> components;  // n expressions in x-coordinates

  int target_dim() const { return target.dim; }
};

struct MapFirstOrder {
  TensorValue dphi;             // (NCon, Cov)
  TensorValue pullback_metric;  // phi^* h
  double energy_density;        // |dphi|^2
  TensorValue stress;           // T = phi^*h - |dphi|^2/2 g
  TensorValue div_stress;       // (Cov)
};

MapFirstOrder map_first_order(const MapData& map, const GeometryData& geo,
                              const std::vector<double>& p, int order = 4);

/// Tension field tau(phi)^a = g^{ij} phi^a_{ij}, signature (NCon).
TensorValue tension(const MapData& map, const GeometryData& geo,
                    const std::vector<double>& p, int order = 4);

/// Bi-tension field tau2(phi)^a; requires jets of order >= 4.
TensorValue bitension(const MapData& map, const GeometryData& geo,
                      const std::vector<double>& p, int order = 4);

}  // namespace phicurv
