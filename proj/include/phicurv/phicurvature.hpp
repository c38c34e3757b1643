#pragma once

#include "phicurv/maps.hpp"

namespace phicurv {

struct PhiRicciResult {
  TensorValue ric_phi;
  double s_phi;
  TensorValue traceless;  // traceless part of the phi-Ricci tensor
};

PhiRicciResult phi_ricci(const GeometryData& geo, const MapData* map,
                         double alpha, const std::vector<double>& p,
                         int order = 4);

struct PhiSchoutenResult {
  TensorValue a_phi;  // phi-Schouten
  TensorValue c_phi;  // phi-Cotton, antisymmetric in the last two slots
  TensorValue f_phi;  // antisymmetrized derivative of phi-Ricci
};

PhiSchoutenResult phi_schouten_cotton(const GeometryData& geo, const MapData* map,
                                      double alpha, const std::vector<double>& p,
                                      int order = 4);

struct PhiWeylResult {
  TensorValue w_phi;
  TensorValue div_w_phi;  // g^{tl} W_{tijk,l} over the remaining (i,j,k)
};

PhiWeylResult phi_weyl(const GeometryData& geo, const MapData* map, double alpha,
                       const std::vector<double>& p, int order = 4);

struct PhiBachResult {
  TensorValue b_phi;
  double trace;
  TensorValue traceless;
};

PhiBachResult phi_bach(const GeometryData& geo, const MapData* map, double alpha,
                       const std::vector<double>& p, int order = 4);

TensorValue j_field(const GeometryData& geo, const MapData* map, double alpha,
                    const std::vector<double>& p, int order = 4);

struct DPhiResult {
  TensorValue d_phi;  // (Cov,Cov,Cov)
  TensorValue y;      // Y_k = D_{ijk} f^i f^j, covariant components
  double d_norm2;
  /// | |D|^2 - 2/(m-2) D_{ijk} R^phi_{ij} f_k |.
  double norm_relation_residual;
};

DPhiResult d_phi_and_y(const GeometryData& geo, const MapData* map, double alpha,
                       const PotentialData& potential, const std::vector<double>& p,
                       int order = 4);

}  // namespace phicurv
