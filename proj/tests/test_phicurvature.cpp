#include "phicurv/phicurvature.hpp"

#include <cmath>

#include "doctest.h"
#include "phicurv/catalog.hpp"
#include "phicurv/frame.hpp"
#include "phicurv/probes.hpp"
#include "testutil.hpp"

using namespace phicurv;
using namespace testutil;

namespace {

// Perturbed flat metric with a nonlinear map to the flat line: a generic
// input with no special structure, used to stress the universal identities.
SolitonData generic_input(unsigned seed) {
  SolitonData data;
  data.geo = geo_perturbed(3, seed);
  data.map = map_to_flat_line(3, "x1^2 + 0.5*sin(x2) - 0.3*x3*x1");
  data.alpha = 1.3;
  data.probes = generate_probes(data.geo.box, 0.0, 4, seed);
  return data;
}

// Perturbed metric with a curved target: exercises the pullback connection
// and target curvature inside every phi-curvature.
SolitonData curved_target_input(unsigned seed) {
  SolitonData data;
  data.geo = geo_perturbed(3, seed);
  MapData map;
  map.target.dim = 2;
  map.target.family = VarFamily::Target;
  map.target.env.target_dim = 2;
  map.target.metric = {parse("1", map.target.env, VarFamily::Target),
                       parse("0", map.target.env, VarFamily::Target),
                       parse("0", map.target.env, VarFamily::Target),
                       parse("sin(y1)^2", map.target.env, VarFamily::Target)};
  map.target.box.lo = {0.2, -3.0};
  map.target.box.hi = {2.9, 3.0};
  FieldEnv chart = env_with(3);
  map.components = {parse("1.5 + 0.4*x1 + 0.1*x2^2", chart),
                    parse("0.3*x3 - 0.2*x1*x2", chart)};
  data.map = std::move(map);
  data.alpha = 0.7;
  data.probes = generate_probes(data.geo.box, 0.0, 3, seed + 1);
  return data;
}

}  // namespace

TEST_CASE("phi-ricci reduces to ricci for a constant map") {
  GeometryData geo = geo_sphere(3);
  auto r = phi_ricci(geo, nullptr, 1.0, {1.0, 1.2, 0.8});
  auto c = curvature(geo, {1.0, 1.2, 0.8});
  CHECK((r.ric_phi - c.ric).max_abs() <= 1e-13);
  CHECK(r.s_phi == doctest::Approx(c.scalar));
}

TEST_CASE("phi-ricci of the unit 3-sphere identity structure") {
  GeometryData geo = geo_sphere(3);
  MapData map = sphere_identity(3);
  for (const auto& p : generate_probes(geo.box, 0.0, 4, 3)) {
    auto r = phi_ricci(geo, &map, 1.0, p);
    FrameInputs in{.geo = &geo};
    Frame f(std::move(in), p);
    TensorValue g = f.value(f.metric());
    CHECK((r.ric_phi - g).max_abs() <= 1e-11 * (1 + g.max_abs()));
    CHECK(r.s_phi == doctest::Approx(3.0).epsilon(1e-11));
    CHECK(r.traceless.max_abs() <= 1e-11);
  }
}

TEST_CASE("phi-ricci of a linear map on the flat plane") {
  const double c = 2.0;
  GeometryData geo = geo_euclidean(2);
  MapData map = map_to_flat_line(2, "c*x1", {{"c", c}});
  geo.env.constants["c"] = c;
  auto r = phi_ricci(geo, &map, 1.0, {0.3, 0.4});
  CHECK(r.ric_phi.at({0, 0}) == doctest::Approx(-c * c));
  CHECK(r.ric_phi.at({1, 1}) == doctest::Approx(0.0));
  CHECK(r.s_phi == doctest::Approx(-c * c));
}

TEST_CASE("harmonic-Einstein structures: parallel phi-Ricci, flat phi-Cotton, "
          "vanishing phi-Bach and J") {
  SolitonData data = sphere_identity_einstein(3, 1.0);
  REQUIRE(harmonic_einstein_residual(data) <= 1e-9);
  for (const auto& p : data.probes) {
    Frame f = make_frame(data, p);
    CHECK(f.norm(f.nabla_ric_phi()) <= 1e-9);
    CHECK(f.norm(f.c_phi()) <= 1e-9);
    CHECK(f.norm(f.f_phi()) <= 1e-9);
    CHECK(f.norm(f.b_phi()) <= 1e-8);
    CHECK(f.norm(f.j_field()) <= 1e-8);
  }
}

TEST_CASE("trace of the phi-Cotton tensor on the quadratic map") {
  GeometryData geo = geo_euclidean(3);
  MapData map = map_to_flat_line(3, "x1^2");
  const std::vector<double> p = {0.5, 0.2, -0.4};
  FrameInputs in{.geo = &geo, .map = &map, .alpha = 1.0};
  Frame f(std::move(in), p);
  // engine value of C^phi_jj1 against alpha tau^a phi^a_1 = 4 x1 = 2 at x1=0.5
  TensorValue c = f.value(f.c_phi());
  TensorValue giv = f.value(f.metric_inv());
  double lhs = 0.0;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) lhs += giv.at({j, k}) * c.at({j, k, 0});
  CHECK(lhs == doctest::Approx(2.0).epsilon(1e-10));
  TensorValue divt = f.value(f.div_stress());
  CHECK(divt.at({0}) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("phi-weyl of the unit 3-sphere identity structure") {
  GeometryData geo = geo_sphere(3);
  MapData map = sphere_identity(3);
  for (const auto& p : generate_probes(geo.box, 0.0, 3, 5)) {
    auto w = phi_weyl(geo, &map, 1.0, p);
    FrameInputs in{.geo = &geo};
    Frame f(std::move(in), p);
    TensorValue g = f.value(f.metric());
    TensorValue kng = kulkarni_nomizu(g, g);
    CHECK((w.w_phi - 0.25 * kng).max_abs() <= 1e-10 * (1 + kng.max_abs()));
    // trace identity: W^phi_kikj = alpha phi^a_i phi^a_j = g_ij here
    TensorValue giv = f.value(f.metric_inv());
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double tr = 0.0;
        for (int k = 0; k < 3; ++k)
          for (int t = 0; t < 3; ++t)
            tr += giv.at({k, t}) * w.w_phi.at({k, i, t, j});
        CHECK(tr == doctest::Approx(g.at({i, j})).epsilon(1e-10));
      }
  }
}

TEST_CASE("phi-weyl vanishes for the trivial structure on flat R^3") {
  GeometryData geo = geo_euclidean(3);
  auto w = phi_weyl(geo, nullptr, 1.0, {0.1, 0.2, 0.3});
  CHECK(w.w_phi.max_abs() <= 1e-13);
  CHECK(w.div_w_phi.max_abs() <= 1e-13);
}

TEST_CASE("phi-bach trace on the quadratic map is -4") {
  GeometryData geo = geo_euclidean(3);
  MapData map = map_to_flat_line(3, "x1^2");
  for (const auto& p : generate_probes(geo.box, 0.0, 4, 6)) {
    auto b = phi_bach(geo, &map, 1.0, p);
    CHECK(b.trace == doctest::Approx(-4.0).epsilon(1e-9));
    // (m-2) tr B = alpha (m-4)/(m-2) |tau|^2 with m = 3, |tau|^2 = 4
    CHECK(b.b_phi.at({0, 1}) == doctest::Approx(b.b_phi.at({1, 0})).epsilon(1e-9));
  }
}

TEST_CASE("universal identities hold on a generic perturbed input") {
  SolitonData data = generic_input(31);
  ResidualReport rep = run_checks(
      data,
      {"riemann-symmetries", "first-bianchi", "second-bianchi",
       "metric-compatibility", "comm-rule-gradient", "comm-rule-2tensor",
       "sff-symmetry", "generalized-schur", "trace-phi-cotton", "trace-phi-weyl",
       "div-phi-weyl", "trace-phi-bach", "phi-bach-symmetry", "f-phi-norm"},
      4);
  for (const auto& c : rep.checks) {
    CAPTURE(c.id);
    CAPTURE(c.max_residual);
    CHECK(c.status == CheckResult::Status::Pass);
  }
}

TEST_CASE("universal identities hold with a curved target") {
  SolitonData data = curved_target_input(17);
  ResidualReport rep = run_checks(
      data,
      {"sff-symmetry", "generalized-schur", "trace-phi-cotton", "trace-phi-weyl",
       "div-phi-weyl", "trace-phi-bach", "phi-bach-symmetry", "f-phi-norm"},
      4);
  for (const auto& c : rep.checks) {
    CAPTURE(c.id);
    CAPTURE(c.max_residual);
    CHECK(c.status == CheckResult::Status::Pass);
  }
}

TEST_CASE("D^phi and Y vanish for a constant potential") {
  GeometryData geo = geo_perturbed(3, 40);
  PotentialData pot;
  pot.f = parse("2", geo.env);
  auto d = d_phi_and_y(geo, nullptr, 1.0, pot, {0.1, 0.0, -0.2});
  CHECK(d.d_phi.max_abs() <= 1e-13);
  CHECK(d.y.max_abs() <= 1e-13);
  CHECK(d.d_norm2 <= 1e-13);
}

TEST_CASE("gaussian soliton: D^phi = 0 and the norm relation is trivial") {
  SolitonData data = gaussian_soliton(3, 1.0);
  for (const auto& p : data.probes) {
    auto d = d_phi_and_y(data.geo, nullptr, 1.0, data.potential, p);
    CHECK(d.d_phi.max_abs() <= 1e-12);
    CHECK(d.norm_relation_residual <= 1e-12);
  }
}

TEST_CASE("dimension gates") {
  GeometryData geo = geo_euclidean(2);
  CHECK_THROWS_AS(phi_weyl(geo, nullptr, 1.0, {0.0, 0.0}), Error);
  try {
    phi_bach(geo, nullptr, 1.0, {0.0, 0.0});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionTooLow);
  }
}
