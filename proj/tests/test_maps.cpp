#include "phicurv/maps.hpp"

#include <cmath>

#include "doctest.h"
#include "phicurv/frame.hpp"
#include "phicurv/probes.hpp"
#include "testutil.hpp"

using namespace phicurv;
using namespace testutil;

TEST_CASE("constant map carries no energy") {
  GeometryData geo = geo_sphere(2);
  MapData map = map_to_flat_line(2, "0");
  auto r = map_first_order(map, geo, {1.0, 1.2});
  CHECK(r.dphi.max_abs() <= 1e-15);
  CHECK(r.pullback_metric.max_abs() <= 1e-15);
  CHECK(r.energy_density == 0.0);
  CHECK(r.stress.max_abs() <= 1e-15);
  CHECK(r.div_stress.max_abs() <= 1e-15);
}

TEST_CASE("identity map of the unit 3-sphere") {
  GeometryData geo = geo_sphere(3);
  MapData map = sphere_identity(3);
  for (const auto& p : generate_probes(geo.box, 0.0, 4, 5)) {
    FrameInputs in{.geo = &geo, .map = &map};
    Frame f(std::move(in), p);
    TensorValue g = f.value(f.metric());
    TensorValue pb = f.value(f.pullback_metric());
    CHECK((pb - g).max_abs() <= 1e-12 * (1 + g.max_abs()));
    CHECK(f.energy_density().value() == doctest::Approx(3.0).epsilon(1e-12));
    TensorValue t = f.value(f.stress());
    CHECK((t + 0.5 * g).max_abs() <= 1e-12);
    // isometric identity: the connections coincide, nabla dphi = 0
    CHECK(f.value(f.second_ff()).max_abs() <= 1e-11);
    CHECK(f.norm(f.tension()) <= 1e-11);
    CHECK(f.norm(f.bitension()) <= 1e-9);
  }
}

TEST_CASE("linear map to the flat line") {
  const double c = 1.7;
  GeometryData geo = geo_euclidean(2);
  geo.env.constants["c"] = c;
  MapData map = map_to_flat_line(2, "c*x1", {{"c", c}});
  auto r = map_first_order(map, geo, {0.4, -0.9});
  CHECK(r.stress.at({0, 0}) == doctest::Approx(c * c / 2));
  CHECK(r.stress.at({1, 1}) == doctest::Approx(-c * c / 2));
  CHECK(r.stress.at({0, 1}) == doctest::Approx(0.0));
  CHECK(r.div_stress.max_abs() <= 1e-14);
  TensorValue tau = tension(map, geo, {0.4, -0.9});
  CHECK(tau.max_abs() <= 1e-14);
}

TEST_CASE("tension of x1^2 on flat R^3 is the laplacian") {
  GeometryData geo = geo_euclidean(3);
  MapData map = map_to_flat_line(3, "x1^2");
  TensorValue tau = tension(map, geo, {0.5, 0.1, -0.2});
  CHECK(tau.at({0}) == doctest::Approx(2.0).epsilon(1e-13));
  // bi-harmonic: Delta(Delta phi) = 0 for a quadratic into a flat target
  TensorValue t2 = bitension(map, geo, {0.5, 0.1, -0.2});
  CHECK(t2.max_abs() <= 1e-11);
}

TEST_CASE("bitension of x1^4 on flat R^2 is the bi-laplacian") {
  GeometryData geo = geo_euclidean(2);
  MapData map = map_to_flat_line(2, "x1^4");
  TensorValue t2 = bitension(map, geo, {0.3, 0.8});
  CHECK(t2.at({0}) == doctest::Approx(24.0).epsilon(1e-11));
}

TEST_CASE("pullback connection against the target christoffels") {
  // Affine chart map R^2 -> S^2: the second fundamental tensor reduces to the
  // target Christoffels evaluated along the map.
  GeometryData geo = geo_euclidean(2);
  geo.box = cube(2, 0.6, 2.4);
  MapData map;
  map.target.dim = 2;
  map.target.family = VarFamily::Target;
  map.target.env.target_dim = 2;
  map.target.metric = {parse("1", map.target.env, VarFamily::Target),
                       parse("0", map.target.env, VarFamily::Target),
                       parse("0", map.target.env, VarFamily::Target),
                       parse("sin(y1)^2", map.target.env, VarFamily::Target)};
  map.target.metric = {map.target.metric[0], map.target.metric[1],
                       map.target.metric[2], map.target.metric[3]};
  map.target.box.lo = {0.3, 0.3};
  map.target.box.hi = {2.8, 5.9};
  FieldEnv chart = env_with(2);
  map.components = {parse("x1", chart), parse("x2", chart)};

  GeometryData target_sphere = geo_sphere(2);
  for (const auto& p : generate_probes(geo.box, 0.0, 4, 6)) {
    FrameInputs in{.geo = &geo, .map = &map};
    Frame f(std::move(in), p);
    TensorValue sff = f.value(f.second_ff());
    TensorValue ngamma = christoffel(target_sphere, p);
    for (int a = 0; a < 2; ++a)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          CHECK(sff.at({a, i, j}) ==
                doctest::Approx(ngamma.at({a, i, j})).epsilon(1e-11));
    // tension oracle: tau = (-sin(x1)cos(x1), 0)
    TensorValue tau = f.value(f.tension());
    CHECK(tau.at({0}) == doctest::Approx(-std::sin(p[0]) * std::cos(p[0]))
                             .epsilon(1e-11));
    CHECK(tau.at({1}) == doctest::Approx(0.0).epsilon(1e-11));
  }
}

TEST_CASE("second fundamental tensor is symmetric on a curved pair") {
  GeometryData geo = geo_perturbed(3, 21);
  MapData map = sphere_identity(3);
  // shrink the box so phi stays in the target chart
  geo.box.lo = {0.5, 0.5, 0.5};
  geo.box.hi = {2.2, 2.2, 2.2};
  for (const auto& p : generate_probes(geo.box, 0.0, 3, 8)) {
    FrameInputs in{.geo = &geo, .map = &map};
    Frame f(std::move(in), p);
    TensorValue s = f.value(f.second_ff());
    double worst = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          worst = std::max(worst, std::abs(s.at({a, i, j}) - s.at({a, j, i})));
    CHECK(worst <= 1e-10 * (1 + s.max_abs()));
  }
}

TEST_CASE("harmonic maps are conservative") {
  GeometryData geo = geo_euclidean(2);
  MapData map = map_to_flat_line(2, "x1^2 - x2^2");  // harmonic
  for (const auto& p : generate_probes(geo.box, 0.0, 4, 2)) {
    FrameInputs in{.geo = &geo, .map = &map};
    Frame f(std::move(in), p);
    CHECK(f.norm(f.tension()) <= 1e-10);
    CHECK(f.norm(f.div_stress()) <= 1e-8);
  }
}

TEST_CASE("maps leaving the target chart are an error") {
  GeometryData geo = geo_euclidean(2);
  MapData map = map_to_flat_line(2, "x1");
  map.target.box.lo = {-0.5};
  map.target.box.hi = {0.5};
  FrameInputs in{.geo = &geo, .map = &map};
  Frame f(std::move(in), {1.5, 0.0});
  CHECK_THROWS_AS((void)f.map_point(), Error);
  try {
    FrameInputs in2{.geo = &geo, .map = &map};
    Frame f2(std::move(in2), {1.5, 0.0});
    (void)f2.pullback_metric();
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TargetChartExit);
  }
}
