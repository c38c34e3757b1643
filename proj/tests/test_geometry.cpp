#include "phicurv/geometry.hpp"

#include <cmath>

#include "doctest.h"
#include "phicurv/frame.hpp"
#include "phicurv/probes.hpp"
#include "testutil.hpp"

using namespace phicurv;
using namespace testutil;

namespace {

Frame plain_frame(const GeometryData& geo, const std::vector<double>& p,
                  int order = 4) {
  FrameInputs in;
  in.geo = &geo;
  in.ctx.order = order;
  return Frame(std::move(in), p);
}

}  // namespace

TEST_CASE("christoffel symbols: euclidean, sphere, conformal") {
  GeometryData e3 = geo_euclidean(3);
  TensorValue flat = christoffel(e3, {0.3, -0.7, 1.1});
  CHECK(flat.max_abs() <= 1e-14);

  GeometryData s2 = geo_sphere(2);
  TensorValue gamma = christoffel(s2, {M_PI / 4.0, 0.5});
  CHECK(gamma.at({0, 1, 1}) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(gamma.at({1, 0, 1}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gamma.at({1, 1, 0}) == doctest::Approx(1.0).epsilon(1e-12));

  GeometryData conf = geo_conformal();
  TensorValue cg = christoffel(conf, {0.0, 0.0});
  CHECK(cg.at({0, 0, 0}) == doctest::Approx(1.0));
  CHECK(cg.at({0, 1, 1}) == doctest::Approx(-1.0));
  CHECK(cg.at({1, 0, 1}) == doctest::Approx(1.0));
  CHECK(cg.at({0, 0, 1}) == doctest::Approx(0.0));
}

TEST_CASE("metric must be positive definite") {
  GeometryData bad = geo_from(2, {"1", "0", "-1"}, cube(2));
  CHECK_THROWS_AS(christoffel(bad, {0.0, 0.0}), Error);
  try {
    christoffel(bad, {0.0, 0.0});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MetricNotPositiveDefinite);
  }
}

TEST_CASE("curvature of the unit spheres and flat space") {
  GeometryData e4 = geo_euclidean(4);
  auto flat = curvature(e4, {0.1, 0.2, -0.3, 0.4});
  CHECK(flat.riem.max_abs() <= 1e-13);
  CHECK(flat.ric.max_abs() <= 1e-13);
  CHECK(flat.scalar == doctest::Approx(0.0).epsilon(1e-13));

  GeometryData s2 = geo_sphere(2);
  auto c2 = curvature(s2, {M_PI / 4.0, 0.5});
  CHECK(c2.ric.at({0, 0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c2.ric.at({1, 1}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c2.scalar == doctest::Approx(2.0).epsilon(1e-12));

  GeometryData s3 = geo_sphere(3);
  for (const auto& p : generate_probes(s3.box, 0.0, 4, 3)) {
    auto c3 = curvature(s3, p);
    Frame f = plain_frame(s3, p);
    TensorValue g = f.value(f.metric());
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            const double expect =
                g.at({i, k}) * g.at({j, l}) - g.at({i, l}) * g.at({j, k});
            CHECK(c3.riem.at({i, j, k, l}) ==
                  doctest::Approx(expect).epsilon(1e-10));
          }
    CHECK(c3.scalar == doctest::Approx(6.0).epsilon(1e-11));
  }
}

TEST_CASE("engine curvature matches every closed-form oracle") {
  for (const GeometryData& geo :
       {geo_euclidean(3), geo_sphere(2), geo_sphere(3), geo_conformal()}) {
    for (const auto& p : generate_probes(geo.box, 0.0, 8, 7)) {
      OracleCurvature oracle = oracle_curvature(geo, p);
      TensorValue gamma = christoffel(geo, p);
      auto curv = curvature(geo, p);
      CHECK((gamma - oracle.gamma).max_abs() <= 1e-10 * (1 + oracle.gamma.max_abs()));
      CHECK((curv.riem - oracle.riem).max_abs() <= 1e-10 * (1 + oracle.riem.max_abs()));
      CHECK((curv.ric - oracle.ric).max_abs() <= 1e-10 * (1 + oracle.ric.max_abs()));
      CHECK(std::abs(curv.scalar - oracle.scalar) <= 1e-10 * (1 + std::abs(oracle.scalar)));
    }
  }
}

TEST_CASE("riemann symmetries and bianchi identities on random metrics") {
  for (unsigned seed : {11u, 12u, 13u}) {
    GeometryData geo = geo_perturbed(3, seed);
    for (const auto& p : generate_probes(geo.box, 0.0, 3, seed)) {
      Frame f = plain_frame(geo, p);
      TensorValue r = f.value(f.riemann());
      const double scale = 1.0 + f.norm(f.riemann());
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k)
            for (int t = 0; t < 3; ++t) {
              CHECK(std::abs(r.at({i, j, k, t}) + r.at({j, i, k, t})) <= 1e-9 * scale);
              CHECK(std::abs(r.at({i, j, k, t}) + r.at({i, j, t, k})) <= 1e-9 * scale);
              CHECK(std::abs(r.at({i, j, k, t}) - r.at({k, t, i, j})) <= 1e-9 * scale);
              CHECK(std::abs(r.at({i, j, k, t}) + r.at({i, k, t, j}) +
                             r.at({i, t, j, k})) <= 1e-9 * scale);
            }
      // second Bianchi
      TensorValue nr = f.value(f.nabla_riemann());
      const double nscale = 1.0 + f.norm(f.nabla_riemann());
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k)
            for (int t = 0; t < 3; ++t)
              for (int l = 0; l < 3; ++l)
                CHECK(std::abs(nr.at({i, j, k, t, l}) + nr.at({i, j, t, l, k}) +
                               nr.at({i, j, l, k, t})) <= 1e-9 * nscale);
    }
  }
}

TEST_CASE("covariant derivative of the metric vanishes") {
  for (const GeometryData& geo :
       {geo_sphere(3), geo_conformal(), geo_perturbed(3, 5)}) {
    for (const auto& p : generate_probes(geo.box, 0.0, 4, 2)) {
      Frame f = plain_frame(geo, p);
      JetField ng = f.nabla(f.metric());
      CHECK(f.value(ng).max_abs() <= 1e-10);
    }
  }
}

TEST_CASE("third-derivative commutation rule on the conformal metric") {
  GeometryData geo = geo_conformal();
  PotentialData pot;
  pot.f = parse("x1^2*x2", geo.env);
  for (const auto& p : generate_probes(geo.box, 0.0, 4, 9)) {
    FrameInputs in;
    in.geo = &geo;
    in.potential = &pot;
    in.ctx.order = 4;
    Frame f(std::move(in), p);
    TensorValue d3 = f.value(f.nabla(f.hess_f()));
    TensorValue dfu = f.value(f.raise(f.grad_f(), 0));
    TensorValue r = f.value(f.riemann());
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          double v = d3.at({i, j, k}) - d3.at({i, k, j});
          for (int t = 0; t < 2; ++t) v -= dfu.at({t}) * r.at({t, i, j, k});
          CHECK(std::abs(v) <= 1e-9 * (1 + d3.max_abs()));
        }
  }
}

TEST_CASE("hessian and laplacians of the gaussian potential") {
  const int m = 3;
  const double lambda = 0.7;
  GeometryData geo = geo_euclidean(m);
  geo.env.constants["lambda"] = lambda;
  PotentialData pot;
  pot.f = parse("lambda/2*(x1^2 + x2^2 + x3^2)", geo.env);
  auto res = hessian_and_laplacians(geo, pot, {1.0, 0.0, 0.0}, pot.f);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      CHECK(res.hess_f.at({i, j}) ==
            doctest::Approx(i == j ? lambda : 0.0).epsilon(1e-13));
  CHECK(res.lap_f == doctest::Approx(m * lambda));
  // Delta_f f = m lambda - lambda^2 |x|^2 at (1,0,0)
  REQUIRE(res.lap_f_u.has_value());
  CHECK(*res.lap_f_u == doctest::Approx(m * lambda - lambda * lambda));
}

TEST_CASE("hessian of an affine potential vanishes on a flat product") {
  GeometryData geo = geo_euclidean(3);
  geo.env.constants["b"] = 3.0;
  geo.env.constants["c"] = 1.0;
  PotentialData pot;
  pot.f = parse("b*x3 + c", geo.env);
  auto res = hessian_and_laplacians(geo, pot, {0.4, -0.2, 0.9});
  CHECK(res.hess_f.max_abs() <= 1e-13);
  CHECK(res.lap_f == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("lie derivative of the metric") {
  GeometryData geo = geo_euclidean(2);
  FieldEnv& env = geo.env;
  // rotation field: Killing
  TensorValue rot = lie_derivative_metric(
      geo, {parse("-x2", env), parse("x1", env)}, {0.7, -0.4});
  CHECK(rot.max_abs() <= 1e-13);
  // gradient of lambda/2 |x|^2: L_X g / 2 = lambda g
  env.constants["lambda"] = 0.9;
  TensorValue grad = lie_derivative_metric(
      geo, {parse("lambda*x1", env), parse("lambda*x2", env)}, {0.3, 0.5});
  CHECK(grad.at({0, 0}) == doctest::Approx(1.8));
  CHECK(grad.at({1, 1}) == doctest::Approx(1.8));
  CHECK(grad.at({0, 1}) == doctest::Approx(0.0));
  // dilation along x1
  TensorValue dil = lie_derivative_metric(
      geo, {parse("x1", env), parse("0", env)}, {0.2, 0.1});
  CHECK(dil.at({0, 0}) == doctest::Approx(2.0));
  CHECK(dil.at({1, 1}) == doctest::Approx(0.0));
}

TEST_CASE("kulkarni-nomizu product") {
  TensorValue delta;
  delta.sig = {Slot::Cov, Slot::Cov};
  delta.m = 2;
  delta.comp = {1.0, 0.0, 0.0, 1.0};
  TensorValue kn = kulkarni_nomizu(delta, delta);
  CHECK(kn.at({0, 1, 0, 1}) == doctest::Approx(2.0));

  // Riem(unit S^3) = (g KN g)/2 pointwise
  GeometryData s3 = geo_sphere(3);
  for (const auto& p : generate_probes(s3.box, 0.0, 3, 4)) {
    Frame f = plain_frame(s3, p);
    TensorValue g = f.value(f.metric());
    TensorValue riem = f.value(f.riemann());
    TensorValue kng = kulkarni_nomizu(g, g);
    CHECK((riem - 0.5 * kng).max_abs() <= 1e-10 * (1 + riem.max_abs()));
  }

  // commutativity on random symmetric tensors
  TensorValue a = delta, b = delta;
  a.comp = {1.5, 0.3, 0.3, -0.7};
  b.comp = {0.2, -1.1, -1.1, 0.9};
  TensorValue ab = kulkarni_nomizu(a, b);
  TensorValue ba = kulkarni_nomizu(b, a);
  CHECK((ab - ba).max_abs() <= 1e-14);
}

TEST_CASE("traceless part") {
  GeometryData geo = geo_euclidean(2);
  Frame f = plain_frame(geo, {0.0, 0.0});
  TensorValue g = f.value(f.metric());
  CHECK(traceless_part(g, geo, {0.0, 0.0}).max_abs() <= 1e-14);
  TensorValue a = g;
  a.comp = {2.0, 0.0, 0.0, 0.0};
  TensorValue ta = traceless_part(a, geo, {0.0, 0.0});
  CHECK(ta.at({0, 0}) == doctest::Approx(1.0));
  CHECK(ta.at({1, 1}) == doctest::Approx(-1.0));
}

TEST_CASE("scalar outputs agree across charts of the unit sphere") {
  GeometryData sph = geo_sphere(2);
  GeometryData stereo =
      geo_from(2, {"4/(1+x1^2+x2^2)^2", "0", "4/(1+x1^2+x2^2)^2"}, cube(2, -3.0, 3.0));
  PotentialData height_sph, height_stereo;
  height_sph.f = parse("cos(x1)", sph.env);
  height_stereo.f =
      parse("(x1^2+x2^2-1)/(x1^2+x2^2+1)", stereo.env);

  for (const auto& p : generate_probes(sph.box, 0.0, 5, 11)) {
    const double theta = p[0], phi = p[1];
    const double rho = std::cos(theta / 2.0) / std::sin(theta / 2.0);
    const std::vector<double> q = {rho * std::cos(phi), rho * std::sin(phi)};

    auto c1 = curvature(sph, p);
    auto c2 = curvature(stereo, q);
    CHECK(c1.scalar == doctest::Approx(c2.scalar).epsilon(1e-8));

    FrameInputs in1{.geo = &sph, .potential = &height_sph};
    FrameInputs in2{.geo = &stereo, .potential = &height_stereo};
    Frame f1(std::move(in1), p);
    Frame f2(std::move(in2), q);
    const double riem1 = f1.norm2(f1.riemann());
    const double riem2 = f2.norm2(f2.riemann());
    CHECK(riem1 == doctest::Approx(riem2).epsilon(1e-8));
    CHECK(riem1 == doctest::Approx(4.0).epsilon(1e-9));

    const double lap1 = f1.trace_chart(f1.hess_f(), 0, 1).c[0].value();
    const double lap2 = f2.trace_chart(f2.hess_f(), 0, 1).c[0].value();
    CHECK(lap1 == doctest::Approx(lap2).epsilon(1e-8));
    CHECK(lap1 == doctest::Approx(-2.0 * std::cos(theta)).epsilon(1e-8));
  }
}

TEST_CASE("insufficient jet order is reported") {
  GeometryData geo = geo_sphere(2);
  Frame f = plain_frame(geo, {1.0, 1.0}, 2);
  // Riemann consumes both derivative orders; one more nabla must throw.
  CHECK_THROWS_AS((void)f.nabla(f.riemann()), Error);
}

TEST_CASE("repeated covariant derivatives through the public wrapper") {
  GeometryData geo = geo_sphere(2);
  Frame f = plain_frame(geo, {1.1, 0.9});
  // depth 1 on the metric vanishes; depth beyond the trusted order throws
  CHECK(covariant_derivative(f, f.metric(), 1).max_abs() <= 1e-12);
  CHECK(covariant_derivative(f, f.metric(), 3).max_abs() <= 1e-9);
  CHECK_THROWS_AS(covariant_derivative(f, f.riemann(), 3), Error);
}
