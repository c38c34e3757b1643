#include "phicurv/solitons.hpp"

#include <cmath>

#include "doctest.h"
#include "phicurv/ansatz.hpp"
#include "phicurv/catalog.hpp"
#include "phicurv/probes.hpp"
#include "testutil.hpp"

using namespace phicurv;
using namespace testutil;

namespace {

SolitonData rigid_s3xr2() {
  RigidModelSpec spec;
  spec.einstein_factor = sphere_identity_einstein(3, 1.0);  // lambda = 1
  spec.k = 2;
  spec.b = {0.0, 0.0};
  spec.c = 0.0;
  return build_rigid_model(spec);
}

SolitonData steady_r2xr1(double b = 3.0, double c = 1.0) {
  RigidModelSpec spec;
  SolitonData flat;
  flat.geo = geo_euclidean(2);
  flat.alpha = 1.0;
  flat.lambda = 0.0;
  flat.probes = generate_probes(flat.geo.box, 0.0, 4, 1);
  spec.einstein_factor = std::move(flat);
  spec.k = 1;
  spec.b = {b};
  spec.c = c;
  return build_rigid_model(spec);
}

}  // namespace

TEST_CASE("gaussian soliton satisfies the defining equations") {
  SolitonData data = gaussian_soliton(3, 1.0);
  ResidualReport rep = soliton_residual(data);
  REQUIRE(rep.checks.size() == 2);
  for (const auto& c : rep.checks) {
    CHECK(c.status == CheckResult::Status::Pass);
    CHECK(c.max_residual <= 1e-10);
  }
}

TEST_CASE("rigid model S^3 x R^2 passes the soliton residual") {
  SolitonData data = rigid_s3xr2();
  CHECK(data.geo.dim == 5);
  CHECK(structure_residual(data) <= 1e-9);
  REQUIRE(data.rigid.has_value());
  CHECK(data.rigid->l_dim == 3);
  CHECK(data.rigid->k == 2);
}

TEST_CASE("perturbed potential fails loudly") {
  SolitonData data = gaussian_soliton(3, 1.0);
  data.potential.f =
      parse("lambda/2*(x1^2+x2^2+x3^2) + 0.1*x1^3", data.geo.env);
  ResidualReport rep = soliton_residual(data);
  const CheckResult* h1 = rep.find("soliton-h1");
  REQUIRE(h1 != nullptr);
  CHECK(h1->status == CheckResult::Status::Fail);
  // Hess of the cubic adds 0.6 x1 in the (1,1) slot.
  bool saw_expected_magnitude = false;
  for (std::size_t i = 0; i < data.probes.size(); ++i) {
    const double expect = 0.6 * std::abs(data.probes[i][0]);
    // raw residual is >= the (1,1) entry; the report carries the scaled one
    if (h1->residuals[i] > 0.05 * expect) saw_expected_magnitude = true;
  }
  CHECK(saw_expected_magnitude);
}

TEST_CASE("rigid model quantitative closed forms") {
  SolitonData data = rigid_s3xr2();
  for (const auto& p : data.probes) {
    Frame f = make_frame(data, p);
    // nabla Ric^phi = 0
    CHECK(f.norm(f.nabla_ric_phi()) <= 1e-9);
    // B-bar = 1/36 (2 pi* g_L - 3 pi* g_can): L block 1/18 g_L, flat -1/12
    TensorValue b = f.value(f.b_phi());
    TensorValue g = f.value(f.metric());
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        double expect = 0.0;
        if (i < 3 && j < 3) expect = g.at({i, j}) / 18.0;
        if (i >= 3 && j >= 3) expect = -(i == j ? 1.0 : 0.0) / 12.0;
        CHECK(b.at({i, j}) == doctest::Approx(expect).epsilon(1e-8));
      }
    const double trace = f.trace_chart(f.b_phi(), 0, 1).c[0].value();
    CHECK(std::abs(trace) <= 1e-9);
    CHECK(f.norm(f.j_field()) <= 1e-9);
  }
}

TEST_CASE("degenerate product k = 0 returns the factor with constant potential") {
  RigidModelSpec spec;
  spec.einstein_factor = sphere_identity_einstein(3, 1.0);
  spec.k = 0;
  spec.c = 2.5;
  SolitonData data = build_rigid_model(spec);
  CHECK(data.geo.dim == 3);
  CHECK(structure_residual(data) <= 1e-9);
  CHECK(is_coordinate_free(*data.potential.f));
}

TEST_CASE("steady rigid model R^2 x R") {
  SolitonData data = steady_r2xr1();
  CHECK(data.geo.dim == 3);
  CHECK(data.lambda == 0.0);
  CHECK(structure_residual(data) <= 1e-10);
  // f = 3 t + 1 on the flat factor
  Frame f = make_frame(data, data.probes.front());
  CHECK(f.f().value() ==
        doctest::Approx(3.0 * data.probes.front()[2] + 1.0).epsilon(1e-12));
}

TEST_CASE("a non-harmonic-Einstein factor is rejected") {
  RigidModelSpec spec;
  spec.einstein_factor = gaussian_soliton(3, 1.0);  // soliton, not Einstein
  spec.einstein_factor.lambda = 1.0;
  spec.k = 1;
  spec.b = {0.0};
  CHECK_THROWS_AS(build_rigid_model(spec), Error);
  try {
    build_rigid_model(spec);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotHarmonicEinstein);
  }
}

TEST_CASE("the seven soliton formulas hold on the gallery") {
  for (SolitonData data :
       {gaussian_soliton(3, 1.0), rigid_s3xr2(), steady_r2xr1()}) {
    ResidualReport rep = check_soliton_formulas(data);
    REQUIRE(rep.checks.size() == 7);
    for (const auto& c : rep.checks) {
      CAPTURE(c.id);
      CAPTURE(c.max_residual);
      CHECK(c.status == CheckResult::Status::Pass);
    }
  }
}

TEST_CASE("every gallery rigid-model spec round-trips") {
  // build_rigid_model output must pass the soliton residual and the
  // classifier must recover the flat factor dimension exactly.
  struct GallerySpec {
    SolitonData factor;
    int k;
    std::vector<double> b;
    double c;
  };
  std::vector<GallerySpec> specs;
  specs.push_back({sphere_identity_einstein(3, 1.0), 2, {0.0, 0.0}, 0.0});
  specs.push_back({sphere_identity_einstein(3, 1.0), 1, {0.7}, -2.0});
  specs.push_back({sphere_identity_einstein(3, 0.5), 2, {0.3, -0.4}, 1.0});
  {
    SolitonData flat;
    flat.geo = geo_euclidean(2);
    flat.alpha = 1.0;
    flat.lambda = 0.0;
    flat.probes = generate_probes(flat.geo.box, 0.0, 4, 1);
    specs.push_back({flat, 1, {3.0}, 1.0});
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    CAPTURE(i);
    RigidModelSpec spec;
    spec.einstein_factor = specs[i].factor;
    spec.k = specs[i].k;
    spec.b = specs[i].b;
    spec.c = specs[i].c;
    SolitonData model = build_rigid_model(spec);
    CHECK(structure_residual(model) <= 1e-9);
    RigidityReport r = rigidity_classify(model);
    CHECK(r.status == RigidityReport::Status::RigidConsistent);
    CHECK(r.inferred_k == (model.lambda != 0.0 ? spec.k : 1));
    ResidualReport formulas = check_soliton_formulas(model);
    for (const auto& c : formulas.checks) {
      CAPTURE(c.id);
      CHECK(c.status == CheckResult::Status::Pass);
    }
  }
}

TEST_CASE("soliton formulas refuse non-soliton input") {
  SolitonData data = gaussian_soliton(3, 1.0);
  data.potential.f = parse("x1^3", data.geo.env);
  CHECK_THROWS_AS(check_soliton_formulas(data), Error);
}

TEST_CASE("hamilton identity values") {
  SolitonData gauss = gaussian_soliton(3, 1.0);
  ConstancyResult r = hamilton_identity(gauss);
  CHECK(r.pass);
  CHECK(r.spread <= 1e-12);
  for (double v : r.values) CHECK(std::abs(v) <= 1e-12);

  // additive shift of the potential shifts the constant by -2 lambda c
  SolitonData shifted = gaussian_soliton(3, 1.0);
  shifted.geo.env.constants["c"] = 5.0;
  shifted.potential.f =
      parse("lambda/2*(x1^2+x2^2+x3^2) + c", shifted.geo.env);
  ConstancyResult rs = hamilton_identity(shifted);
  CHECK(rs.pass);
  for (double v : rs.values) CHECK(v == doctest::Approx(-10.0).epsilon(1e-12));

  SolitonData rigid = rigid_s3xr2();
  ConstancyResult rr = hamilton_identity(rigid);
  CHECK(rr.pass);
  for (double v : rr.values) CHECK(v == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("muller-perelman constancy") {
  SolitonData gauss = gaussian_soliton(3, 1.0);
  ConstancyResult r = muller_perelman_check(gauss);
  CHECK(r.pass);
  for (double v : r.values) CHECK(v == doctest::Approx(6.0).epsilon(1e-10));

  // f = 0 on a harmonic-Einstein chart: value = S^phi, constant
  SolitonData he = sphere_identity_einstein(3, 1.0);
  ConstancyResult rh = muller_perelman_check(he, parse("0", he.geo.env));
  CHECK(rh.pass);
  for (double v : rh.values) CHECK(v == doctest::Approx(3.0).epsilon(1e-9));

  // a cubic candidate breaks constancy
  SolitonData bad = gaussian_soliton(3, 1.0);
  ConstancyResult rb = muller_perelman_check(bad, parse("x1^3", bad.geo.env));
  CHECK(!rb.pass);
}

TEST_CASE("vertical killing fields") {
  GeometryData geo = geo_euclidean(2);
  MapData radial = map_to_flat_line(2, "x1^2 + x2^2");
  auto probes = generate_probes(geo.box, 0.0, 5, 3);
  // rotation preserves the radius
  ResidualReport pass_rep = vertical_killing_check(
      geo, &radial, {parse("-x2", geo.env), parse("x1", geo.env)}, probes);
  CHECK(pass_rep.all_passed());
  // translation moves x1
  MapData linear = map_to_flat_line(2, "x1");
  ResidualReport fail_rep = vertical_killing_check(
      geo, &linear, {parse("1", geo.env), parse("0", geo.env)}, probes);
  const CheckResult* vert = fail_rep.find("vertical-killing-dphi");
  REQUIRE(vert != nullptr);
  CHECK(vert->status == CheckResult::Status::Fail);
  CHECK(vert->max_residual >= 0.4);  // raw residual 1.0, scaled by 1 + |dphi||X|
  // the zero field passes trivially
  ResidualReport zero_rep = vertical_killing_check(
      geo, &linear, {parse("0", geo.env), parse("0", geo.env)}, probes);
  CHECK(zero_rep.all_passed());
}

TEST_CASE("rigidity classifier on the gallery") {
  SolitonData rigid = rigid_s3xr2();
  RigidityReport r = rigidity_classify(rigid);
  CHECK(r.status == RigidityReport::Status::RigidConsistent);
  CHECK(r.inferred_k == 2);
  CHECK(r.nabla_ric_phi_norm <= 1e-9);
  for (const auto& eig : r.eigenvalues) {
    REQUIRE(eig.size() == 5);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(eig[i]) <= 1e-6);
    for (int i = 3; i < 5; ++i) CHECK(std::abs(eig[i] - 1.0) <= 1e-6);
  }

  SolitonData gauss = gaussian_soliton(3, 0.8);
  RigidityReport rg = rigidity_classify(gauss);
  CHECK(rg.status == RigidityReport::Status::RigidConsistent);
  CHECK(rg.inferred_k == 3);

  SolitonData steady = steady_r2xr1();
  RigidityReport rs = rigidity_classify(steady);
  CHECK(rs.status == RigidityReport::Status::RigidConsistent);
  CHECK(rs.steady_branch);
  CHECK(rs.inferred_k == 1);

  SolitonData bad = gaussian_soliton(3, 1.0);
  bad.potential.f = parse("lambda/2*(x1^2+x2^2+x3^2) + 0.1*x1^3", bad.geo.env);
  RigidityReport rb = rigidity_classify(bad);
  CHECK(rb.status == RigidityReport::Status::NotASoliton);
}

TEST_CASE("x-laplacian identity for S^phi") {
  // harmonic-Einstein with X = 0
  SolitonData he = sphere_identity_einstein(3, 1.0);
  he.potential.X = {parse("0", he.geo.env), parse("0", he.geo.env),
                    parse("0", he.geo.env)};
  XLaplacianResult r = x_laplacian_sphi_check(he);
  CHECK(r.pass);

  // gradient case specialization
  SolitonData gauss = gaussian_soliton(3, 1.0);
  XLaplacianResult rg = x_laplacian_sphi_check(gauss);
  CHECK(rg.pass);

  // rigid model in X-form: X = grad f = (0, 0, 0, x4, x5)
  SolitonData rigid = rigid_s3xr2();
  rigid.potential.f = nullptr;
  rigid.potential.X = {parse("0", rigid.geo.env), parse("0", rigid.geo.env),
                       parse("0", rigid.geo.env), parse("x4", rigid.geo.env),
                       parse("x5", rigid.geo.env)};
  XLaplacianResult rr = x_laplacian_sphi_check(rigid);
  CHECK(rr.pass);
}

TEST_CASE("x-laplacian identity with a non-constant lambda") {
  // Conformal field of the unit 2-sphere: X = grad(cos theta) satisfies
  // Ric + L_X g / 2 = (1 - cos theta) g with a genuinely non-constant lambda,
  // so the (m-1) Delta lambda term must participate.
  SolitonData data;
  data.geo = geo_sphere(2);
  data.alpha = 1.0;
  data.potential.X = {parse("-sin(x1)", data.geo.env), parse("0", data.geo.env)};
  data.lambda_field = parse("1 - cos(x1)", data.geo.env);
  data.probes = generate_probes(data.geo.box, 0.0, 6, 2);
  CHECK(structure_residual(data) <= 1e-9);
  XLaplacianResult r = x_laplacian_sphi_check(data);
  CHECK(r.pass);
}

TEST_CASE("ansatz: scaled sphere family recovers r = 2") {
  AnsatzFamily family;
  family.data.geo = geo_sphere(3);
  family.data.geo.env.parameters.insert("r");
  // metric components r^2 * (round unit sphere)
  family.data.geo.metric[0 * 3 + 0] = parse("r^2", family.data.geo.env);
  family.data.geo.metric[1 * 3 + 1] =
      parse("r^2*sin(x1)^2", family.data.geo.env);
  family.data.geo.metric[2 * 3 + 2] =
      parse("r^2*sin(x1)^2*sin(x2)^2", family.data.geo.env);
  family.data.geo.oracle.reset();
  family.data.map = sphere_identity(3);
  family.data.alpha = 1.0;
  family.data.lambda = 0.25;
  family.data.probes = generate_probes(family.data.geo.box, 0.0, 4, 1);
  family.parameters = {"r"};
  family.lower = {0.8};
  family.upper = {3.4};

  AnsatzResult res = ansatz_solve(family);
  CHECK(res.converged);
  CHECK(res.iterations <= 25);
  CHECK(res.theta[0] == doctest::Approx(2.0).epsilon(1e-6));

  // uniform probe weights do not move the argmin
  AnsatzOptions heavy;
  heavy.weight = 2.0;
  AnsatzResult res2 = ansatz_solve(family, heavy);
  CHECK(std::abs(res2.theta[0] - res.theta[0]) <= 1e-9);
}

TEST_CASE("ansatz: flat family collapses to the constant map") {
  AnsatzFamily family;
  family.data.geo = geo_euclidean(3);
  family.data.geo.env.parameters.insert("c");
  FieldEnv chart = env_with(3);
  chart.parameters.insert("c");
  MapData map = map_to_flat_line(3, "0");
  map.components = {parse("c*x1", chart)};
  family.data.map = std::move(map);
  family.data.alpha = 1.0;
  family.data.lambda = 0.0;
  family.data.probes = generate_probes(family.data.geo.box, 0.0, 4, 1);
  family.parameters = {"c"};
  family.lower = {-0.5};
  family.upper = {1.5};
  AnsatzResult res = ansatz_solve(family);
  CHECK(res.converged);
  CHECK(std::abs(res.theta[0]) <= 5e-3);
  CHECK(res.residual <= 1e-10);
}

TEST_CASE("ansatz: unit radius recovered for lambda = m - 1 - alpha") {
  AnsatzFamily family;
  family.data.geo = geo_sphere(3);
  family.data.geo.env.parameters.insert("r");
  family.data.geo.metric[0] = parse("r^2", family.data.geo.env);
  family.data.geo.metric[4] = parse("r^2*sin(x1)^2", family.data.geo.env);
  family.data.geo.metric[8] =
      parse("r^2*sin(x1)^2*sin(x2)^2", family.data.geo.env);
  family.data.geo.oracle.reset();
  family.data.map = sphere_identity(3);
  family.data.alpha = 0.5;
  family.data.lambda = 1.5;
  family.data.probes = generate_probes(family.data.geo.box, 0.0, 4, 1);
  family.parameters = {"r"};
  family.lower = {0.6};
  family.upper = {1.9};
  AnsatzResult res = ansatz_solve(family);
  CHECK(res.converged);
  CHECK(res.theta[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("best-fit lambda diagnostic") {
  SolitonData gauss = gaussian_soliton(3, 0.8);
  CHECK(best_fit_lambda(gauss) == doctest::Approx(0.8).epsilon(1e-12));
  // the diagnostic tracks a wrong declared constant
  SolitonData off = gaussian_soliton(3, 0.8);
  off.lambda = 0.3;
  CHECK(best_fit_lambda(off) == doctest::Approx(0.8).epsilon(1e-12));
}
