#include "phicurv/harness.hpp"

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "phicurv/catalog.hpp"

using namespace phicurv;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("gallery gaussian file loads into a soliton structure") {
  Manifold m = load_manifold("gallery/gaussian_r3.mf");
  CHECK(m.data.geo.dim == 3);
  CHECK(m.data.lambda == 1.0);
  CHECK(m.data.alpha == 1.0);
  CHECK(!m.data.map.has_value());  // constant map by default
  CHECK(m.data.potential.has_f());
  CHECK(m.data.probes.size() == 8);
  CHECK(!m.file_hash.empty());
}

TEST_CASE("asymmetric metric entries are rejected") {
  const char* text = R"(
[chart]
dimension = 2

[metric]
g11 = "1"
g12 = "x1"
g21 = "x2"
g22 = "1"
)";
  try {
    load_manifold_text(text, "<test>");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ValidationError);
    CHECK(std::string(e.what()).find("symmetry partner") != std::string::npos);
  }
}

TEST_CASE("probes violating the singular margin are rejected by name") {
  const char* text = R"(
[chart]
dimension = 2
box = [[0, 3.14159], [0, 6.28]]
singular_margin = 0.3

[metric]
g11 = "1"
g12 = "0"
g22 = "sin(x1)^2"

[probes]
points = [[0.1, 1.0], [1.0, 1.0]]
)";
  try {
    load_manifold_text(text, "<test>");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ValidationError);
    CHECK(std::string(e.what()).find("probe 0") != std::string::npos);
  }
}

TEST_CASE("a map requires a target section") {
  const char* text = R"(
[chart]
dimension = 2

[metric]
g11 = "1"
g12 = "0"
g22 = "1"

[map]
phi1 = "x1"
)";
  CHECK_THROWS_AS(load_manifold_text(text, "<test>"), Error);
}

TEST_CASE("verify passes the gaussian gallery file") {
  Manifold m = load_manifold("gallery/gaussian_r3.mf");
  ResidualReport rep = verify_manifold(m);
  CHECK(rep.all_passed());
  const CheckResult* h1 = rep.find("soliton-h1");
  REQUIRE(h1 != nullptr);
  CHECK(h1->status == CheckResult::Status::Pass);
}

TEST_CASE("explicit selection of a gated identity on a non-soliton fails") {
  Manifold m = load_manifold("gallery/euclidean_r3.mf");
  ResidualReport rep = verify_manifold(m, {"soliton-form-lap-sphi"});
  REQUIRE(rep.checks.size() == 1);
  CHECK(rep.checks[0].status == CheckResult::Status::Skipped);
  CHECK(!rep.checks[0].skip_reason.empty());
  CHECK(rep.all_passed(false));        // "all" semantics: skip is not failure
  CHECK(!rep.all_passed(true));        // explicit selection: must run
}

TEST_CASE("unknown identity ids are an error") {
  Manifold m = load_manifold("gallery/euclidean_r3.mf");
  CHECK_THROWS_AS(verify_manifold(m, {"no-such-identity"}), Error);
}

TEST_CASE("rigid closed-form check passes on the generated product") {
  Manifold m = load_manifold("gallery/rigid_s3xr2.mf");
  ResidualReport rep = verify_manifold(m, {"phi-bach-rigid-closed-form"});
  REQUIRE(rep.checks.size() == 1);
  CHECK(rep.checks[0].status == CheckResult::Status::Pass);
  CHECK(rep.checks[0].max_residual <= 1e-8);
}

TEST_CASE("reports are deterministic and carry the file hash") {
  Manifold m = load_manifold("gallery/sphere_s2.mf");
  ResidualReport a = verify_manifold(m);
  ResidualReport b = verify_manifold(m);
  CHECK(to_json(a) == to_json(b));
  CHECK(to_json(a).find(m.file_hash) != std::string::npos);
  CHECK(m.file_hash == fnv1a_hex(slurp("gallery/sphere_s2.mf")));
}

TEST_CASE("manifold files round-trip through the writer") {
  for (const char* path : {"gallery/gaussian_r3.mf", "gallery/sphere_s3_id.mf",
                           "gallery/rigid_s3xr2.mf"}) {
    CAPTURE(path);
    Manifold m = load_manifold(path);
    std::string text = write_manifold(m);
    Manifold again = load_manifold_text(text, "<round-trip>");
    CHECK(again.data.geo.dim == m.data.geo.dim);
    CHECK(again.data.alpha == m.data.alpha);
    CHECK(again.data.lambda == m.data.lambda);
    CHECK(again.data.probes.size() == m.data.probes.size());
    for (std::size_t i = 0; i < m.data.probes.size(); ++i)
      for (std::size_t v = 0; v < m.data.probes[i].size(); ++v)
        CHECK(again.data.probes[i][v] == m.data.probes[i][v]);
    for (int i = 0; i < m.data.geo.dim; ++i)
      for (int j = 0; j < m.data.geo.dim; ++j)
        CHECK(structurally_equal(again.data.geo.g(i, j), m.data.geo.g(i, j)));
    // identical residuals after the round trip
    ResidualReport ra = verify_manifold(m, {"riemann-symmetries"});
    ResidualReport rb = verify_manifold(again, {"riemann-symmetries"});
    CHECK(ra.checks[0].max_residual == rb.checks[0].max_residual);
  }
}

TEST_CASE("the family block builds an ansatz family") {
  Manifold m = load_manifold("gallery/sphere_family.mf");
  AnsatzFamily family = family_from(m);
  CHECK(family.parameters == std::vector<std::string>{"r"});
  CHECK(family.lower == std::vector<double>{0.8});
  CHECK(family.data.lambda == 0.25);
  Manifold plain = load_manifold("gallery/euclidean_r3.mf");
  CHECK_THROWS_AS(family_from(plain), Error);
}

TEST_CASE("probe regeneration honours count and seed") {
  Manifold m = load_manifold("gallery/euclidean_r3.mf");
  regenerate_probes(m, 5, 42);
  CHECK(m.data.probes.size() == 5);
  Manifold n = load_manifold("gallery/euclidean_r3.mf");
  regenerate_probes(n, 5, 42);
  CHECK(m.data.probes == n.data.probes);
  regenerate_probes(n, 5, 43);
  CHECK(m.data.probes != n.data.probes);
}

TEST_CASE("every catalog anchor appears verbatim in the identity table") {
  const std::string doc = slurp("docs/identities.md");
  for (const auto& entry : identity_catalog()) {
    CAPTURE(entry.id);
    CHECK(doc.find(entry.anchor) != std::string::npos);
    CHECK(doc.find(entry.id) != std::string::npos);
  }
}
