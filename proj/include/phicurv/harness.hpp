#pragma once

#include <optional>

#include "phicurv/ansatz.hpp"
#include "phicurv/report.hpp"
#include "phicurv/solitons.hpp"

namespace phicurv {

struct FamilySpec {
  std::vector<std::string> parameters;
  std::vector<double> lower, upper;
};

/// A fully linked manifold file: candidate structure, optional ansatz family
/// block and the reproducibility metadata recorded in reports.
struct Manifold {
  SolitonData data;
  std::optional<FamilySpec> family;
  std::string source_path;
  std::string file_hash;
  std::uint64_t probe_seed = 1;
  int probe_count = 8;
  bool explicit_probes = false;
};

/// Parse and link a manifold file. Validation errors carry section/line
/// context in the message.
Manifold load_manifold(const std::string& path);
Manifold load_manifold_text(const std::string& text, const std::string& name);

/// Serialize back to the file format (used by the rigid-model emitter).
std::string write_manifold(const Manifold& manifold);

/// Replace generated probes by a fresh quasi-random set.
void regenerate_probes(Manifold& manifold, int count, std::uint64_t seed);

/// Run catalog identities over the manifold; empty selection means all.
ResidualReport verify_manifold(const Manifold& manifold,
                               const std::vector<std::string>& ids = {},
                               int order = 4, double tol_scale = 1.0);

/// Assemble an ansatz family from the manifold's [family] block.
AnsatzFamily family_from(const Manifold& manifold);

}  // namespace phicurv
