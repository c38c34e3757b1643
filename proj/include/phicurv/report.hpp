#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace phicurv {

/// One identity / residual check evaluated over the probe set. `anchor` is
/// the formula the check verifies, in plain ASCII notation.
struct CheckResult {
  enum class Status { Pass, Fail, Skipped };

  std::string id;
  std::string name;
  std::string anchor;
  double tolerance = 0.0;
  std::vector<double> residuals;  // scaled residual per probe
  double max_residual = 0.0;
  Status status = Status::Skipped;
  std::string skip_reason;
};

struct ResidualReport {
  int schema = 1;
  std::string source;
  std::string file_hash;
  std::uint64_t seed = 0;
  int jet_order = 4;
  double tol_scale = 1.0;
  std::vector<CheckResult> checks;

  /// True when no check failed; when `selected_must_run` is set, skipped
  /// checks also count as failures (explicit selection of a gated check).
  bool all_passed(bool selected_must_run = false) const;

  const CheckResult* find(const std::string& id) const;
};

/// Deterministic JSON: keys in fixed order, checks sorted by id, residuals
/// rendered with 17 significant digits.
std::string to_json(const ResidualReport& report);

/// FNV-1a hash of a byte string, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace phicurv
