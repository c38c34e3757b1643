#pragma once

#include <cstdint>
#include <vector>

#include "phicurv/geometry.hpp"

namespace phicurv {

/// Halton low-discrepancy point in [0,1)^dim at sequence index `index`
/// (1-based), bases the first `dim` primes.
std::vector<double> halton_point(std::uint64_t index, int dim);

/// Deterministic quasi-random probes inside the box shrunk by the singular
/// margin on every side. The seed offsets into the Halton sequence.
std::vector<std::vector<double>> generate_probes(const Box& box, double margin,
                                                 int count, std::uint64_t seed);

/// Validate explicit probe points against the box and margin; throws
/// ValidationError naming the offending probe.
void validate_probes(const std::vector<std::vector<double>>& probes,
                     const Box& box, double margin);

}  // namespace phicurv
