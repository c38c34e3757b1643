#pragma once

#include <vector>

namespace phicurv {

/// Eigenvalues of a symmetric n x n matrix (row-major), ascending, by cyclic
/// Jacobi rotations. Deterministic for a fixed input.
std::vector<double> sym_eigenvalues(std::vector<double> a, int n);

/// Cholesky factor (lower, row-major) of an SPD matrix; returns false when a
/// pivot is not positive.
bool cholesky(const std::vector<double>& a, int n, std::vector<double>& lower);

/// Solve A x = b for SPD A via Cholesky; returns false when not SPD.
bool solve_spd(const std::vector<double>& a, int n, const std::vector<double>& b,
               std::vector<double>& x);

}  // namespace phicurv
