#pragma once

#include <vector>

namespace landau {

/// Eigenpairs of a real symmetric tridiagonal matrix by implicit QL with
/// Wilkinson shifts. `vectors` is n x n column-major; column k belongs to
/// values[k]. Values are returned in ascending order.
struct TridiagonalEigen {
  std::vector<double> values;
  std::vector<double> vectors;
  int n = 0;

  double vector(int row, int col) const { return vectors[static_cast<std::size_t>(col) * n + row]; }
};

TridiagonalEigen tridiagonal_eigen(const std::vector<double>& diagonal, const std::vector<double>& off_diagonal);

}  // namespace landau
