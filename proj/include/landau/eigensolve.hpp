#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "landau/sector_operator.hpp"

namespace landau {

/// How the Lanczos iteration sees the operator.
///  - none: A itself.
///  - shift_invert: (A - sigma)^{-1} through a sparse LDL^T factorization; the
///    factor's inertia gives the exact number of eigenvalues below sigma.
///  - automatic: none for dimension <= 256, shift_invert above.
enum class SpectralTransform { automatic, none, shift_invert };

struct SolveConfig {
  int k = 1;
  double tol = 1e-8;
  int max_iterations = 0;  // 0: 10 * dimension, capped at 50000
  std::uint64_t seed = 42;
  SpectralTransform transform = SpectralTransform::automatic;
  std::optional<double> shift;     // shift-invert pole; estimated when absent
  bool use_separable_factors = true;
  bool verify_multiplicity = true;  // deflated restart when k > 1
  std::size_t memory_budget_bytes = std::size_t(1) << 31;
};

struct SolveResult {
  std::vector<double> eigenvalues;     // ascending
  std::vector<double> residual_norms;  // ||A v - lambda v|| / ||v||
  std::vector<bool> converged;
  int iterations = 0;
  double tol = 0.0;
  std::string method;
  HermitianDense eigenvectors;  // n x k, orthonormal columns

  bool all_converged() const;
};

SolveResult lowest_k(const SectorOperator& op, const SolveConfig& cfg);
SolveResult lowest_k(const HermitianSparse& matrix, const SolveConfig& cfg);

/// Full ascending spectrum of the dense materialization (dimension <= 4096).
std::vector<double> dense_reference(const SectorOperator& op);
std::vector<double> dense_reference(const HermitianSparse& matrix);

struct ResidualReport {
  std::vector<double> recomputed;
  std::vector<bool> flagged;  // recomputed residual disagrees with the reported one by > 10x
  bool ok = true;
};

/// Recomputes ||A v - lambda v|| / ||v|| directly from the matrix.
ResidualReport residual_check(const SectorOperator& op, const SolveResult& result);
ResidualReport residual_check(const HermitianSparse& matrix, const SolveResult& result);

}  // namespace landau
