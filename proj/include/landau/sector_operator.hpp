#pragma once

#include <complex>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "landau/grid.hpp"
#include "landau/potentials.hpp"

namespace landau {

using Complex = std::complex<double>;
using RealSparse = Eigen::SparseMatrix<double>;
using ComplexSparse = Eigen::SparseMatrix<Complex>;
using HermitianSparse = std::variant<RealSparse, ComplexSparse>;
using HermitianDense = std::variant<Eigen::MatrixXd, Eigen::MatrixXcd>;

/// Potential sampled on the nodes of a grid, shared by every sector built on it.
struct GridPotential {
  Grid2D grid;
  std::vector<double> values;  // index = grid.index(i, j)
  std::string spec_digest;
  bool z_separable = false;
  std::vector<double> radial_part;  // V_r(r_i) when z_separable
  std::vector<double> axial_part;   // V_z(z_j) when z_separable
};

/// Evaluates V on all nodes. Periodic potentials go through the lattice-sum
/// cache; when LANDAU_ORDER_CACHE names a directory the sampled values are
/// also persisted there.
GridPotential sample_potential(const PotentialSpec& spec, const Grid2D& grid);

/// Kronecker factors of an operator A = R (x) I_z + I_r (x) Z, present when
/// the potential splits into radial and axial parts.
struct SeparableFactors {
  HermitianSparse radial;
  HermitianSparse axial;
};

/// Sparse Hermitian matrix of the reduced sector Hamiltonian
///   -d2/dr2 - (1/r) d/dr - d2/dz2 + B^2 r^2/4 + m^2/r^2 - m B + V
/// in the symmetric representation u_i = sqrt(r_i) psi_i.
struct SectorOperator {
  int m = 0;
  std::optional<double> alpha;
  HermitianSparse matrix;
  std::vector<double> weight;  // r_i h_r h_z per node
  FieldConfig field;
  Grid2D grid;
  std::string potential_digest;
  std::shared_ptr<const SeparableFactors> factors;

  std::size_t dimension() const { return grid.dimension(); }
  bool is_complex() const { return std::holds_alternative<ComplexSparse>(matrix); }

  /// Lower bound on the spectrum from Gershgorin discs.
  double gershgorin_lower_bound() const;
};

SectorOperator assemble(const GridPotential& potential, const FieldConfig& field, int m);
SectorOperator assemble(const PotentialSpec& spec, const FieldConfig& field, int m, const Grid2D& grid);

/// Bloch sector: psi(z + a) = e^{i alpha} psi(z). The z-couplings across the
/// cell boundary carry e^{+-i alpha}. alpha in {0, pi} yields a real matrix.
SectorOperator assemble_bloch(const GridPotential& potential, const FieldConfig& field, int m, double alpha);
SectorOperator assemble_bloch(const PotentialSpec& spec, const FieldConfig& field, int m, double alpha,
                              const Grid2D& grid);

inline constexpr std::size_t kDenseDimensionCap = 4096;

HermitianDense dense_materialize(const SectorOperator& op);
HermitianDense dense_materialize(const HermitianSparse& matrix);

/// Matrix Market coordinate format ("real symmetric" / "complex hermitian",
/// lower triangle, %.17g so stored doubles round-trip exactly).
void write_matrix_market(std::ostream& out, const HermitianSparse& matrix);
HermitianSparse read_matrix_market(std::istream& in);

}  // namespace landau
