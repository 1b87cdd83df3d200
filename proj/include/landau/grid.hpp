#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "landau/potentials.hpp"

namespace landau {

/// Units: hbar = 1, 2 * mass = 1, charge folded into B. Only |B| enters.
struct FieldConfig {
  double B = 1.0;

  /// sqrt(2/B), the transverse scale of the lowest Landau band.
  double magnetic_length() const;
};

/// Truncated (r_perp, z) domain. Radial nodes are staggered,
/// r_i = (i + 1/2) h_r, so no node lies on the axis.
///
/// z extent is either the box [-z_max, z_max] with cell-centered nodes and
/// no-flux ends, or one periodic cell [0, a) with z_j = (j + 1/2) h_z.
struct Grid2D {
  int n_r = 0;
  int n_z = 0;
  double h_r = 0.0;
  double h_z = 0.0;
  double r_max = 0.0;
  double z_max = 0.0;   // box half-extent (non-periodic)
  double period = 0.0;  // cell length (periodic)
  bool periodic = false;
  int resolution = 0;

  double r(int i) const { return (i + 0.5) * h_r; }
  double z(int j) const { return periodic ? (j + 0.5) * h_z : -z_max + (j + 0.5) * h_z; }
  std::size_t dimension() const { return static_cast<std::size_t>(n_r) * static_cast<std::size_t>(n_z); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_z) + static_cast<std::size_t>(j);
  }
  std::string digest() const;
};

inline constexpr double kBaseSpacing = 0.25;

/// h = 0.25 / 2^level. Negative levels give the coarser companions used for
/// one-step Richardson estimates.
double spacing_for_resolution(int level);

struct GridOptions {
  std::optional<double> r_max;   // override the sizing rule
  std::optional<double> z_max;   // override the sizing rule (box only)
  std::size_t max_dimension = 4'000'000;
};

/// r_max >= 2.5 sqrt(2 (m_max + 1) / B) + 5 magnetic lengths, rounded up to an
/// integer so every resolution level covers the same domain. The box
/// half-height is max(20, r_max) unless overridden. Periodic potentials get
/// the cell [0, a) with h_z = a / n_z exactly.
Grid2D build_grid(const FieldConfig& field, int m_max, const PotentialSpec& spec, int resolution,
                  const GridOptions& options = {});

/// The same physical domain at another resolution level.
Grid2D regrid(const Grid2D& grid, int resolution, std::size_t max_dimension = 4'000'000);

}  // namespace landau
