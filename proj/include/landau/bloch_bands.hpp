#pragma once

#include <vector>

#include "landau/ordering.hpp"

namespace landau {

/// Lowest Bloch levels E_m(alpha) over a uniform alpha grid of [0, 2 pi).
struct BandSurface {
  std::vector<double> alphas;
  std::vector<EnergySequence> slices;  // slices[i] at alphas[i], m = 0..m_max

  int m_max() const { return slices.empty() ? -1 : slices.front().m_max(); }
  double value(std::size_t alpha_index, int m) const { return slices[alpha_index].ground(m); }
  /// Index of 2 pi - alphas[i] on the grid.
  std::size_t mirror(std::size_t alpha_index) const;
};

/// alpha_i = 2 pi i / n. Requires n >= 8; even n also samples pi.
std::vector<double> uniform_alphas(int n_alpha);

BandSurface compute_band(const GridPotential& potential, const FieldConfig& field, const std::vector<double>& alphas,
                         const SweepOptions& options, const BandSurface* hints = nullptr);
BandSurface compute_band(const PotentialSpec& spec, const FieldConfig& field, const Grid2D& grid,
                         const std::vector<double>& alphas, const SweepOptions& options);

struct BandTolerance {
  double factor = 5.0;
  double floor = 1e-10;
  const BandSurface* coarse = nullptr;  // same alphas, one resolution level down
};

/// The local inequalities, tangential bounds and turning-point pattern on
/// every alpha slice.
OrderingReport check_band_pseudoconcavity(const BandSurface& surface, const BandTolerance& tol);

/// E_m(0) <= E_m(alpha) for every sampled (m, alpha), and the conjugation
/// symmetry E_m(alpha) = E_m(2 pi - alpha) within the solver residuals.
OrderingReport check_alpha_minimum(const BandSurface& surface, const BandTolerance& tol);

/// No increment |E_m(alpha_{i+1}) - E_m(alpha_i)| above 10x the median increment of that m.
OrderingReport check_band_continuity(const BandSurface& surface);

}  // namespace landau
