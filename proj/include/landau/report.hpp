#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "landau/bloch_bands.hpp"
#include "landau/ordering.hpp"

namespace landau {

/// m,alpha,n,energy,residual,converged; alpha is empty off the periodic grid.
void write_energies_csv(std::ostream& out, const EnergySequence& seq);
void write_energies_csv(std::ostream& out, const std::vector<SectorLevels>& rows, std::optional<double> alpha);

/// alpha,m,energy,residual,converged over every slice.
void write_band_csv(std::ostream& out, const BandSurface& surface);

nlohmann::json record_to_json(const CheckRecord& r);
nlohmann::json report_to_json(const OrderingReport& report);

/// One row of the convergence table.
struct ConvergenceRow {
  int m = 0;
  int resolution = 0;
  double h = 0.0;
  double energy = 0.0;
  double residual = 0.0;
  bool converged = false;
  std::optional<double> order;         // from this level and the two before it
  std::optional<double> extrapolated;  // order-2 Richardson with the level before
};

/// p = log2(|e0 - e1| / |e1 - e2|) for consecutive halvings of h.
std::optional<double> observed_order(double e0, double e1, double e2);

/// Fills order and extrapolated in rows sorted by (m, resolution).
void annotate_convergence(std::vector<ConvergenceRow>& rows);

/// m,resolution,h,energy,residual,converged,order,extrapolated
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);

/// %.17g, so every double survives a text round trip.
std::string format_double(double v);

}  // namespace landau
