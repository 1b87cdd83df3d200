#include "landau/grid.hpp"

#include <cmath>
#include <sstream>

#include "landau/errors.hpp"

namespace landau {

double FieldConfig::magnetic_length() const { return std::sqrt(2.0 / B); }

double spacing_for_resolution(int level) { return std::ldexp(kBaseSpacing, -level); }

std::string Grid2D::digest() const {
  std::ostringstream os;
  os.precision(17);
  os << "grid(n_r=" << n_r << ",n_z=" << n_z << ",h_r=" << h_r << ",h_z=" << h_z << ",r_max=" << r_max;
  if (periodic)
    os << ",period=" << period;
  else
    os << ",z_max=" << z_max;
  os << ')';
  return os.str();
}

namespace {

void check_dimension(const Grid2D& g, std::size_t cap) {
  if (g.dimension() > cap) {
    std::ostringstream os;
    os << "grid dimension " << g.dimension() << " (" << g.n_r << " x " << g.n_z << ") exceeds the cap of " << cap
       << "; lower the resolution level";
    throw ResourceError(os.str());
  }
}

Grid2D make_grid(double r_max, double z_extent, bool periodic, int resolution, std::size_t cap) {
  const double h = spacing_for_resolution(resolution);
  Grid2D g;
  g.resolution = resolution;
  g.periodic = periodic;
  g.h_r = h;
  g.n_r = static_cast<int>(std::ceil(r_max / h - 1e-9));
  g.r_max = g.n_r * h;
  if (periodic) {
    g.period = z_extent;
    g.n_z = std::max(3, static_cast<int>(std::lround(z_extent / h)));
    g.h_z = z_extent / g.n_z;
  } else {
    g.z_max = z_extent;
    g.n_z = static_cast<int>(std::ceil(2.0 * z_extent / h - 1e-9));
    g.h_z = 2.0 * z_extent / g.n_z;
  }
  check_dimension(g, cap);
  return g;
}

}  // namespace

Grid2D build_grid(const FieldConfig& field, int m_max, const PotentialSpec& spec, int resolution,
                  const GridOptions& options) {
  if (m_max < 0) throw UsageError("build_grid: m_max must be >= 0");
  if (!(field.B > 0)) throw UsageError("build_grid: B must be > 0");

  double r_max = 2.5 * std::sqrt(2.0 * (m_max + 1) / field.B) + 5.0 * field.magnetic_length();
  for (const auto& t : spec.terms()) {
    // Keep the tube radius well inside the domain.
    if (const auto* tube = std::get_if<HollowTube>(&t)) r_max = std::max(r_max, tube->radius + 5.0 * field.magnetic_length());
  }
  r_max = std::ceil(r_max);
  if (options.r_max) r_max = *options.r_max;

  if (spec.is_periodic()) return make_grid(r_max, spec.chain().period, true, resolution, options.max_dimension);

  double z_max = std::max(20.0, r_max);
  if (options.z_max) z_max = *options.z_max;
  return make_grid(r_max, z_max, false, resolution, options.max_dimension);
}

Grid2D regrid(const Grid2D& grid, int resolution, std::size_t max_dimension) {
  return make_grid(grid.r_max, grid.periodic ? grid.period : grid.z_max, grid.periodic, resolution, max_dimension);
}

}  // namespace landau
