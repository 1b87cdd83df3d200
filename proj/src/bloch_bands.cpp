#include "landau/bloch_bands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace landau {

std::size_t BandSurface::mirror(std::size_t i) const {
  const std::size_t n = alphas.size();
  return (n - i) % n;
}

std::vector<double> uniform_alphas(int n_alpha) {
  if (n_alpha < 8) throw UsageError("band: n_alpha must be >= 8");
  std::vector<double> a(static_cast<std::size_t>(n_alpha));
  for (int i = 0; i < n_alpha; ++i) a[static_cast<std::size_t>(i)] = 2.0 * std::numbers::pi * i / n_alpha;
  return a;
}

namespace {

void check_alpha_grid(const std::vector<double>& alphas) {
  if (alphas.size() < 8) throw UsageError("band: at least 8 alpha samples are required");
  const double step = 2.0 * std::numbers::pi / static_cast<double>(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i)
    if (std::abs(alphas[i] - step * static_cast<double>(i)) > 1e-12)
      throw UsageError("band: alphas must be the uniform grid 2 pi i / n starting at 0");
}

}  // namespace

BandSurface compute_band(const GridPotential& potential, const FieldConfig& field, const std::vector<double>& alphas,
                         const SweepOptions& options, const BandSurface* hints) {
  if (!potential.grid.periodic) throw UsageError("band: potential grid is not periodic");
  check_alpha_grid(alphas);
  if (hints && hints->alphas.size() != alphas.size()) throw UsageError("band: hint surface has other alphas");
  BandSurface s;
  s.alphas = alphas;
  s.slices.resize(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    SweepOptions o = options;
    if (hints)
      o.hints = &hints->slices[i];
    else if (i > 0)
      o.hints = &s.slices[0];
    s.slices[i] = sweep_sectors(potential, field, o, alphas[i]);
  }
  return s;
}

BandSurface compute_band(const PotentialSpec& spec, const FieldConfig& field, const Grid2D& grid,
                         const std::vector<double>& alphas, const SweepOptions& options) {
  if (!spec.is_periodic()) throw UsageError("band: potential is not periodic");
  return compute_band(sample_potential(spec, grid), field, alphas, options);
}

OrderingReport check_band_pseudoconcavity(const BandSurface& surface, const BandTolerance& tol) {
  OrderingReport rep;
  for (std::size_t i = 0; i < surface.slices.size(); ++i) {
    const EnergySequence& seq = surface.slices[i];
    TolerancePolicy p;
    p.factor = tol.factor;
    p.floor = tol.floor;
    if (tol.coarse) p.coarse = &tol.coarse->slices[i];
    rep.append(check_local_inequalities(seq, p));
    for (int ell = 0; ell + 1 <= seq.m_max(); ++ell)
      rep.append(least_slack_per_anchor(tangential_upper_bounds(seq, ell, p)));
    OrderingReport tp;
    const TurningPoint t = classify_turning_point(seq, p, &tp);
    tp.turning_point.reset();
    rep.append(tp);
    if (!t.valid) {
      CheckRecord r;
      r.check = "turning_point_pattern";
      r.m = t.M;
      r.alpha = surface.alphas[i];
      r.pass = false;
      r.note = "increase after a decrease beyond tolerance";
      rep.records.push_back(r);
    }
  }
  return rep;
}

OrderingReport check_alpha_minimum(const BandSurface& surface, const BandTolerance& tol) {
  OrderingReport rep;
  if (surface.alphas.empty() || surface.alphas.front() != 0.0) throw UsageError("band: alpha = 0 must be sampled");
  const double divisor = 3.0;
  for (int m = 0; m <= surface.m_max(); ++m) {
    const EnergySequence& base = surface.slices.front();
    for (std::size_t i = 1; i < surface.alphas.size(); ++i) {
      const EnergySequence& seq = surface.slices[i];
      CheckRecord r;
      r.check = "alpha_minimum";
      r.m = m;
      r.alpha = surface.alphas[i];
      if (!base.usable(m) || !seq.usable(m)) {
        r.applicable = false;
        r.note = "touches an unconverged sector";
        rep.records.push_back(r);
        continue;
      }
      r.lhs = base.ground(m);
      r.rhs = seq.ground(m);
      r.margin = r.rhs - r.lhs;
      double budget = 2.0 * std::max(base.residual(m), seq.residual(m));
      if (tol.coarse) {
        const auto& cb = tol.coarse->slices.front();
        const auto& cs = tol.coarse->slices[i];
        if (cb.usable(m) && cs.usable(m)) budget += std::abs(r.margin - (cs.ground(m) - cb.ground(m))) / divisor;
      }
      r.tol = std::max(tol.floor, tol.factor * budget);
      r.pass = r.margin >= -r.tol;
      r.strict = r.margin > r.tol;
      rep.records.push_back(r);
    }
    // Conjugation symmetry alpha <-> 2 pi - alpha; the residuals bound each
    // eigenvalue error directly.
    for (std::size_t i = 1; i < surface.alphas.size(); ++i) {
      const std::size_t j = surface.mirror(i);
      if (j <= i) continue;
      const EnergySequence& a = surface.slices[i];
      const EnergySequence& b = surface.slices[j];
      CheckRecord r;
      r.check = "alpha_symmetry";
      r.m = m;
      r.alpha = surface.alphas[i];
      if (!a.usable(m) || !b.usable(m)) {
        r.applicable = false;
        r.note = "touches an unconverged sector";
        rep.records.push_back(r);
        continue;
      }
      r.lhs = std::abs(a.ground(m) - b.ground(m));
      r.rhs = 0.0;
      r.margin = -r.lhs;
      r.tol = std::max(tol.floor, a.residual(m) + b.residual(m));
      r.pass = r.margin >= -r.tol;
      rep.records.push_back(r);
    }
  }
  return rep;
}

OrderingReport check_band_continuity(const BandSurface& surface) {
  OrderingReport rep;
  const std::size_t n = surface.alphas.size();
  for (int m = 0; m <= surface.m_max(); ++m) {
    std::vector<double> inc;
    bool complete = true;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = surface.slices[i];
      const auto& b = surface.slices[(i + 1) % n];
      if (!a.usable(m) || !b.usable(m)) {
        complete = false;
        break;
      }
      inc.push_back(std::abs(b.ground(m) - a.ground(m)));
    }
    if (!complete) {
      rep.notes.push_back("band continuity skipped for m=" + std::to_string(m) + ": unconverged sector");
      continue;
    }
    std::vector<double> sorted = inc;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
    const double median = sorted[n / 2];
    for (std::size_t i = 0; i < n; ++i) {
      CheckRecord r;
      r.check = "band_continuity";
      r.m = m;
      r.alpha = surface.alphas[i];
      r.lhs = inc[i];
      r.rhs = 10.0 * median;
      r.margin = r.rhs - r.lhs;
      r.tol = 1e-10;
      r.pass = r.margin >= -r.tol;
      rep.records.push_back(r);
    }
  }
  return rep;
}

}  // namespace landau
