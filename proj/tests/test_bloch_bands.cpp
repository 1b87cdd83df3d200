#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "landau/bloch_bands.hpp"
#include "landau/errors.hpp"

using namespace landau;

namespace {

struct Chain {
  PotentialSpec spec;
  Grid2D grid;
  GridPotential potential;
};

Chain chain(double nucleus, double ball_charge, int m_max, int level) {
  Chain c;
  c.spec = PotentialSpec({PeriodicChainSpec::make(2.0, nucleus, 0.5, ball_charge)});
  GridOptions o;
  o.r_max = 8.0;
  c.grid = build_grid(FieldConfig{1.0}, m_max, c.spec, level, o);
  c.potential = sample_potential(c.spec, c.grid);
  return c;
}

}  // namespace

TEST(BlochBands, UniformAlphaGrid) {
  const auto a = uniform_alphas(16);
  ASSERT_EQ(a.size(), 16u);
  EXPECT_EQ(a[0], 0.0);
  EXPECT_NEAR(a[8], std::numbers::pi, 1e-15);
  EXPECT_THROW(uniform_alphas(4), UsageError);
}

TEST(BlochBands, FreeDispersionAcrossTheBand) {
  const Chain c = chain(0.0, 0.0, 1, 1);
  SweepOptions opt;
  opt.m_max = 1;
  opt.solver.tol = 1e-10;
  const BandSurface s = compute_band(c.potential, FieldConfig{1.0}, uniform_alphas(8), opt);
  for (std::size_t i = 0; i < s.alphas.size(); ++i) {
    double exact = 1e300;
    for (int k = -2; k <= 2; ++k) exact = std::min(exact, std::pow((2 * std::numbers::pi * k + s.alphas[i]) / 2.0, 2));
    // Landau part is B for every m >= 0; O(h^2) error on both axes.
    for (int m = 0; m <= 1; ++m) EXPECT_NEAR(s.value(i, m), 1.0 + exact, 1e-2) << i << " " << m;
  }
}

TEST(BlochBands, ZeroSliceMatchesTheOrderingSweep) {
  const Chain c = chain(1.0, 1.0, 3, 0);
  SweepOptions opt;
  opt.m_max = 3;
  const BandSurface s = compute_band(c.potential, FieldConfig{1.0}, uniform_alphas(8), opt);
  const EnergySequence direct = sweep_sectors(c.potential, FieldConfig{1.0}, opt, 0.0);
  for (int m = 0; m <= 3; ++m) EXPECT_EQ(s.value(0, m), direct.ground(m));
}

TEST(BlochBands, ChainChecksPassAndAlphaZeroIsTheMinimum) {
  const Chain c = chain(1.0, 1.0, 4, 0);
  SweepOptions opt;
  opt.m_max = 4;
  const BandSurface s = compute_band(c.potential, FieldConfig{1.0}, uniform_alphas(8), opt);
  BandTolerance t;
  EXPECT_TRUE(check_band_pseudoconcavity(s, t).passed());
  const OrderingReport a = check_alpha_minimum(s, t);
  EXPECT_TRUE(a.passed());
  EXPECT_GT(a.count("alpha_symmetry"), 0u);
  EXPECT_TRUE(check_band_continuity(s).passed());
  for (std::size_t i = 1; i < s.alphas.size(); ++i)
    EXPECT_NEAR(s.value(i, 2), s.value(s.mirror(i), 2), 1e-8);
}

TEST(BlochBands, SyntheticViolationsAreCaught) {
  BandSurface s;
  s.alphas = uniform_alphas(8);
  for (std::size_t i = 0; i < 8; ++i) {
    EnergySequence q;
    q.field.B = 1.0;
    q.alpha = s.alphas[i];
    for (int m = 0; m <= 3; ++m) {
      SectorLevels l;
      l.m = m;
      l.levels = {1.0 + 0.1 * m + 0.01 * (1 - std::cos(s.alphas[i]))};
      l.residuals = {1e-12};
      l.converged = {true};
      q.entries.push_back(l);
    }
    s.slices.push_back(q);
  }
  EXPECT_TRUE(check_alpha_minimum(s, {}).passed());
  s.slices[3].entries[1].levels[0] = 0.5;  // below alpha = 0, and breaks the mirror
  const OrderingReport bad = check_alpha_minimum(s, {});
  EXPECT_GE(bad.count("alpha_minimum", true), 1u);
  EXPECT_GE(bad.count("alpha_symmetry", true), 1u);
}

TEST(BlochBands, NonPeriodicGridRejected) {
  const PotentialSpec spec({AxisCharge{0, 1}});
  const Grid2D g = build_grid(FieldConfig{1.0}, 2, spec, -1);
  SweepOptions opt;
  EXPECT_THROW(compute_band(sample_potential(spec, g), FieldConfig{1.0}, uniform_alphas(8), opt), UsageError);
  EXPECT_THROW(compute_band(spec, FieldConfig{1.0}, g, uniform_alphas(8), opt), UsageError);
}
