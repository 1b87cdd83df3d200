#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "landau/errors.hpp"
#include "landau/ordering.hpp"

using namespace landau;

namespace {

EnergySequence synthetic(const std::vector<double>& e, double B = 1.0, double residual = 1e-12) {
  EnergySequence s;
  s.field.B = B;
  for (std::size_t m = 0; m < e.size(); ++m) {
    SectorLevels l;
    l.m = static_cast<int>(m);
    l.levels = {e[m]};
    l.residuals = {residual};
    l.converged = {true};
    s.entries.push_back(l);
  }
  return s;
}

std::size_t failures(const OrderingReport& r, const std::string& check) { return r.count(check, true); }

}  // namespace

TEST(Ordering, HarmonicNumbers) {
  EXPECT_EQ(harmonic_number(0), 0.0L);
  EXPECT_NEAR(static_cast<double>(harmonic_number(1)), 1.0, 1e-18);
  EXPECT_NEAR(static_cast<double>(harmonic_number(2)), 1.5, 1e-16);
  EXPECT_NEAR(static_cast<double>(harmonic_number(3)), 11.0 / 6.0, 1e-16);
  EXPECT_NEAR(static_cast<double>(harmonic_number(1000) - std::log(1000.0L)), 0.5772156649 + 1.0 / 2000, 1e-6);
}

TEST(Ordering, LogFitRecoversSlope) {
  std::vector<int> ms;
  std::vector<double> es;
  for (int m = 64; m <= 256; m += 8) {
    ms.push_back(m);
    es.push_back(3.0 - 0.5 * std::log(m));
  }
  const LogFit f = fit_log_asymptote(ms, es);
  EXPECT_NEAR(f.slope, -0.5, 1e-12);
  EXPECT_NEAR(f.intercept, 3.0, 1e-11);
  EXPECT_LT(f.residual, 1e-12);
  EXPECT_THROW(fit_log_asymptote(std::vector<int>{1, 2, 3}, std::vector<double>{3, 2, 1}), UsageError);
  es[3] = es[2] + 1;
  EXPECT_THROW(fit_log_asymptote(ms, es), UsageError);
}

TEST(Ordering, ConstantSequenceHasZeroMarginsAndTurningPointZero) {
  const EnergySequence s = synthetic(std::vector<double>(11, 1.0));
  const OrderingReport local = check_local_inequalities(s, {});
  for (const auto& r : local.records) {
    EXPECT_EQ(r.margin, 0.0) << r.check << " m=" << r.m;
    EXPECT_TRUE(r.pass);
  }
  const TurningPoint tp = classify_turning_point(s, {});
  EXPECT_EQ(tp.M, 0);
  EXPECT_TRUE(tp.valid);
}

TEST(Ordering, ExtendAndRestrictAreInverse) {
  const EnergySequence s = synthetic({0.5, 0.7, 0.8, 0.85}, 2.0);
  const EnergySequence ext = extend_negative_m(s);
  EXPECT_EQ(ext.m_min, -3);
  EXPECT_DOUBLE_EQ(ext.ground(-2), 0.8 + 2 * 2 * 2.0);
  const EnergySequence back = restrict_nonnegative(ext);
  ASSERT_EQ(back.entries.size(), s.entries.size());
  for (int m = 0; m <= 3; ++m) EXPECT_EQ(back.ground(m), s.ground(m));
}

// Property: sequences built to be increasing and concave pass every local
// check; a single dent below both neighbours is caught.
TEST(Ordering, RandomConcaveSequencesPassAndDentsFail) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> e{0.1 + u(rng)};
    double step = 0.05 + 0.2 * u(rng);
    for (int m = 1; m <= 15; ++m) {
      e.push_back(e.back() + step);
      step *= 0.3 + 0.6 * u(rng);
    }
    const EnergySequence s = synthetic(e);
    const OrderingReport ok = check_local_inequalities(s, {});
    EXPECT_TRUE(ok.passed()) << trial;
    EXPECT_EQ(classify_turning_point(s, {}).M, 15);

    const int dent = 1 + static_cast<int>(u(rng) * 13);
    e[static_cast<std::size_t>(dent)] = std::min(e[static_cast<std::size_t>(dent - 1)], e[static_cast<std::size_t>(dent + 1)]) - 1e-3;
    const OrderingReport bad = check_local_inequalities(synthetic(e), {});
    EXPECT_GE(failures(bad, "pseudoconcavity"), 1u) << trial;
  }
}

TEST(Ordering, RiseThenFallIsClassified) {
  std::vector<double> e;
  for (int m = 0; m <= 30; ++m) e.push_back(m <= 8 ? 1.0 + 0.1 * m - 0.004 * m * m : 1.544 - 0.3 * std::log(m / 8.0));
  const EnergySequence s = synthetic(e);
  OrderingReport rep;
  const TurningPoint tp = classify_turning_point(s, {}, &rep);
  EXPECT_EQ(tp.M, 8);
  EXPECT_TRUE(tp.valid);
  EXPECT_FALSE(tp.reaches_end);
  // A rise after the fall breaks the pattern.
  e[20] = e[19] + 0.05;
  EXPECT_FALSE(classify_turning_point(synthetic(e), {}).valid);
}

TEST(Ordering, TangentialBoundsHoldOnConcaveSequences) {
  std::vector<double> e;
  for (int m = 0; m <= 20; ++m) e.push_back(1.0 - 1.0 / (m + 2.0));
  const EnergySequence s = synthetic(e);
  for (int ell = 0; ell < 20; ++ell) EXPECT_TRUE(tangential_upper_bounds(s, ell, {}).passed()) << ell;
  // Decreasing side with E_m = c - S_m, where the harmonic envelope is exact.
  std::vector<double> d;
  for (int m = 0; m <= 20; ++m) d.push_back(2.0 - 0.3 * static_cast<double>(harmonic_number(m)));
  const OrderingReport rep = tangential_upper_bounds(synthetic(d), 4, {});
  ASSERT_GT(rep.records.size(), 0u);
  for (const auto& r : rep.records) EXPECT_NEAR(r.margin, 0.0, 1e-12) << r.m;
}

TEST(Ordering, GeneralBoundFlagsBigDrops) {
  std::vector<double> e{3.0, 2.5, 1.2, 1.1};
  const OrderingReport rep = check_general_bound(synthetic(e, 1.0), {});
  EXPECT_EQ(failures(rep, "general_bound"), 1u);
  for (const auto& r : rep.records)
    if (!r.pass) EXPECT_EQ(r.m, 1);
}

TEST(Ordering, CoarseCompanionWidensTolerance) {
  const EnergySequence fine = synthetic({1.0, 1.2, 1.3, 1.35});
  const EnergySequence coarse = synthetic({1.0, 1.2, 1.32, 1.35});
  TolerancePolicy p;
  p.coarse = &coarse;
  const OrderingReport with = check_local_inequalities(fine, p);
  const OrderingReport without = check_local_inequalities(fine, {});
  EXPECT_GT(with.max_tolerance(), 100 * without.max_tolerance());
}

TEST(Ordering, UnconvergedSectorsAreSkipped) {
  EnergySequence s = synthetic({1.0, 1.2, 1.3, 1.35, 1.37});
  s.entries[2].converged = {false};
  s.entries[2].excluded = true;
  const OrderingReport rep = check_local_inequalities(s, {});
  for (const auto& r : rep.records)
    if (r.m >= 1 && r.m <= 3) EXPECT_FALSE(r.applicable) << r.m;
  EXPECT_TRUE(rep.passed());
}

TEST(Ordering, NonSuperharmonicPotentialIsInformational) {
  std::vector<double> e;
  for (int m = 0; m <= 10; ++m) e.push_back(m + 3.0);
  const PotentialSpec spec({SeparableHarmonic{0.75, 1.0}});
  const OrderingReport rep = verify_sequence(synthetic(e), spec, {});
  EXPECT_FALSE(rep.hypothesis_met);
  EXPECT_TRUE(rep.passed());
  for (const auto& r : rep.records)
    if (r.check != "general_bound") EXPECT_FALSE(r.applicable) << r.check;
}

TEST(Ordering, PlateauOnsetIsReported) {
  std::vector<double> e{0.8, 0.99, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  const PotentialSpec ion({AxisCharge{0, 1}, SmearedCharge{0, 6, 2}});
  const OrderingReport rep = check_finite_charge(synthetic(e), ion, {});
  ASSERT_TRUE(rep.plateau_onset);
  EXPECT_EQ(*rep.plateau_onset, 2);
  EXPECT_EQ(failures(rep, "finite_charge_nondecreasing"), 0u);
}

TEST(Ordering, LeastSlackKeepsOneRecordPerAnchor) {
  std::vector<double> e;
  for (int m = 0; m <= 12; ++m) e.push_back(1.0 - 1.0 / (m + 2.0));
  OrderingReport all;
  for (int ell = 0; ell < 12; ++ell) all.append(tangential_upper_bounds(synthetic(e), ell, {}));
  const OrderingReport least = least_slack_per_anchor(all);
  EXPECT_EQ(least.records.size(), 12u);
}

TEST(Ordering, CoulombSweepIsIncreasingAndConcave) {
  const PotentialSpec spec({AxisCharge{0, 1}});
  const FieldConfig field{1.0};
  const Grid2D g = build_grid(field, 8, spec, -1);
  SweepOptions opt;
  opt.m_max = 8;
  const EnergySequence s = sweep_sectors(spec, field, g, opt);
  ASSERT_TRUE(s.fully_converged());
  for (int m = 1; m <= 8; ++m) EXPECT_GT(s.ground(m), s.ground(m - 1));
  EXPECT_LT(s.ground(8), field.B);
  const OrderingReport rep = verify_sequence(s, spec, {});
  EXPECT_TRUE(rep.passed());
  EXPECT_TRUE(rep.hypothesis_met);
}

TEST(Ordering, HollowTubeTurnsNearHalfRSquaredB) {
  const PotentialSpec spec({AxisCharge{0, 1}, HollowTube{0.5, 4.0}});
  const FieldConfig field{1.0};
  const Grid2D g = build_grid(field, 20, spec, -1);
  SweepOptions opt;
  opt.m_max = 20;
  const EnergySequence s = sweep_sectors(spec, field, g, opt);
  const TurningPoint tp = classify_turning_point(s, {});
  EXPECT_TRUE(tp.valid);
  EXPECT_FALSE(tp.reaches_end);
  // Reported, not pinned: the rise extends roughly to R^2 B / 2 = 8.
  EXPECT_GE(tp.M, 4);
  EXPECT_LE(tp.M, 12);
  RecordProperty("turning_point", tp.M);
  EXPECT_TRUE(check_delta_monotonicity(s, {}).passed());
  EXPECT_TRUE(check_general_bound(s, {}).passed());
}

TEST(Ordering, SweepIsDeterministic) {
  const PotentialSpec spec({AxisCharge{0, 1}});
  const FieldConfig field{1.0};
  const Grid2D g = build_grid(field, 4, spec, -1);
  SweepOptions opt;
  opt.m_max = 4;
  opt.levels = 2;
  const EnergySequence a = sweep_sectors(spec, field, g, opt);
  const EnergySequence b = sweep_sectors(spec, field, g, opt);
  for (int m = 0; m <= 4; ++m) EXPECT_EQ(a.at(m).levels, b.at(m).levels);
}
