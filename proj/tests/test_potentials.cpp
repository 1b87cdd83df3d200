#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <thread>

#include "landau/errors.hpp"
#include "landau/potentials.hpp"

using namespace landau;

namespace {

// Potential of a uniformly charged ball, written out independently of the library.
double ball(double q, double R, double s) { return s >= R ? q / s : q * (3 * R * R - s * s) / (2 * R * R * R); }

double brute_chain(double a, double Z, double q, double R, double r, double z, long N) {
  double sum = 0.0;
  for (long n = -N; n <= N; ++n) {
    const double dz = z - n * a;
    const double dzb = z - n * a - a / 2;
    sum += -Z / std::hypot(r, dz) + ball(q, R, std::hypot(r, dzb));
  }
  return sum;
}

}  // namespace

TEST(Potentials, AxisChargeIsAttractiveCoulomb) {
  const PotentialSpec spec({AxisCharge{1.0, 2.0}});
  EXPECT_NEAR(evaluate(spec, 3.0, 5.0), -2.0 / 5.0, 1e-15);
}

TEST(Potentials, BallMatchesClosedFormInsideAndOutside) {
  const PotentialSpec spec({SmearedCharge{0.0, 2.0, 3.0}});
  EXPECT_NEAR(evaluate(spec, 0.5, 0.5), ball(3.0, 2.0, std::sqrt(0.5)), 1e-14);
  EXPECT_NEAR(evaluate(spec, 3.0, 4.0), 3.0 / 5.0, 1e-14);
}

TEST(Potentials, HollowTubeLogOutsideZeroInside) {
  const PotentialSpec spec({HollowTube{0.5, 4.0}});
  EXPECT_EQ(evaluate(spec, 2.0, 0.0), 0.0);
  EXPECT_NEAR(evaluate(spec, 8.0, 1.0), -0.5 * std::log(2.0), 1e-15);
}

TEST(Potentials, AxisRejected) {
  const PotentialSpec spec({AxisCharge{0.0, 1.0}});
  EXPECT_THROW(evaluate(spec, 0.0, 1.0), DomainError);
  EXPECT_THROW(evaluate_term(AxisCharge{0.0, 1.0}, -1.0, 0.0), DomainError);
}

TEST(Potentials, ChainWithoutDeficitMatchesDirectSum) {
  const auto chain = PeriodicChainSpec::make(2.0, 1.0, 0.5, 1.0);
  EXPECT_EQ(chain.deficit, 0.0);
  const double value = renormalized_chain_sum(chain, 1.0, 0.5);
  // Direct partial sums, N doubled until the change drops below 1e-10.
  long N = 16;
  double prev = brute_chain(2.0, 1.0, 1.0, 0.5, 1.0, 0.5, N);
  double cur = prev;
  for (int it = 0; it < 20; ++it) {
    N *= 2;
    cur = brute_chain(2.0, 1.0, 1.0, 0.5, 1.0, 0.5, N);
    if (std::abs(cur - prev) < 1e-10) break;
    prev = cur;
  }
  EXPECT_NEAR(value, cur, 1e-8);
}

TEST(Potentials, LineChargeGrowsLogarithmically) {
  // One unit nucleus per unit length and no compensation: D = 1, a = 1.
  const auto chain = PeriodicChainSpec::make(1.0, 1.0, 0.25, 0.0);
  std::vector<double> v;
  for (double r : {50.0, 100.0, 200.0}) v.push_back(renormalized_chain_sum(chain, r, 0.3, 1e-7));
  // Analytic line charge 2 (D/a) ln r plus a constant; lattice corrections
  // are of order exp(-2 pi r / a).
  EXPECT_NEAR(v[1] - v[0], 2.0 * std::log(2.0), 1e-6);
  EXPECT_NEAR(v[2] - v[1], 2.0 * std::log(2.0), 1e-6);
  EXPECT_NEAR(v[0] - 2.0 * std::log(50.0), v[2] - 2.0 * std::log(200.0), 1e-6);
}

TEST(Potentials, ChainIsPeriodicInZ) {
  const PotentialSpec spec({PeriodicChainSpec::make(2.0, 1.0, 0.5, 0.5)});
  EXPECT_NEAR(evaluate(spec, 0.7, 0.3), evaluate(spec, 0.7, 2.3), 1e-9);
  EXPECT_NEAR(evaluate(spec, 0.7, 0.3), evaluate(spec, 0.7, -0.3), 1e-9);
}

TEST(Potentials, BallLaplacianInsideIsMinusThree) {
  const PotentialSpec spec({SmearedCharge{0.0, 1.0, 1.0}});
  ScanRegion region{0.1, 0.5, -0.4, 0.4};
  ScanOptions opt;
  opt.samples = 7;
  opt.tolerance = 1e9;
  const ScanReport rep = numerical_superharmonicity_scan(spec, region, opt);
  EXPECT_NEAR(rep.min_discrete_laplacian, -3.0, 1e-4);
  EXPECT_NEAR(rep.max_discrete_laplacian, -3.0, 1e-4);
}

TEST(Potentials, CertificatesAndRadialSigns) {
  EXPECT_EQ(PotentialSpec({AxisCharge{}}).certificate(), Certificate::superharmonic_off_axis);
  EXPECT_EQ(PotentialSpec({AxisCharge{}}).radial_sign(), RadialSign::nondecreasing_in_r);
  EXPECT_EQ(PotentialSpec({HollowTube{}}).radial_sign(), RadialSign::nonincreasing_in_r);
  EXPECT_EQ(PotentialSpec({HollowTube{}}).certificate(), Certificate::superharmonic_off_axis);
  EXPECT_EQ(PotentialSpec({SeparableHarmonic{0.75, 1.0}}).certificate(), Certificate::not_superharmonic);
  EXPECT_EQ(PotentialSpec({AxisCharge{}, SmearedCharge{0, 2, 2}}).radial_sign(), RadialSign::indefinite);
  EXPECT_EQ(PotentialSpec().radial_sign(), RadialSign::constant_in_r);
}

TEST(Potentials, ChainRejectsZDependentCompanions) {
  EXPECT_THROW(PotentialSpec({PeriodicChainSpec::make(2, 1, 0.5, 1), AxisCharge{}}), UsageError);
  EXPECT_NO_THROW(PotentialSpec({PeriodicChainSpec::make(2, 1, 0.5, 1), HollowTube{}}));
}

// Property: any sum of certified superharmonic terms has no discrete
// Laplacian above tolerance away from surfaces.
TEST(Potentials, RandomSuperharmonicSumsPassTheScan) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    std::vector<PotentialTerm> terms;
    terms.push_back(AxisCharge{-2 + 4 * u(rng), 0.2 + u(rng)});
    terms.push_back(SmearedCharge{-2 + 4 * u(rng), 0.5 + u(rng), 2 * u(rng)});
    if (trial % 2) terms.push_back(HollowTube{u(rng), 1.0 + 2 * u(rng)});
    if (trial % 3 == 0) terms.push_back(AxisSegment{-1, 1, u(rng)});
    const PotentialSpec spec(terms);
    ASSERT_EQ(spec.certificate(), Certificate::superharmonic_off_axis);
    ScanOptions opt;
    opt.samples = 9;
    const ScanReport rep = numerical_superharmonicity_scan(spec, ScanRegion{0.5, 5.0, -4.0, 4.0}, opt);
    EXPECT_TRUE(rep.violation_points.empty()) << "trial " << trial << " max " << rep.max_discrete_laplacian;
  }
}

TEST(Potentials, HarmonicTermViolatesTheScan) {
  const PotentialSpec spec({SeparableHarmonic{0.75, 1.0}});
  const ScanReport rep = numerical_superharmonicity_scan(spec, ScanRegion{});
  EXPECT_FALSE(rep.violation_points.empty());
}

TEST(Potentials, ChainCacheConcurrentAccess) {
  ChainSumCache cache;
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t)
    pool.emplace_back([&cache, t] {
      for (int i = 0; i < 500; ++i) {
        cache.store(i * 0.01 + 0.01, t, i);
        (void)cache.find(i * 0.01 + 0.01, (t + 1) % 4);
      }
    });
  for (auto& th : pool) th.join();
  EXPECT_EQ(cache.size(), 2000u);
  EXPECT_EQ(*cache.find(0.11, 2), 10.0);
}

TEST(Potentials, DigestIsStable) {
  const PotentialSpec a({AxisCharge{0, 1}, HollowTube{1, 4}});
  const PotentialSpec b({AxisCharge{0, 1}, HollowTube{1, 4}});
  EXPECT_EQ(a.digest(), b.digest());
  EXPECT_NE(a.digest(), PotentialSpec({AxisCharge{0, 1}}).digest());
}
