#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "corpus.hpp"
#include "landau/eigensolve.hpp"
#include "landau/errors.hpp"
#include "landau/sector_operator.hpp"

using namespace landau;

namespace {

Eigen::MatrixXd real_dense(const SectorOperator& op) { return std::get<Eigen::MatrixXd>(dense_materialize(op)); }

Grid2D small_box(const PotentialSpec& spec, int level, double extent = 6.0) {
  GridOptions o;
  o.r_max = extent;
  o.z_max = extent;
  return build_grid(FieldConfig{1.0}, 4, spec, level, o);
}

}  // namespace

TEST(SectorOperator, NeighbouringSectorsDifferByCentrifugalDiagonal) {
  const PotentialSpec spec({AxisCharge{0.0, 1.0}});
  const FieldConfig field{0.7};
  const Grid2D g = small_box(spec, -1);
  for (int m = 0; m < 4; ++m) {
    const Eigen::MatrixXd a = real_dense(assemble(spec, field, m, g));
    const Eigen::MatrixXd b = real_dense(assemble(spec, field, m + 1, g));
    const Eigen::MatrixXd diff = b - a;
    for (int i = 0; i < g.n_r; ++i)
      for (int j = 0; j < g.n_z; ++j) {
        const auto k = static_cast<Eigen::Index>(g.index(i, j));
        const double expect = (2 * m + 1) / (g.r(i) * g.r(i)) - field.B;
        EXPECT_NEAR(diff(k, k), expect, 1e-12 * std::max(1.0, std::abs(expect)));
      }
    Eigen::MatrixXd off = diff;
    off.diagonal().setZero();
    EXPECT_EQ(off.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(SectorOperator, CorpusIsHermitian) {
  for (const auto& e : corpus::operators()) {
    const HermitianDense d = dense_materialize(e.op);
    std::visit([&](const auto& m) { EXPECT_LT((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-14) << e.name; }, d);
  }
}

TEST(SectorOperator, BlochRealAtZeroAndPiComplexOtherwise) {
  const PotentialSpec chain({PeriodicChainSpec::make(2.0, 1.0, 0.5, 1.0)});
  GridOptions o;
  o.r_max = 6;
  const Grid2D g = build_grid(FieldConfig{1}, 0, chain, 0, o);
  EXPECT_FALSE(assemble_bloch(chain, FieldConfig{1}, 0, 0.0, g).is_complex());
  EXPECT_FALSE(assemble_bloch(chain, FieldConfig{1}, 0, std::numbers::pi, g).is_complex());
  EXPECT_TRUE(assemble_bloch(chain, FieldConfig{1}, 0, 1.0, g).is_complex());
}

TEST(SectorOperator, FreeBlochDispersion) {
  // V = 0 on a periodic cell: B + min_k (2 pi k + alpha)^2 / a^2.
  const double a = 2.0;
  const PotentialSpec spec({PeriodicChainSpec::make(a, 0.0, 0.5, 0.0)});
  GridOptions o;
  o.r_max = 10;
  const FieldConfig field{1.0};
  const Grid2D g = build_grid(field, 0, spec, 2, o);
  const GridPotential pot = sample_potential(spec, g);
  SolveConfig cfg;
  cfg.tol = 1e-10;
  for (double alpha : {0.0, 0.5, 2.0, std::numbers::pi}) {
    double exact = 1e300;
    double discrete = 1e300;
    double k_min = 0.0;
    for (int k = -3; k <= 3; ++k) {
      const double q = (2 * std::numbers::pi * k + alpha) / a;
      if (q * q < exact) k_min = q;
      exact = std::min(exact, q * q);
      discrete = std::min(discrete, 2.0 / (g.h_z * g.h_z) * (1.0 - std::cos(q * g.h_z)));
    }
    const SolveResult r = lowest_k(assemble_bloch(pot, field, 0, alpha), cfg);
    // Axial part: the three-point stencil is exact on Bloch waves, and its
    // continuum error is q^4 h^2 / 12. What remains is the radial Landau error.
    EXPECT_NEAR(r.eigenvalues[0], field.B + discrete, 1e-3) << "alpha " << alpha;
    EXPECT_NEAR(r.eigenvalues[0], field.B + exact, 1e-3 + std::pow(k_min, 4) * g.h_z * g.h_z / 12) << "alpha " << alpha;
  }
}

TEST(SectorOperator, FreeLevelConvergesAtSecondOrder) {
  const PotentialSpec spec;
  const FieldConfig field{1.0};
  SolveConfig cfg;
  cfg.tol = 1e-11;
  std::vector<double> err;
  for (int level : {0, 1, 2}) {
    const Grid2D g = build_grid(field, 2, spec, level);
    err.push_back(std::abs(lowest_k(assemble(spec, field, 2, g), cfg).eigenvalues[0] - field.B));
  }
  EXPECT_GE(err[0] / err[1], 3.5);
  EXPECT_GE(err[1] / err[2], 3.5);
}

TEST(SectorOperator, GershgorinBoundsTheSpectrum) {
  for (const auto& e : corpus::operators()) {
    const auto spectrum = dense_reference(e.op);
    EXPECT_LE(e.op.gershgorin_lower_bound(), spectrum.front() + 1e-12) << e.name;
  }
}

TEST(SectorOperator, MatrixMarketRoundTripIsExact) {
  for (const auto& e : corpus::operators()) {
    std::stringstream ss;
    write_matrix_market(ss, e.op.matrix);
    const HermitianSparse back = read_matrix_market(ss);
    const HermitianDense a = dense_materialize(e.op.matrix);
    const HermitianDense b = dense_materialize(back);
    ASSERT_EQ(a.index(), b.index()) << e.name;
    std::visit(
        [&](const auto& x) {
          using M = std::decay_t<decltype(x)>;
          EXPECT_TRUE(x == std::get<M>(b)) << e.name;
        },
        a);
  }
}

TEST(SectorOperator, WeightsAreCellVolumes) {
  const Grid2D g = small_box(PotentialSpec(), 0);
  const SectorOperator op = assemble(PotentialSpec(), FieldConfig{1}, 0, g);
  for (int i = 0; i < g.n_r; i += 5)
    EXPECT_DOUBLE_EQ(op.weight[g.index(i, 3)], g.r(i) * g.h_r * g.h_z);
}

TEST(SectorOperator, SeparableFactorsReproduceTheFullMatrix) {
  const PotentialSpec spec({SeparableHarmonic{0.75, 1.0}});
  const Grid2D g = small_box(spec, -1);
  const SectorOperator op = assemble(spec, FieldConfig{1}, 1, g);
  ASSERT_TRUE(op.factors);
  const Eigen::MatrixXd R = std::get<Eigen::MatrixXd>(dense_materialize(op.factors->radial));
  const Eigen::MatrixXd Z = std::get<Eigen::MatrixXd>(dense_materialize(op.factors->axial));
  Eigen::MatrixXd kron = Eigen::MatrixXd::Zero(R.rows() * Z.rows(), R.rows() * Z.rows());
  for (Eigen::Index p = 0; p < R.rows(); ++p)
    for (Eigen::Index q = 0; q < R.rows(); ++q) {
      kron.block(p * Z.rows(), q * Z.rows(), Z.rows(), Z.rows()).diagonal().array() += R(p, q);
      if (p == q) kron.block(p * Z.rows(), q * Z.rows(), Z.rows(), Z.rows()) += Z;
    }
  EXPECT_LT((kron - real_dense(op)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SectorOperator, DimensionCapIsAResourceError) {
  GridOptions o;
  o.max_dimension = 1000;
  EXPECT_THROW(build_grid(FieldConfig{1}, 10, PotentialSpec(), 3, o), ResourceError);
}
