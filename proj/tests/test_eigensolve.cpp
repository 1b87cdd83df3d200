#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "corpus.hpp"
#include "landau/eigensolve.hpp"
#include "landau/errors.hpp"
#include "landau/tridiagonal.hpp"

using namespace landau;

namespace {

RealSparse sparse_of(const Eigen::MatrixXd& d) { return d.sparseView(0.0, 0.0); }

}  // namespace

TEST(Tridiagonal, ToeplitzSpectrum) {
  const int n = 40;
  const TridiagonalEigen e = tridiagonal_eigen(std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0));
  for (int k = 1; k <= n; ++k)
    EXPECT_NEAR(e.values[static_cast<std::size_t>(k - 1)], 2.0 - 2.0 * std::cos(k * std::numbers::pi / (n + 1)),
                1e-13);
  // Orthonormal eigenvectors.
  for (int a = 0; a < n; a += 7)
    for (int b = 0; b < n; b += 5) {
      double dot = 0;
      for (int i = 0; i < n; ++i) dot += e.vector(i, a) * e.vector(i, b);
      EXPECT_NEAR(dot, a == b ? 1.0 : 0.0, 1e-12);
    }
}

TEST(Eigensolve, DiagonalMatrix) {
  Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(100, 1.0, 100.0);
  const RealSparse a = sparse_of(d.asDiagonal().toDenseMatrix());
  SolveConfig cfg;
  cfg.k = 5;
  const SolveResult r = lowest_k(HermitianSparse(a), cfg);
  ASSERT_TRUE(r.all_converged());
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(r.eigenvalues[static_cast<std::size_t>(i)], i + 1.0, 1e-10);
}

TEST(Eigensolve, TwoByTwo) {
  Eigen::MatrixXd m(2, 2);
  m << 2, 1, 1, 2;
  SolveConfig cfg;
  cfg.k = 2;
  const SolveResult r = lowest_k(HermitianSparse(sparse_of(m)), cfg);
  EXPECT_NEAR(r.eigenvalues[0], 1.0, 1e-12);
  EXPECT_NEAR(r.eigenvalues[1], 3.0, 1e-12);
}

TEST(Eigensolve, ComplexHermitianByUnitaryConjugation) {
  // U diag(-1, 0.5, 2) U^H with U from a Householder reflector.
  Eigen::Vector3cd v(Complex(1, 2), Complex(-0.5, 1), Complex(0.3, -0.7));
  v.normalize();
  const Eigen::Matrix3cd U = Eigen::Matrix3cd::Identity() - 2.0 * v * v.adjoint();
  const Eigen::Matrix3cd A = U * Eigen::Vector3cd(-1, 0.5, 2).asDiagonal() * U.adjoint();
  const ComplexSparse s = Eigen::MatrixXcd(A).sparseView(Complex(0.0), 0.0);
  SolveConfig cfg;
  cfg.k = 3;
  const SolveResult r = lowest_k(HermitianSparse(s), cfg);
  EXPECT_NEAR(r.eigenvalues[0], -1.0, 1e-12);
  EXPECT_NEAR(r.eigenvalues[1], 0.5, 1e-12);
  EXPECT_NEAR(r.eigenvalues[2], 2.0, 1e-12);
}

TEST(Eigensolve, RandomSymmetricAgainstDense) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(500, 500);
  for (int i = 0; i < 500; ++i)
    for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = g(rng);
  const HermitianSparse a(sparse_of(m));
  for (auto t : {SpectralTransform::none, SpectralTransform::shift_invert}) {
    SolveConfig cfg;
    cfg.k = 5;
    cfg.tol = 1e-12;
    cfg.transform = t;
    const SolveResult r = lowest_k(a, cfg);
    const std::vector<double> dense = dense_reference(a);
    ASSERT_TRUE(r.all_converged());
    for (int i = 0; i < 5; ++i)
      EXPECT_NEAR(r.eigenvalues[static_cast<std::size_t>(i)], dense[static_cast<std::size_t>(i)], 1e-10);
  }
}

TEST(Eigensolve, CorpusAgreesWithDenseReference) {
  for (const auto& e : corpus::operators()) {
    ASSERT_LE(e.op.dimension(), 2000u);
    SolveConfig cfg;
    cfg.k = 5;
    cfg.tol = 1e-10;
    const SolveResult r = lowest_k(e.op, cfg);
    const std::vector<double> dense = dense_reference(e.op);
    EXPECT_TRUE(r.all_converged()) << e.name;
    for (int i = 0; i < 5; ++i)
      EXPECT_NEAR(r.eigenvalues[static_cast<std::size_t>(i)], dense[static_cast<std::size_t>(i)], 1e-8) << e.name;
    const ResidualReport rep = residual_check(e.op, r);
    EXPECT_TRUE(rep.ok) << e.name;
    for (double x : rep.recomputed) EXPECT_LE(x, 1e-8) << e.name;
  }
}

TEST(Eigensolve, DegenerateFreeLevelsAreAllFound) {
  // V = 0: the lowest Landau band repeats for every axial mode, so close
  // pairs must not be skipped.
  const PotentialSpec spec;
  GridOptions o;
  o.r_max = 8;
  o.z_max = 4;
  const Grid2D g = build_grid(FieldConfig{1}, 0, spec, 0, o);
  const SectorOperator op = assemble(spec, FieldConfig{1}, 0, g);
  for (bool separable : {true, false}) {
    SolveConfig cfg;
    cfg.k = 6;
    cfg.tol = 1e-10;
    cfg.use_separable_factors = separable;
    const SolveResult r = lowest_k(op, cfg);
    const std::vector<double> dense = dense_reference(op);
    for (int i = 0; i < 6; ++i)
      EXPECT_NEAR(r.eigenvalues[static_cast<std::size_t>(i)], dense[static_cast<std::size_t>(i)], 1e-8)
          << "separable " << separable;
  }
}

TEST(Eigensolve, SeedDeterminesTheResultBitForBit) {
  const auto ops = corpus::operators();
  SolveConfig cfg;
  cfg.k = 2;
  cfg.use_separable_factors = false;
  const SolveResult a = lowest_k(ops[2].op, cfg);
  const SolveResult b = lowest_k(ops[2].op, cfg);
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
  EXPECT_EQ(a.residual_norms, b.residual_norms);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Eigensolve, ExplicitShiftMatchesAutomatic) {
  const auto ops = corpus::operators();
  const SectorOperator& op = ops[3].op;  // Coulomb m = 2
  SolveConfig cfg;
  cfg.k = 3;
  cfg.tol = 1e-10;
  const SolveResult a = lowest_k(op, cfg);
  cfg.transform = SpectralTransform::shift_invert;
  cfg.shift = a.eigenvalues[0] - 0.3;
  const SolveResult b = lowest_k(op, cfg);
  for (int i = 0; i < 3; ++i)
    EXPECT_NEAR(a.eigenvalues[static_cast<std::size_t>(i)], b.eigenvalues[static_cast<std::size_t>(i)], 1e-9);
}

TEST(Eigensolve, UnreachableToleranceIsReportedNotHidden) {
  const auto ops = corpus::operators();
  SolveConfig cfg;
  cfg.tol = 1e-16;
  cfg.max_iterations = 10;
  cfg.transform = SpectralTransform::none;
  cfg.use_separable_factors = false;
  const SolveResult r = lowest_k(ops[2].op, cfg);
  EXPECT_FALSE(r.all_converged());
  EXPECT_GT(r.residual_norms[0], 1e-16);
}

TEST(Eigensolve, InvalidRequestsAreUsageErrors) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  SolveConfig cfg;
  cfg.k = 4;
  EXPECT_THROW(lowest_k(HermitianSparse(sparse_of(m)), cfg), UsageError);
  cfg.k = 1;
  cfg.tol = -1;
  EXPECT_THROW(lowest_k(HermitianSparse(sparse_of(m)), cfg), UsageError);
}

TEST(Eigensolve, ResidualCheckFlagsWrongPairs) {
  const auto ops = corpus::operators();
  SolveConfig cfg;
  SolveResult r = lowest_k(ops[2].op, cfg);
  r.eigenvalues[0] += 0.1;
  const ResidualReport rep = residual_check(ops[2].op, r);
  EXPECT_FALSE(rep.ok);
  EXPECT_GT(rep.recomputed[0], 0.05);
}
