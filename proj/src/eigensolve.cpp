#include "landau/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <tuple>

#include <Eigen/SparseCholesky>

#include "landau/errors.hpp"
#include "landau/tridiagonal.hpp"

namespace landau {

bool SolveResult::all_converged() const {
  return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

namespace {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Sparse = Eigen::SparseMatrix<Scalar>;

constexpr std::size_t kPlainLanczosCutoff = 256;

double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

template <typename Scalar>
Vec<Scalar> random_vector(std::size_t n, std::mt19937_64& gen) {
  Vec<Scalar> v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if constexpr (std::is_same_v<Scalar, double>) {
      v[i] = uniform01(gen) - 0.5;
    } else {
      const double re = uniform01(gen) - 0.5;
      v[i] = Scalar(re, uniform01(gen) - 0.5);
    }
  }
  return v;
}

template <typename Scalar>
void orthogonalize(Vec<Scalar>& w, const std::vector<Vec<Scalar>>& basis, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) w -= basis[i].dot(w) * basis[i];
}

template <typename Scalar>
struct Eigenpair {
  double value;
  double residual;
  Vec<Scalar> vector;
};

template <typename Scalar>
struct LanczosProblem {
  std::size_t n = 0;
  std::function<void(const Vec<Scalar>&, Vec<Scalar>&)> apply;           // iterated operator
  std::function<void(const Vec<Scalar>&, Vec<Scalar>&)> apply_original;  // A
  // Indices into the ascending Ritz values of the iterated operator that
  // correspond to the wanted eigenvalues of A.
  std::function<std::vector<int>(const std::vector<double>&)> select;
  int k = 1;
  double tol = 1e-8;
  int max_iterations = 0;
  int check_interval = 10;
  std::uint64_t seed = 42;
  std::size_t memory_budget = 0;
  const std::vector<Vec<Scalar>>* locked = nullptr;
};

template <typename Scalar>
struct LanczosOutcome {
  std::vector<Eigenpair<Scalar>> pairs;  // ascending by value
  std::vector<bool> converged;
  int iterations = 0;
};

template <typename Scalar>
LanczosOutcome<Scalar> lanczos(const LanczosProblem<Scalar>& p) {
  const std::size_t n = p.n;
  const std::size_t n_locked = p.locked ? p.locked->size() : 0;
  const std::size_t krylov_cap = n > n_locked ? n - n_locked : 0;
  LanczosOutcome<Scalar> out;
  if (krylov_cap == 0 || p.k <= 0) return out;

  std::mt19937_64 gen(p.seed);
  std::vector<Vec<Scalar>> basis;
  std::vector<double> alpha;
  std::vector<double> beta;

  auto fresh_direction = [&]() -> std::optional<Vec<Scalar>> {
    for (int attempt = 0; attempt < 8; ++attempt) {
      Vec<Scalar> v = random_vector<Scalar>(n, gen);
      for (int pass = 0; pass < 2; ++pass) {
        if (p.locked) orthogonalize(v, *p.locked, n_locked);
        orthogonalize(v, basis, basis.size());
      }
      const double norm = v.norm();
      if (norm > 1e-8) return Vec<Scalar>(v / norm);
    }
    return std::nullopt;
  };

  auto start = fresh_direction();
  if (!start) return out;
  basis.push_back(std::move(*start));

  const std::size_t bytes_per_vector = n * sizeof(Scalar);
  const std::size_t max_steps =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(p.max_iterations, 1)), krylov_cap);

  Vec<Scalar> w(static_cast<Eigen::Index>(n));
  Vec<Scalar> scratch(static_cast<Eigen::Index>(n));
  double scale = 0.0;

  for (std::size_t j = 0;; ++j) {
    p.apply(basis[j], w);
    const double a = std::real(basis[j].dot(w));
    w -= a * basis[j];
    if (j > 0) w -= beta[j - 1] * basis[j - 1];
    for (int pass = 0; pass < 2; ++pass) {
      if (p.locked) orthogonalize(w, *p.locked, n_locked);
      orthogonalize(w, basis, basis.size());
    }
    alpha.push_back(a);
    const double b = w.norm();
    scale = std::max({scale, std::abs(a), b});
    const std::size_t steps = j + 1;
    out.iterations = static_cast<int>(steps);

    const bool exhausted = steps >= max_steps;
    const bool memory_full = p.memory_budget > 0 && (steps + 1) * bytes_per_vector > p.memory_budget;
    const bool breakdown = b <= 1e-12 * std::max(scale, 1e-300);
    const bool check_now = exhausted || memory_full || breakdown ||
                           (steps >= static_cast<std::size_t>(p.k) && steps % static_cast<std::size_t>(p.check_interval) == 0);

    if (check_now) {
      const TridiagonalEigen t = tridiagonal_eigen(alpha, beta);
      const std::vector<int> wanted = p.select(t.values);
      std::vector<Eigenpair<Scalar>> pairs;
      pairs.reserve(wanted.size());
      for (int idx : wanted) {
        Vec<Scalar> y = Vec<Scalar>::Zero(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < steps; ++i) y += t.vector(static_cast<int>(i), idx) * basis[i];
        y.normalize();
        p.apply_original(y, scratch);
        const double lambda = std::real(y.dot(scratch));
        const double res = (scratch - lambda * y).norm();
        pairs.push_back({lambda, res, std::move(y)});
      }
      std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) { return x.value < y.value; });
      const bool enough = pairs.size() >= static_cast<std::size_t>(p.k);
      const bool all_good =
          enough && std::all_of(pairs.begin(), pairs.begin() + p.k, [&](const auto& e) { return e.residual <= p.tol; });
      const bool space_done = steps >= krylov_cap;
      if (all_good || exhausted || memory_full || (breakdown && space_done)) {
        if (pairs.size() > static_cast<std::size_t>(p.k)) pairs.resize(static_cast<std::size_t>(p.k));
        out.converged.clear();
        for (const auto& e : pairs) out.converged.push_back(e.residual <= p.tol);
        out.pairs = std::move(pairs);
        return out;
      }
    }

    if (breakdown) {
      auto next = fresh_direction();
      if (!next) {
        // Invariant subspace fills the reachable space; report what we have.
        const TridiagonalEigen t = tridiagonal_eigen(alpha, beta);
        std::vector<Eigenpair<Scalar>> pairs;
        for (int idx : p.select(t.values)) {
          Vec<Scalar> y = Vec<Scalar>::Zero(static_cast<Eigen::Index>(n));
          for (std::size_t i = 0; i < steps; ++i) y += t.vector(static_cast<int>(i), idx) * basis[i];
          y.normalize();
          p.apply_original(y, scratch);
          const double lambda = std::real(y.dot(scratch));
          pairs.push_back({lambda, (scratch - lambda * y).norm(), std::move(y)});
        }
        std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) { return x.value < y.value; });
        if (pairs.size() > static_cast<std::size_t>(p.k)) pairs.resize(static_cast<std::size_t>(p.k));
        for (const auto& e : pairs) out.converged.push_back(e.residual <= p.tol);
        out.pairs = std::move(pairs);
        return out;
      }
      beta.push_back(0.0);
      basis.push_back(std::move(*next));
    } else {
      beta.push_back(b);
      basis.push_back(w / b);
    }
  }
}

std::vector<int> lowest_indices(const std::vector<double>& theta, int k) {
  std::vector<int> idx;
  for (int i = 0; i < std::min<int>(k, static_cast<int>(theta.size())); ++i) idx.push_back(i);
  return idx;
}

// Under x -> 1/(x - sigma) the nu eigenvalues below sigma map to the most
// negative Ritz values and the rest of the lowest k to the largest positive.
std::vector<int> shift_invert_indices(const std::vector<double>& theta, int k, int nu) {
  const int size = static_cast<int>(theta.size());
  std::vector<int> idx;
  const int below = std::min(nu, size);
  for (int i = 0; i < below; ++i) idx.push_back(i);
  const int above = std::min(k - below, size - below);
  for (int i = 0; i < above; ++i) idx.push_back(size - 1 - i);
  return idx;
}

template <typename Scalar>
struct ShiftedFactor {
  Eigen::SimplicialLDLT<Sparse<Scalar>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
  double sigma = 0.0;
  int inertia = 0;
};

template <typename Scalar>
bool factorize_shifted(const Sparse<Scalar>& a, double sigma, ShiftedFactor<Scalar>& f) {
  Sparse<Scalar> shifted = a;
  for (Eigen::Index i = 0; i < shifted.rows(); ++i) shifted.coeffRef(i, i) -= Scalar(sigma);
  f.ldlt.compute(shifted);
  if (f.ldlt.info() != Eigen::Success) return false;
  const auto& d = f.ldlt.vectorD();
  int negatives = 0;
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double v = std::real(d[i]);
    if (!std::isfinite(v)) return false;
    if (v < 0.0) ++negatives;
    dmin = std::min(dmin, std::abs(v));
    dmax = std::max(dmax, std::abs(v));
  }
  if (dmin <= 1e-14 * std::max(dmax, 1.0)) return false;
  f.sigma = sigma;
  f.inertia = negatives;
  return true;
}

template <typename Scalar>
double gershgorin_min(const Sparse<Scalar>& a) {
  double lo = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < a.outerSize(); ++c) {
    double diag = 0.0;
    double radius = 0.0;
    for (typename Sparse<Scalar>::InnerIterator it(a, c); it; ++it) {
      if (it.row() == it.col())
        diag = std::real(it.value());
      else
        radius += std::abs(it.value());
    }
    lo = std::min(lo, diag - radius);
  }
  return lo;
}

template <typename Scalar>
double norm_one(const Sparse<Scalar>& a) {
  double best = 0.0;
  for (Eigen::Index c = 0; c < a.outerSize(); ++c) {
    double sum = 0.0;
    for (typename Sparse<Scalar>::InnerIterator it(a, c); it; ++it) sum += std::abs(it.value());
    best = std::max(best, sum);
  }
  return best;
}

template <typename Scalar>
int default_max_iterations(const SolveConfig& cfg, std::size_t n) {
  if (cfg.max_iterations > 0) return cfg.max_iterations;
  return static_cast<int>(std::min<std::size_t>(10 * n, 50000));
}

template <typename Scalar>
LanczosOutcome<Scalar> plain_solve(const Sparse<Scalar>& a, const SolveConfig& cfg, int k,
                                   const std::vector<Vec<Scalar>>* locked, std::uint64_t seed) {
  LanczosProblem<Scalar> p;
  p.n = static_cast<std::size_t>(a.rows());
  p.apply = [&a](const Vec<Scalar>& x, Vec<Scalar>& y) { y.noalias() = a * x; };
  p.apply_original = p.apply;
  p.select = [k](const std::vector<double>& theta) { return lowest_indices(theta, k); };
  p.k = k;
  p.tol = cfg.tol;
  p.max_iterations = default_max_iterations<Scalar>(cfg, p.n);
  p.check_interval = 10;
  p.seed = seed;
  p.memory_budget = cfg.memory_budget_bytes;
  p.locked = locked;
  return lanczos(p);
}

template <typename Scalar>
LanczosOutcome<Scalar> shift_invert_solve(const Sparse<Scalar>& a, const ShiftedFactor<Scalar>& f,
                                          const SolveConfig& cfg, int k, int nu,
                                          const std::vector<Vec<Scalar>>* locked, std::uint64_t seed) {
  LanczosProblem<Scalar> p;
  p.n = static_cast<std::size_t>(a.rows());
  p.apply = [&f](const Vec<Scalar>& x, Vec<Scalar>& y) { y = f.ldlt.solve(x); };
  p.apply_original = [&a](const Vec<Scalar>& x, Vec<Scalar>& y) { y.noalias() = a * x; };
  p.select = [k, nu](const std::vector<double>& theta) { return shift_invert_indices(theta, k, nu); };
  p.k = k;
  p.tol = cfg.tol;
  p.max_iterations = std::min(default_max_iterations<Scalar>(cfg, p.n), 2000);
  p.check_interval = 4;
  p.seed = seed;
  p.memory_budget = cfg.memory_budget_bytes;
  p.locked = locked;
  return lanczos(p);
}

template <typename Scalar>
SolveResult to_result(LanczosOutcome<Scalar>&& o, std::size_t n, double tol, std::string method) {
  SolveResult r;
  r.tol = tol;
  r.method = std::move(method);
  r.iterations = o.iterations;
  Mat<Scalar> vecs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(o.pairs.size()));
  for (std::size_t i = 0; i < o.pairs.size(); ++i) {
    r.eigenvalues.push_back(o.pairs[i].value);
    r.residual_norms.push_back(o.pairs[i].residual);
    vecs.col(static_cast<Eigen::Index>(i)) = o.pairs[i].vector;
  }
  r.converged = o.converged;
  r.eigenvectors = std::move(vecs);
  return r;
}

template <typename Scalar>
SolveResult solve_matrix(const Sparse<Scalar>& a, const SolveConfig& cfg) {
  const std::size_t n = static_cast<std::size_t>(a.rows());
  if (a.rows() != a.cols()) throw UsageError("lowest_k: matrix is not square");
  if (cfg.k < 1) throw UsageError("lowest_k: k must be positive");
  if (static_cast<std::size_t>(cfg.k) > n) throw UsageError("lowest_k: k exceeds the dimension");
  if (!(cfg.tol > 0.0)) throw UsageError("lowest_k: tol must be positive");
  const int k = cfg.k;

  bool invert = cfg.transform == SpectralTransform::shift_invert ||
                (cfg.transform == SpectralTransform::automatic && n > kPlainLanczosCutoff);

  if (!invert) {
    auto o = plain_solve<Scalar>(a, cfg, k, nullptr, cfg.seed);
    int iterations = o.iterations;
    if (cfg.verify_multiplicity && k > 1) {
      // A deflated restart finds copies of degenerate eigenvalues that a single
      // Krylov sequence cannot resolve.
      for (int round = 0; round < k; ++round) {
        std::vector<Vec<Scalar>> locked;
        for (const auto& e : o.pairs) locked.push_back(e.vector);
        auto extra = plain_solve<Scalar>(a, cfg, 1, &locked, cfg.seed + 1 + static_cast<std::uint64_t>(round));
        iterations += extra.iterations;
        if (extra.pairs.empty() || o.pairs.size() < static_cast<std::size_t>(k)) break;
        if (!(extra.pairs[0].value < o.pairs.back().value - cfg.tol)) break;
        o.pairs.back() = std::move(extra.pairs[0]);
        o.converged.back() = extra.converged[0];
        std::vector<std::size_t> order(o.pairs.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) { return o.pairs[x].value < o.pairs[y].value; });
        std::vector<Eigenpair<Scalar>> pairs;
        std::vector<bool> conv;
        for (auto i : order) {
          pairs.push_back(std::move(o.pairs[i]));
          conv.push_back(o.converged[i]);
        }
        o.pairs = std::move(pairs);
        o.converged = std::move(conv);
      }
    }
    o.iterations = iterations;
    return to_result(std::move(o), n, cfg.tol, "lanczos");
  }

  const double floor = gershgorin_min(a);
  double sigma;
  int iterations = 0;
  if (cfg.shift) {
    sigma = *cfg.shift;
  } else {
    SolveConfig pilot_cfg = cfg;
    pilot_cfg.max_iterations = static_cast<int>(std::min<std::size_t>(40, n));
    auto pilot = plain_solve<Scalar>(a, pilot_cfg, 1, nullptr, cfg.seed);
    iterations += pilot.iterations;
    sigma = pilot.pairs.empty() ? floor : pilot.pairs[0].value - pilot.pairs[0].residual;
  }

  ShiftedFactor<Scalar> factor;
  auto place_shift = [&](double target) {
    double step = std::max(1e-6, 1e-3 * std::abs(target));
    for (int attempt = 0; attempt < 60; ++attempt) {
      if (target <= floor) {
        target = floor - step;
        if (factorize_shifted(a, target, factor)) return;
        step *= 2.0;
        continue;
      }
      if (factorize_shifted(a, target, factor) && factor.inertia <= k) return;
      target -= step;
      step *= 2.0;
    }
    throw ConvergenceError("lowest_k: could not place a regular shift below the spectrum", target, floor);
  };

  // A distant pole leaves the wanted eigenvalues in a dense part of the
  // inverted spectrum. Short stages move the pole next to the best Ritz value
  // before the final run.
  constexpr int kStages = 3;
  constexpr int kStageIterations = 20;
  LanczosOutcome<Scalar> o;
  for (int stage = 0;; ++stage) {
    place_shift(sigma);
    const bool last = stage == kStages;
    SolveConfig stage_cfg = cfg;
    if (!last) stage_cfg.max_iterations = std::min(kStageIterations, default_max_iterations<Scalar>(cfg, n));
    o = shift_invert_solve<Scalar>(a, factor, stage_cfg, k, factor.inertia, nullptr, cfg.seed);
    iterations += o.iterations;
    const bool done = o.pairs.size() == static_cast<std::size_t>(k) &&
                      std::all_of(o.converged.begin(), o.converged.end(), [](bool c) { return c; });
    if (done || last) break;
    if (o.pairs.empty()) continue;
    // Rayleigh quotients lie above the lowest eigenvalue, so the pole moves
    // up but stays a fraction of the remaining gap below the estimate.
    double target = std::numeric_limits<double>::infinity();
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& e : o.pairs) {
      target = std::min(target, e.value - std::abs(e.value - factor.sigma) / 16.0);
      top = std::max(top, e.value);
    }
    // Solve roundoff limits the A-residual of level i to about
    // |A| eps (lambda_i - sigma) / (lambda_1 - sigma); for k > 1 the pole
    // keeps a distance proportional to the spread of the wanted levels.
    if (k > 1) {
      const double c = std::min(0.5, 100.0 * norm_one(a) * std::numeric_limits<double>::epsilon() / cfg.tol);
      const double lowest = std::min_element(o.pairs.begin(), o.pairs.end(), [](const auto& x, const auto& y) {
                              return x.value < y.value;
                            })->value;
      target = std::min(target, lowest - c / (1.0 - c) * (top - lowest));
    }
    if (std::isfinite(target)) sigma = target;
  }
  sigma = factor.sigma;
  const int nu = factor.inertia;

  if (cfg.verify_multiplicity && k > 1 && o.pairs.size() == static_cast<std::size_t>(k)) {
    for (int round = 0; round < k; ++round) {
      std::vector<Vec<Scalar>> locked;
      int locked_below = 0;
      for (const auto& e : o.pairs) {
        locked.push_back(e.vector);
        if (e.value < sigma) ++locked_below;
      }
      const int nu_rest = std::max(0, nu - locked_below);
      auto extra = shift_invert_solve<Scalar>(a, factor, cfg, 1, std::min(nu_rest, 1), &locked,
                                              cfg.seed + 1 + static_cast<std::uint64_t>(round));
      iterations += extra.iterations;
      if (extra.pairs.empty()) break;
      if (!(extra.pairs[0].value < o.pairs.back().value - cfg.tol)) break;
      o.pairs.back() = std::move(extra.pairs[0]);
      o.converged.back() = extra.converged[0];
      std::vector<std::size_t> order(o.pairs.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t x, std::size_t y) { return o.pairs[x].value < o.pairs[y].value; });
      std::vector<Eigenpair<Scalar>> pairs;
      std::vector<bool> conv;
      for (auto i : order) {
        pairs.push_back(std::move(o.pairs[i]));
        conv.push_back(o.converged[i]);
      }
      o.pairs = std::move(pairs);
      o.converged = std::move(conv);
    }
  }
  o.iterations = iterations;
  return to_result(std::move(o), n, cfg.tol, "shift_invert");
}

SolveResult solve_any(const HermitianSparse& m, const SolveConfig& cfg) {
  return std::visit([&](const auto& a) { return solve_matrix(a, cfg); }, m);
}

template <typename Scalar>
Vec<Scalar> column(const HermitianDense& vectors, int c) {
  return std::get<Mat<Scalar>>(vectors).col(c);
}

// A = R (x) I_z + I_r (x) Z with index i * n_z + j: the eigenvectors are
// Kronecker products and the eigenvalues pairwise sums.
template <typename Scalar>
SolveResult separable_solve(const SectorOperator& op, const SolveConfig& cfg) {
  const auto& radial = std::get<Sparse<Scalar>>(op.factors->radial);
  const auto& axial = std::get<Sparse<Scalar>>(op.factors->axial);
  const Eigen::Index nr = radial.rows();
  const Eigen::Index nz = axial.rows();
  const int k = cfg.k;

  SolveConfig sub = cfg;
  sub.tol = cfg.tol / 4.0;
  sub.k = static_cast<int>(std::min<Eigen::Index>(k, nr));
  SolveResult rr = solve_matrix(radial, sub);
  sub.k = static_cast<int>(std::min<Eigen::Index>(k, nz));
  SolveResult zz = solve_matrix(axial, sub);

  std::vector<std::tuple<double, int, int>> sums;
  for (std::size_t i = 0; i < rr.eigenvalues.size(); ++i)
    for (std::size_t j = 0; j < zz.eigenvalues.size(); ++j)
      sums.emplace_back(rr.eigenvalues[i] + zz.eigenvalues[j], static_cast<int>(i), static_cast<int>(j));
  std::sort(sums.begin(), sums.end());
  if (sums.size() > static_cast<std::size_t>(k)) sums.resize(static_cast<std::size_t>(k));

  const auto& a = std::get<Sparse<Scalar>>(op.matrix);
  const Eigen::Index n = a.rows();
  SolveResult out;
  out.tol = cfg.tol;
  out.method = "separable";
  out.iterations = rr.iterations + zz.iterations;
  Mat<Scalar> vecs(n, static_cast<Eigen::Index>(sums.size()));
  Vec<Scalar> av(n);
  for (std::size_t c = 0; c < sums.size(); ++c) {
    const auto [value, i, j] = sums[c];
    const Vec<Scalar> u = column<Scalar>(rr.eigenvectors, i);
    const Vec<Scalar> w = column<Scalar>(zz.eigenvectors, j);
    Vec<Scalar> v(n);
    for (Eigen::Index p = 0; p < nr; ++p) v.segment(p * nz, nz) = u[p] * w;
    v.normalize();
    av.noalias() = a * v;
    const double lambda = std::real(v.dot(av));
    const double res = (av - lambda * v).norm();
    out.eigenvalues.push_back(lambda);
    out.residual_norms.push_back(res);
    out.converged.push_back(res <= cfg.tol && rr.converged[static_cast<std::size_t>(i)] &&
                            zz.converged[static_cast<std::size_t>(j)]);
    vecs.col(static_cast<Eigen::Index>(c)) = v;
  }
  out.eigenvectors = std::move(vecs);
  return out;
}

template <typename Scalar>
ResidualReport check_residuals(const Sparse<Scalar>& a, const SolveResult& result) {
  ResidualReport rep;
  const auto& vecs = std::get<Mat<Scalar>>(result.eigenvectors);
  double norm_est = 0.0;
  for (Eigen::Index c = 0; c < a.outerSize(); ++c) {
    double s = 0.0;
    for (typename Sparse<Scalar>::InnerIterator it(a, c); it; ++it) s += std::abs(it.value());
    norm_est = std::max(norm_est, s);
  }
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * norm_est;
  for (std::size_t i = 0; i < result.eigenvalues.size(); ++i) {
    Vec<Scalar> v = vecs.col(static_cast<Eigen::Index>(i));
    const double vn = v.norm();
    const Vec<Scalar> av = a * v;
    const double res = (av - result.eigenvalues[i] * v).norm() / vn;
    rep.recomputed.push_back(res);
    const double reported = result.residual_norms[i];
    const double ref = std::max(reported, noise);
    const bool flag = res > 10.0 * ref || (result.converged[i] && res > std::max(10.0 * result.tol, noise));
    rep.flagged.push_back(flag);
    if (flag) rep.ok = false;
  }
  return rep;
}

}  // namespace

SolveResult lowest_k(const HermitianSparse& matrix, const SolveConfig& cfg) { return solve_any(matrix, cfg); }

SolveResult lowest_k(const SectorOperator& op, const SolveConfig& cfg) {
  if (static_cast<std::size_t>(std::max(cfg.k, 0)) > op.dimension())
    throw UsageError("lowest_k: k exceeds the sector dimension");
  if (op.factors && cfg.use_separable_factors) {
    return op.is_complex() ? separable_solve<Complex>(op, cfg) : separable_solve<double>(op, cfg);
  }
  return solve_any(op.matrix, cfg);
}

std::vector<double> dense_reference(const HermitianSparse& matrix) {
  const HermitianDense dense = dense_materialize(matrix);
  return std::visit(
      [](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        Eigen::SelfAdjointEigenSolver<M> es(m, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw ConvergenceError("dense_reference: eigensolver failed", 0.0, 0.0);
        const auto& ev = es.eigenvalues();
        return std::vector<double>(ev.data(), ev.data() + ev.size());
      },
      dense);
}

std::vector<double> dense_reference(const SectorOperator& op) { return dense_reference(op.matrix); }

ResidualReport residual_check(const HermitianSparse& matrix, const SolveResult& result) {
  return std::visit([&](const auto& a) { return check_residuals(a, result); }, matrix);
}

ResidualReport residual_check(const SectorOperator& op, const SolveResult& result) {
  return residual_check(op.matrix, result);
}

}  // namespace landau
