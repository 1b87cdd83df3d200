#include "landau/sector_operator.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "landau/errors.hpp"

namespace landau {

namespace {

bool is_real_phase(double alpha) { return std::abs(std::sin(alpha)) < 1e-15; }

double adjoint(double x) { return x; }
Complex adjoint(const Complex& x) { return std::conj(x); }

// Persisted samples for the expensive periodic potentials.
std::optional<std::filesystem::path> cache_file(const PotentialSpec& spec, const Grid2D& grid) {
  const char* dir = std::getenv("LANDAU_ORDER_CACHE");
  if (dir == nullptr || *dir == '\0' || !spec.is_periodic()) return std::nullopt;
  const std::string key = spec.digest() + "|" + grid.digest();
  char name[64];
  std::snprintf(name, sizeof name, "chain_%016zx.bin", std::hash<std::string>()(key));
  return std::filesystem::path(dir) / name;
}

bool load_cached(const std::filesystem::path& path, const std::string& key, std::vector<double>& values) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::uint64_t key_size = 0;
  std::uint64_t count = 0;
  if (!in.read(reinterpret_cast<char*>(&key_size), sizeof key_size)) return false;
  std::string stored(key_size, '\0');
  if (!in.read(stored.data(), static_cast<std::streamsize>(key_size)) || stored != key) return false;
  if (!in.read(reinterpret_cast<char*>(&count), sizeof count) || count != values.size()) return false;
  return static_cast<bool>(in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double))));
}

void store_cached(const std::filesystem::path& path, const std::string& key, const std::vector<double>& values) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) return;
    const std::uint64_t key_size = key.size();
    const std::uint64_t count = values.size();
    out.write(reinterpret_cast<const char*>(&key_size), sizeof key_size);
    out.write(key.data(), static_cast<std::streamsize>(key_size));
    out.write(reinterpret_cast<const char*>(&count), sizeof count);
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  }
  std::filesystem::rename(tmp, path, ec);
}

template <typename Scalar>
double gershgorin(const Eigen::SparseMatrix<Scalar>& a) {
  std::vector<double> center(static_cast<std::size_t>(a.rows()), 0.0);
  std::vector<double> radius(static_cast<std::size_t>(a.rows()), 0.0);
  for (int k = 0; k < a.outerSize(); ++k) {
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(a, k); it; ++it) {
      if (it.row() == it.col())
        center[static_cast<std::size_t>(it.row())] += std::real(it.value());
      else
        radius[static_cast<std::size_t>(it.row())] += std::abs(it.value());
    }
  }
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < center.size(); ++i) lo = std::min(lo, center[i] - radius[i]);
  return lo;
}

struct Stencil {
  std::vector<double> radial_diag;  // kinetic + Landau + centrifugal, per i
  std::vector<double> radial_off;   // coupling (i, i+1)
  std::vector<double> axial_diag;   // kinetic, per j
  double axial_off;                 // coupling (j, j+1)
};

Stencil make_stencil(const Grid2D& g, const FieldConfig& field, int m) {
  Stencil s;
  const double hr2 = g.h_r * g.h_r;
  const double B = field.B;
  s.radial_diag.resize(static_cast<std::size_t>(g.n_r));
  s.radial_off.resize(static_cast<std::size_t>(std::max(0, g.n_r - 1)));
  for (int i = 0; i < g.n_r; ++i) {
    const double r = g.r(i);
    // Flux form with face radii i h and (i+1) h: the diagonal is 2/h^2 for every
    // node, including i = 0 where the inner face has zero radius.
    s.radial_diag[static_cast<std::size_t>(i)] =
        2.0 / hr2 + 0.25 * B * B * r * r + static_cast<double>(m) * m / (r * r) - m * B;
    if (i + 1 < g.n_r) {
      const double ii = i;
      s.radial_off[static_cast<std::size_t>(i)] = -(ii + 1.0) / (hr2 * std::sqrt((ii + 0.5) * (ii + 1.5)));
    }
  }
  const double hz2 = g.h_z * g.h_z;
  s.axial_diag.assign(static_cast<std::size_t>(g.n_z), 2.0 / hz2);
  if (!g.periodic) {
    s.axial_diag.front() = 1.0 / hz2;
    s.axial_diag.back() = 1.0 / hz2;
  }
  s.axial_off = -1.0 / hz2;
  return s;
}

template <typename Scalar>
Eigen::SparseMatrix<Scalar> build_matrix(const Grid2D& g, const Stencil& s, const GridPotential& pot,
                                         Scalar wrap_phase) {
  using Triplet = Eigen::Triplet<Scalar>;
  std::vector<Triplet> t;
  t.reserve(g.dimension() * (g.periodic ? 5 : 5));
  const bool sep = pot.z_separable;
  for (int i = 0; i < g.n_r; ++i) {
    for (int j = 0; j < g.n_z; ++j) {
      const auto p = static_cast<int>(g.index(i, j));
      const auto iu = static_cast<std::size_t>(i);
      const auto ju = static_cast<std::size_t>(j);
      // Separable potentials keep the diagonal an exact sum of the two factor
      // diagonals, so A = R (x) I + I (x) Z holds entrywise.
      const double diag = sep ? (s.radial_diag[iu] + pot.radial_part[iu]) + (s.axial_diag[ju] + pot.axial_part[ju])
                              : s.radial_diag[iu] + s.axial_diag[ju] + pot.values[g.index(i, j)];
      t.emplace_back(p, p, Scalar(diag));
      if (i + 1 < g.n_r) {
        const auto q = static_cast<int>(g.index(i + 1, j));
        t.emplace_back(p, q, Scalar(s.radial_off[iu]));
        t.emplace_back(q, p, Scalar(s.radial_off[iu]));
      }
      if (j + 1 < g.n_z) {
        const auto q = static_cast<int>(g.index(i, j + 1));
        t.emplace_back(p, q, Scalar(s.axial_off));
        t.emplace_back(q, p, Scalar(s.axial_off));
      }
    }
    if (g.periodic) {
      // psi_{n_z} = e^{i alpha} psi_0 enters row n_z - 1; its adjoint enters row 0.
      const auto last = static_cast<int>(g.index(i, g.n_z - 1));
      const auto first = static_cast<int>(g.index(i, 0));
      const Scalar forward = Scalar(s.axial_off) * wrap_phase;
      t.emplace_back(last, first, forward);
      t.emplace_back(first, last, adjoint(forward));
    }
  }
  const auto n = static_cast<Eigen::Index>(g.dimension());
  Eigen::SparseMatrix<Scalar> a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

template <typename Scalar>
Eigen::SparseMatrix<Scalar> build_factor(int n, const std::vector<double>& diag, const std::vector<double>& extra,
                                         const std::vector<double>& off, double uniform_off, bool wrap,
                                         Scalar wrap_phase) {
  using Triplet = Eigen::Triplet<Scalar>;
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    t.emplace_back(i, i, Scalar(diag[iu] + extra[iu]));
    if (i + 1 < n) {
      const double c = off.empty() ? uniform_off : off[iu];
      t.emplace_back(i, i + 1, Scalar(c));
      t.emplace_back(i + 1, i, Scalar(c));
    }
  }
  if (wrap) {
    const Scalar forward = Scalar(uniform_off) * wrap_phase;
    t.emplace_back(n - 1, 0, forward);
    t.emplace_back(0, n - 1, adjoint(forward));
  }
  Eigen::SparseMatrix<Scalar> a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

SectorOperator assemble_impl(const GridPotential& pot, const FieldConfig& field, int m, std::optional<double> alpha) {
  if (m < 0) throw UsageError("assemble: m must be >= 0 (use the negative-m identity for m < 0)");
  if (!(field.B > 0)) throw UsageError("assemble: B must be > 0");
  const Grid2D& g = pot.grid;
  const Stencil s = make_stencil(g, field, m);

  SectorOperator op;
  op.m = m;
  op.alpha = alpha;
  op.field = field;
  op.grid = g;
  op.potential_digest = pot.spec_digest;
  op.weight.resize(g.dimension());
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.n_z; ++j) op.weight[g.index(i, j)] = g.r(i) * g.h_r * g.h_z;

  const bool real = !alpha || is_real_phase(*alpha);
  auto factors = std::make_shared<SeparableFactors>();
  if (real) {
    const double phase = alpha ? std::cos(*alpha) : 1.0;
    op.matrix = build_matrix<double>(g, s, pot, phase);
    if (pot.z_separable) {
      factors->radial = build_factor<double>(g.n_r, s.radial_diag, pot.radial_part, s.radial_off, 0.0, false, 1.0);
      factors->axial = build_factor<double>(g.n_z, s.axial_diag, pot.axial_part, {}, s.axial_off, g.periodic, phase);
    }
  } else {
    const Complex phase = std::polar(1.0, *alpha);
    op.matrix = build_matrix<Complex>(g, s, pot, phase);
    if (pot.z_separable) {
      factors->radial =
          build_factor<Complex>(g.n_r, s.radial_diag, pot.radial_part, s.radial_off, 0.0, false, Complex(1.0));
      factors->axial = build_factor<Complex>(g.n_z, s.axial_diag, pot.axial_part, {}, s.axial_off, g.periodic, phase);
    }
  }
  if (pot.z_separable) op.factors = std::move(factors);
  return op;
}

template <typename Scalar>
void write_mm(std::ostream& out, const Eigen::SparseMatrix<Scalar>& a) {
  constexpr bool cplx = !std::is_same_v<Scalar, double>;
  std::size_t count = 0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(a, k); it; ++it)
      if (it.row() >= it.col()) ++count;
  out << "%%MatrixMarket matrix coordinate " << (cplx ? "complex hermitian" : "real symmetric") << '\n';
  out << a.rows() << ' ' << a.cols() << ' ' << count << '\n';
  char buf[128];
  for (int k = 0; k < a.outerSize(); ++k) {
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(a, k); it; ++it) {
      if (it.row() < it.col()) continue;
      if constexpr (cplx)
        std::snprintf(buf, sizeof buf, "%ld %ld %.17g %.17g\n", static_cast<long>(it.row() + 1),
                      static_cast<long>(it.col() + 1), it.value().real(), it.value().imag());
      else
        std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", static_cast<long>(it.row() + 1),
                      static_cast<long>(it.col() + 1), it.value());
      out << buf;
    }
  }
}

template <typename Scalar>
HermitianDense to_dense(const Eigen::SparseMatrix<Scalar>& a) {
  if (static_cast<std::size_t>(a.rows()) > kDenseDimensionCap)
    throw ResourceError("dense materialization limited to dimension " + std::to_string(kDenseDimensionCap));
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(a);
  return d;
}

}  // namespace

GridPotential sample_potential(const PotentialSpec& spec, const Grid2D& grid) {
  GridPotential pot;
  pot.grid = grid;
  pot.spec_digest = spec.digest();
  pot.values.resize(grid.dimension());
  pot.z_separable = spec.is_z_separable();
  if (pot.z_separable) {
    pot.radial_part.assign(static_cast<std::size_t>(grid.n_r), 0.0);
    pot.axial_part.assign(static_cast<std::size_t>(grid.n_z), 0.0);
    for (const auto& t : spec.terms()) {
      if (const auto* h = std::get_if<SeparableHarmonic>(&t)) {
        for (int i = 0; i < grid.n_r; ++i) pot.radial_part[static_cast<std::size_t>(i)] += h->c_perp * grid.r(i) * grid.r(i);
        for (int j = 0; j < grid.n_z; ++j)
          pot.axial_part[static_cast<std::size_t>(j)] += h->omega_z * h->omega_z * grid.z(j) * grid.z(j);
      } else {
        for (int i = 0; i < grid.n_r; ++i) pot.radial_part[static_cast<std::size_t>(i)] += evaluate_term(t, grid.r(i), 0.0);
      }
    }
    for (int i = 0; i < grid.n_r; ++i)
      for (int j = 0; j < grid.n_z; ++j)
        pot.values[grid.index(i, j)] = pot.radial_part[static_cast<std::size_t>(i)] + pot.axial_part[static_cast<std::size_t>(j)];
    return pot;
  }

  const auto file = cache_file(spec, grid);
  const std::string key = spec.digest() + "|" + grid.digest();
  if (file && load_cached(*file, key, pot.values)) return pot;
  for (int i = 0; i < grid.n_r; ++i) {
    for (int j = 0; j < grid.n_z; ++j) {
      try {
        pot.values[grid.index(i, j)] = evaluate(spec, grid.r(i), grid.z(j));
      } catch (const DomainError& e) {
        std::ostringstream os;
        os << e.what() << " [node i=" << i << ", j=" << j << "]";
        throw DomainError(os.str());
      }
    }
  }
  if (file) store_cached(*file, key, pot.values);
  return pot;
}

double SectorOperator::gershgorin_lower_bound() const {
  return std::visit([](const auto& a) { return gershgorin(a); }, matrix);
}

SectorOperator assemble(const GridPotential& potential, const FieldConfig& field, int m) {
  return assemble_impl(potential, field, m, std::nullopt);
}

SectorOperator assemble(const PotentialSpec& spec, const FieldConfig& field, int m, const Grid2D& grid) {
  return assemble(sample_potential(spec, grid), field, m);
}

SectorOperator assemble_bloch(const GridPotential& potential, const FieldConfig& field, int m, double alpha) {
  if (!potential.grid.periodic) throw UsageError("assemble_bloch: grid is not periodic");
  if (!std::isfinite(alpha)) throw UsageError("assemble_bloch: alpha must be finite");
  return assemble_impl(potential, field, m, alpha);
}

SectorOperator assemble_bloch(const PotentialSpec& spec, const FieldConfig& field, int m, double alpha,
                              const Grid2D& grid) {
  if (!grid.periodic) throw UsageError("assemble_bloch: grid is not periodic");
  return assemble_bloch(sample_potential(spec, grid), field, m, alpha);
}

HermitianDense dense_materialize(const HermitianSparse& matrix) {
  return std::visit([](const auto& a) { return to_dense(a); }, matrix);
}

HermitianDense dense_materialize(const SectorOperator& op) { return dense_materialize(op.matrix); }

void write_matrix_market(std::ostream& out, const HermitianSparse& matrix) {
  std::visit([&](const auto& a) { write_mm(out, a); }, matrix);
}

HermitianSparse read_matrix_market(std::istream& in) {
  std::string header;
  std::getline(in, header);
  const bool cplx = header.find("complex") != std::string::npos;
  if (header.rfind("%%MatrixMarket matrix coordinate", 0) != 0)
    throw UsageError("matrix market: unsupported header '" + header + "'");
  std::string line;
  while (std::getline(in, line) && (line.empty() || line[0] == '%')) {
  }
  std::istringstream dims(line);
  long rows = 0, cols = 0, count = 0;
  dims >> rows >> cols >> count;
  if (rows <= 0 || rows != cols) throw UsageError("matrix market: expected a square matrix");
  auto parse = [](const std::string& s) { return std::strtod(s.c_str(), nullptr); };
  if (cplx) {
    std::vector<Eigen::Triplet<Complex>> t;
    for (long k = 0; k < count; ++k) {
      long i, j;
      std::string re, im;
      in >> i >> j >> re >> im;
      const Complex v(parse(re), parse(im));
      t.emplace_back(i - 1, j - 1, v);
      if (i != j) t.emplace_back(j - 1, i - 1, std::conj(v));
    }
    ComplexSparse a(rows, cols);
    a.setFromTriplets(t.begin(), t.end());
    a.makeCompressed();
    return a;
  }
  std::vector<Eigen::Triplet<double>> t;
  for (long k = 0; k < count; ++k) {
    long i, j;
    std::string v;
    in >> i >> j >> v;
    t.emplace_back(i - 1, j - 1, parse(v));
    if (i != j) t.emplace_back(j - 1, i - 1, parse(v));
  }
  RealSparse a(rows, cols);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

}  // namespace landau
