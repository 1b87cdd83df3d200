#pragma once

// Axially symmetric external potentials V(r, z) with closed-form evaluation
// and symbolic certificates for the sign of the off-axis Laplacian and of
// the radial derivative.
//
// Sign convention: axis charges are attractive (-q/|x - z_i e_z|), smeared
// charges are repulsive (+rho * 1/|x|), the hollow tube contributes
// -tau ln(r/R) outside its radius.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace landau {

struct AxisCharge {
  double position = 0.0;
  double charge = 1.0;
};

struct AxisSegment {
  double z_lo = -1.0;
  double z_hi = 1.0;
  double linear_density = 0.0;
};

/// Uniformly charged ball centered on the axis.
struct SmearedCharge {
  double center_z = 0.0;
  double radius = 1.0;
  double total_charge = 0.0;
};

struct HollowTube {
  double tau = 1.0;
  double radius = 1.0;
};

/// c_perp r^2 + omega_z^2 z^2. Used to validate the solver against exact
/// oscillator spectra; never superharmonic when c_perp > 0.
struct SeparableHarmonic {
  double c_perp = 0.0;
  double omega_z = 0.0;
};

/// Infinite chain: one attractive nucleus per cell at z = n a and a smeared
/// repulsive ball centered at z = n a + a/2. The lattice sum is renormalized
/// by the per-cell charge deficit.
struct PeriodicChainSpec {
  double period = 1.0;
  double nucleus_charge = 1.0;
  SmearedCharge smeared{};  // center_z is relative to the cell origin
  double deficit = 0.0;     // nucleus_charge - smeared.total_charge

  static PeriodicChainSpec make(double period, double nucleus_charge, double smeared_radius,
                                double smeared_charge);
};

using PotentialTerm = std::variant<AxisCharge, AxisSegment, SmearedCharge, HollowTube,
                                   SeparableHarmonic, PeriodicChainSpec>;

enum class Certificate { superharmonic_off_axis, transverse_superharmonic_off_axis, not_superharmonic };

/// Sign of dV/dr_perp. `constant_in_r` covers V independent of r_perp (e.g. V = 0).
enum class RadialSign { nondecreasing_in_r, nonincreasing_in_r, indefinite, constant_in_r };

std::string_view to_string(Certificate c);
std::string_view to_string(RadialSign s);

/// Memo of lattice-sum values keyed by (r, z mod a) rounded to 1e-9.
/// Safe for concurrent readers and writers.
class ChainSumCache {
 public:
  ChainSumCache();
  ~ChainSumCache();
  ChainSumCache(const ChainSumCache&) = delete;
  ChainSumCache& operator=(const ChainSumCache&) = delete;

  std::optional<double> find(double r, double z) const;
  void store(double r, double z, double value);
  std::size_t size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class PotentialSpec {
 public:
  PotentialSpec();
  explicit PotentialSpec(std::vector<PotentialTerm> terms);

  const std::vector<PotentialTerm>& terms() const { return terms_; }
  Certificate certificate() const { return certificate_; }
  RadialSign radial_sign() const { return radial_sign_; }

  bool is_periodic() const { return chain_index_.has_value(); }
  const PeriodicChainSpec& chain() const;

  /// True when V(r, z) = V_r(r) + V_z(z) holds structurally.
  bool is_z_separable() const;

  /// Total attractive axis charge Z and repulsive smeared charge C of the
  /// finite-charge terms.
  double attractive_charge() const;
  double repulsive_charge() const;

  /// Stable textual description, used as a provenance digest.
  std::string digest() const;

  ChainSumCache& chain_cache() const { return *cache_; }

 private:
  std::vector<PotentialTerm> terms_;
  Certificate certificate_;
  RadialSign radial_sign_;
  std::optional<std::size_t> chain_index_;
  std::shared_ptr<ChainSumCache> cache_;
};

/// Default tolerance of the renormalized lattice sum.
inline constexpr double kChainSumTolerance = 1e-10;
inline constexpr long kChainSumMaxCells = 1L << 20;

double evaluate(const PotentialSpec& spec, double r, double z);

/// Value of a single term. Throws DomainError for r <= 0 or a non-finite value.
double evaluate_term(const PotentialTerm& term, double r, double z);

/// lim_N [ sum_{|n| <= N} cell(n) + (2 D / a) ln N ], evaluated by doubling N.
/// The two outermost cells carry weight 1/2 (trapezoidal partial sums), which
/// does not change the limit.
double renormalized_chain_sum(const PeriodicChainSpec& chain, double r, double z,
                              double tol = kChainSumTolerance);

Certificate transverse_laplacian_certificate(const PotentialSpec& spec);
RadialSign radial_sign(const PotentialSpec& spec);

enum class LaplacianKind { full, transverse };

struct ScanRegion {
  double r_min = 1.0;
  double r_max = 5.0;
  double z_min = -5.0;
  double z_max = 5.0;
};

struct ScanOptions {
  int samples = 21;            // lattice points per direction
  double stencil = 1e-3;       // finite-difference step
  double tolerance = 1e-4;     // discrete Laplacian above this is a violation
  double surface_margin = -1;  // exclusion band around distributional surfaces; < 0 = 3 stencils
  LaplacianKind kind = LaplacianKind::full;
};

struct ScanPoint {
  double r;
  double z;
  double laplacian;
};

struct ScanReport {
  double min_discrete_laplacian = 0.0;
  double max_discrete_laplacian = 0.0;
  std::size_t points_evaluated = 0;
  std::vector<ScanPoint> violation_points;
};

/// Samples the discrete Laplacian (Cartesian 7-point stencil) on a lattice in
/// the region, skipping bands around surfaces where the Laplacian is a
/// surface distribution (tube radius, ball boundaries).
ScanReport numerical_superharmonicity_scan(const PotentialSpec& spec, const ScanRegion& region,
                                           const ScanOptions& options = {});

}  // namespace landau
