#pragma once

#include <optional>
#include <string>
#include <vector>

#include "landau/eigensolve.hpp"
#include "landau/errors.hpp"
#include "landau/grid.hpp"
#include "landau/sector_operator.hpp"

namespace landau {

/// Solved levels of one angular momentum sector. Levels are 1-based in the
/// accessors below and ascending.
struct SectorLevels {
  int m = 0;
  std::vector<double> levels;
  std::vector<double> residuals;
  std::vector<bool> converged;
  bool excluded = false;  // ground level unconverged; every check touching it is skipped
  int iterations = 0;
  std::string method;
};

struct EnergySequence {
  FieldConfig field;
  std::optional<double> alpha;
  int m_min = 0;
  std::vector<SectorLevels> entries;  // entries[i] holds m = m_min + i
  std::string grid_digest;
  std::string potential_digest;

  int m_max() const { return m_min + static_cast<int>(entries.size()) - 1; }
  bool contains(int m) const { return m >= m_min && m <= m_max(); }
  const SectorLevels& at(int m) const;
  bool usable(int m, int n = 1) const;
  double level(int m, int n = 1) const;
  double residual(int m, int n = 1) const;
  double ground(int m) const { return level(m, 1); }
  int level_count() const;
  bool fully_converged() const;
};

struct SweepOptions {
  int m_max = 10;
  int levels = 1;
  SolveConfig solver;
  int threads = 1;
  // Shift-invert poles per m, typically the same sweep on a coarser grid.
  // Without hints the sectors are solved in order and each one seeds the next.
  const EnergySequence* hints = nullptr;
};

/// Thrown when no sector converged; carries the flagged sequence.
class SweepFailure : public ConvergenceError {
 public:
  SweepFailure(const std::string& what, EnergySequence partial);
  const EnergySequence& partial() const { return partial_; }

 private:
  EnergySequence partial_;
};

/// One sector: opt.levels lowest levels, `hint` as shift-invert pole.
SectorLevels solve_sector(const GridPotential& potential, const FieldConfig& field, int m, std::optional<double> alpha,
                          const SweepOptions& options, std::optional<double> hint = std::nullopt);

EnergySequence sweep_sectors(const GridPotential& potential, const FieldConfig& field, const SweepOptions& options,
                             std::optional<double> alpha = std::nullopt);
EnergySequence sweep_sectors(const PotentialSpec& spec, const FieldConfig& field, const Grid2D& grid,
                             const SweepOptions& options);

/// E_{-m,n} = E_{m,n} + 2 m B over -m_max..m_max.
EnergySequence extend_negative_m(const EnergySequence& seq);

/// Restriction to m >= 0 (inverse of extend_negative_m).
EnergySequence restrict_nonnegative(const EnergySequence& seq);

/// Error budget of a check: factor * (residuals of the sectors involved
/// + |margin - margin_coarse| / (2^order - 1) + |margin - margin_domain|).
/// The coarse companion is the same sweep one resolution level down; the
/// domain companion is the same sweep in a different box.
struct TolerancePolicy {
  double factor = 5.0;
  double floor = 1e-10;
  int order = 2;
  const EnergySequence* coarse = nullptr;
  const EnergySequence* domain = nullptr;
};

struct CheckRecord {
  std::string check;
  int m = 0;
  int n = 1;
  std::optional<int> anchor;
  std::optional<double> alpha;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs; the check asserts lhs <= rhs
  double tol = 0.0;
  bool pass = true;     // margin >= -tol
  bool strict = false;  // margin > tol
  bool applicable = true;
  std::string note;
};

struct TurningPoint {
  int M = 0;
  bool valid = true;
  bool reaches_end = false;  // increasing up to m_max; M may be larger
};

struct OrderingReport {
  bool hypothesis_met = true;
  std::vector<CheckRecord> records;
  std::vector<std::string> notes;
  std::optional<TurningPoint> turning_point;
  std::optional<int> plateau_onset;

  bool passed() const;
  double max_tolerance() const;
  std::size_t count(const std::string& check, bool only_failed = false) const;
  void append(const OrderingReport& other);
};

/// S_m = sum_{mu=1}^m 1/mu in long double; S_0 = 0.
long double harmonic_number(int m);

/// E_m >= min(E_{m-1}, E_{m+1}) for interior m >= 1; concavity when
/// E_m >= E_{m-1}; the (2m+1)-weighted form when E_m >= E_{m+1}.
OrderingReport check_local_inequalities(const EnergySequence& seq, const TolerancePolicy& policy);

/// Upper envelope from E_ell and E_{ell+1} over every m of the sequence.
OrderingReport tangential_upper_bounds(const EnergySequence& seq, int ell, const TolerancePolicy& policy);

/// Largest M with E_0..E_M strictly increasing (each step beyond its
/// tolerance) and E_M.. non-increasing within tolerance.
TurningPoint classify_turning_point(const EnergySequence& seq, const TolerancePolicy& policy,
                                    OrderingReport* records = nullptr);

/// E_{m,n} <= E_{m+1,n} + B for every m and level.
OrderingReport check_general_bound(const EnergySequence& seq, const TolerancePolicy& policy);

/// Strict monotonicity from the sign of dV/dr_perp.
OrderingReport check_grosse_stubbe(const EnergySequence& seq, const PotentialSpec& spec,
                                   const TolerancePolicy& policy);

/// (m+1) Delta_{m+1} <= m Delta_m wherever E_m >= E_{m+1}, Delta_m = E_m - E_{m-1}.
OrderingReport check_delta_monotonicity(const EnergySequence& seq, const TolerancePolicy& policy);

/// E_0 <= E_m for all m, applied when E_0 lies below B and V decays at infinity.
OrderingReport check_ground_state_zero(const EnergySequence& seq, const PotentialSpec& spec,
                                       const TolerancePolicy& policy);

/// Finite-charge potentials: non-decreasing sequence; with more repulsive
/// than attractive charge the levels settle at B from some finite M on.
OrderingReport check_finite_charge(const EnergySequence& seq, const PotentialSpec& spec,
                                   const TolerancePolicy& policy);

struct LogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS deviation
};

/// Least squares of E_m against ln m over [m_lo, m_hi] (>= 8 points,
/// strictly decreasing).
LogFit fit_log_asymptote(const EnergySequence& seq, int m_lo, int m_hi);
LogFit fit_log_asymptote(const std::vector<int>& ms, const std::vector<double>& energies);

/// True when no term keeps V from decaying at infinity.
bool is_finite_charge(const PotentialSpec& spec);

/// Keeps the least-slack record per (check, anchor); used for the O(m^2)
/// tangential family.
OrderingReport least_slack_per_anchor(const OrderingReport& report);

/// Every applicable check of the battery for one sequence.
OrderingReport verify_sequence(const EnergySequence& seq, const PotentialSpec& spec, const TolerancePolicy& policy);

}  // namespace landau
