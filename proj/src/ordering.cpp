#include "landau/ordering.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <thread>

namespace landau {

const SectorLevels& EnergySequence::at(int m) const {
  if (!contains(m)) throw UsageError("energy sequence has no sector m=" + std::to_string(m));
  return entries[static_cast<std::size_t>(m - m_min)];
}

bool EnergySequence::usable(int m, int n) const {
  if (!contains(m)) return false;
  const auto& e = at(m);
  if (e.excluded || n < 1 || static_cast<std::size_t>(n) > e.levels.size()) return false;
  return e.converged[static_cast<std::size_t>(n - 1)];
}

double EnergySequence::level(int m, int n) const {
  const auto& e = at(m);
  if (n < 1 || static_cast<std::size_t>(n) > e.levels.size())
    throw UsageError("sector m=" + std::to_string(m) + " has no level n=" + std::to_string(n));
  return e.levels[static_cast<std::size_t>(n - 1)];
}

double EnergySequence::residual(int m, int n) const {
  const auto& e = at(m);
  if (n < 1 || static_cast<std::size_t>(n) > e.residuals.size()) return 0.0;
  return e.residuals[static_cast<std::size_t>(n - 1)];
}

int EnergySequence::level_count() const {
  std::size_t count = std::numeric_limits<std::size_t>::max();
  for (const auto& e : entries) count = std::min(count, e.levels.size());
  return entries.empty() ? 0 : static_cast<int>(count);
}

bool EnergySequence::fully_converged() const {
  for (const auto& e : entries)
    if (e.excluded || !std::all_of(e.converged.begin(), e.converged.end(), [](bool c) { return c; })) return false;
  return true;
}

SweepFailure::SweepFailure(const std::string& what, EnergySequence partial)
    : ConvergenceError(what, 0.0, 0.0), partial_(std::move(partial)) {}

SectorLevels solve_sector(const GridPotential& pot, const FieldConfig& field, int m, std::optional<double> alpha,
                          const SweepOptions& opt, std::optional<double> hint) {
  const SectorOperator op = alpha ? assemble_bloch(pot, field, m, *alpha) : assemble(pot, field, m);
  SolveConfig cfg = opt.solver;
  cfg.k = opt.levels;
  if (hint && !cfg.shift) cfg.shift = hint;
  const SolveResult r = lowest_k(op, cfg);
  SectorLevels s;
  s.m = m;
  s.levels = r.eigenvalues;
  s.residuals = r.residual_norms;
  s.converged = r.converged;
  s.iterations = r.iterations;
  s.method = r.method;
  s.excluded = r.converged.empty() || !r.converged.front();
  return s;
}

EnergySequence sweep_sectors(const GridPotential& pot, const FieldConfig& field, const SweepOptions& opt,
                             std::optional<double> alpha) {
  if (opt.m_max < 0) throw UsageError("sweep: m_max must be >= 0");
  if (opt.levels < 1) throw UsageError("sweep: levels must be >= 1");
  if (opt.threads < 1) throw UsageError("sweep: threads must be >= 1");
  if (static_cast<std::size_t>(opt.levels) > pot.grid.dimension())
    throw UsageError("sweep: more levels requested than grid nodes");

  EnergySequence seq;
  seq.field = field;
  seq.alpha = alpha;
  seq.m_min = 0;
  seq.grid_digest = pot.grid.digest();
  seq.potential_digest = pot.spec_digest;
  const int count = opt.m_max + 1;
  seq.entries.resize(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));

  if (opt.hints == nullptr) {
    // Each sector seeds the pole of the next; inherently sequential.
    std::optional<double> hint;
    for (int m = 0; m < count; ++m) {
      auto& slot = seq.entries[static_cast<std::size_t>(m)];
      slot = solve_sector(pot, field, m, alpha, opt, hint);
      hint = slot.excluded ? std::nullopt : std::optional<double>(slot.levels.front());
    }
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (int m = next++; m < count; m = next++) {
        try {
          std::optional<double> hint;
          if (opt.hints->usable(m)) hint = opt.hints->ground(m);
          seq.entries[static_cast<std::size_t>(m)] = solve_sector(pot, field, m, alpha, opt, hint);
        } catch (...) {
          errors[static_cast<std::size_t>(m)] = std::current_exception();
        }
      }
    };
    const int workers = std::min(opt.threads, count);
    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  if (std::all_of(seq.entries.begin(), seq.entries.end(), [](const SectorLevels& s) { return s.excluded; }))
    throw SweepFailure("sweep: no sector converged", seq);
  return seq;
}

EnergySequence sweep_sectors(const PotentialSpec& spec, const FieldConfig& field, const Grid2D& grid,
                             const SweepOptions& options) {
  return sweep_sectors(sample_potential(spec, grid), field, options);
}

EnergySequence extend_negative_m(const EnergySequence& seq) {
  if (seq.m_min != 0) throw UsageError("extend_negative_m: sequence must start at m=0");
  EnergySequence out = seq;
  out.m_min = -seq.m_max();
  out.entries.clear();
  for (int m = seq.m_max(); m >= 1; --m) {
    SectorLevels s = seq.at(m);
    s.m = -m;
    for (double& e : s.levels) e += 2.0 * m * seq.field.B;
    out.entries.push_back(std::move(s));
  }
  for (const auto& e : seq.entries) out.entries.push_back(e);
  return out;
}

EnergySequence restrict_nonnegative(const EnergySequence& seq) {
  EnergySequence out = seq;
  out.entries.clear();
  out.m_min = 0;
  for (const auto& e : seq.entries)
    if (e.m >= 0) out.entries.push_back(e);
  return out;
}

bool OrderingReport::passed() const {
  return std::all_of(records.begin(), records.end(), [](const CheckRecord& r) { return !r.applicable || r.pass; });
}

double OrderingReport::max_tolerance() const {
  double t = 0.0;
  for (const auto& r : records)
    if (r.applicable) t = std::max(t, r.tol);
  return t;
}

std::size_t OrderingReport::count(const std::string& check, bool only_failed) const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [&](const CheckRecord& r) {
    return r.check == check && r.applicable && (!only_failed || !r.pass);
  }));
}

void OrderingReport::append(const OrderingReport& other) {
  hypothesis_met = hypothesis_met && other.hypothesis_met;
  records.insert(records.end(), other.records.begin(), other.records.end());
  notes.insert(notes.end(), other.notes.begin(), other.notes.end());
  if (other.turning_point) turning_point = other.turning_point;
  if (other.plateau_onset) plateau_onset = other.plateau_onset;
}

long double harmonic_number(int m) {
  if (m < 0) throw UsageError("harmonic_number: m must be >= 0");
  long double s = 0.0L;
  for (int mu = 1; mu <= m; ++mu) s += 1.0L / static_cast<long double>(mu);
  return s;
}

namespace {

struct Sides {
  double lhs;
  double rhs;
};

// An inequality lhs <= rhs built from solved levels. `weight` bounds how
// strongly eigenvalue errors of the listed sectors enter the margin.
struct Inequality {
  std::string check;
  int m = 0;
  int n = 1;
  std::optional<int> anchor;
  std::vector<std::pair<int, int>> sectors;  // (m, n)
  double weight = 1.0;
  std::function<Sides(const EnergySequence&)> sides;
};

bool all_usable(const EnergySequence& seq, const std::vector<std::pair<int, int>>& sectors) {
  return std::all_of(sectors.begin(), sectors.end(), [&](const auto& s) { return seq.usable(s.first, s.second); });
}

CheckRecord evaluate(const Inequality& q, const EnergySequence& seq, const TolerancePolicy& p) {
  CheckRecord r;
  r.check = q.check;
  r.m = q.m;
  r.n = q.n;
  r.anchor = q.anchor;
  r.alpha = seq.alpha;
  if (!all_usable(seq, q.sectors)) {
    r.applicable = false;
    r.note = "touches an unconverged sector";
    return r;
  }
  const Sides s = q.sides(seq);
  r.lhs = s.lhs;
  r.rhs = s.rhs;
  r.margin = s.rhs - s.lhs;

  double residual = 0.0;
  for (const auto& [m, n] : q.sectors) residual = std::max(residual, seq.residual(m, n));
  double budget = q.weight * residual;
  const double divisor = std::ldexp(1.0, p.order) - 1.0;
  if (p.coarse && all_usable(*p.coarse, q.sectors)) {
    const Sides c = q.sides(*p.coarse);
    budget += std::abs(r.margin - (c.rhs - c.lhs)) / divisor;
  }
  if (p.domain && all_usable(*p.domain, q.sectors)) {
    const Sides d = q.sides(*p.domain);
    budget += std::abs(r.margin - (d.rhs - d.lhs));
  }
  r.tol = std::max(p.floor, p.factor * budget);
  r.pass = r.margin >= -r.tol;
  r.strict = r.margin > r.tol;
  return r;
}

int first_nonnegative(const EnergySequence& seq) { return std::max(seq.m_min, 0); }

void require_entries(const EnergySequence& seq, const char* who) {
  if (seq.entries.empty()) throw UsageError(std::string(who) + ": empty energy sequence");
  for (std::size_t i = 0; i < seq.entries.size(); ++i)
    if (seq.entries[i].m != seq.m_min + static_cast<int>(i))
      throw UsageError(std::string(who) + ": sectors are not contiguous");
}

Inequality step_up(int m) {
  // E_{m-1} <= E_m
  Inequality q;
  q.check = "step";
  q.m = m;
  q.sectors = {{m - 1, 1}, {m, 1}};
  q.weight = 2.0;
  q.sides = [m](const EnergySequence& s) { return Sides{s.ground(m - 1), s.ground(m)}; };
  return q;
}

}  // namespace

OrderingReport check_local_inequalities(const EnergySequence& seq, const TolerancePolicy& policy) {
  require_entries(seq, "check_local_inequalities");
  OrderingReport rep;
  for (int m = std::max(1, seq.m_min + 1); m + 1 <= seq.m_max(); ++m) {
    const std::vector<std::pair<int, int>> sectors{{m - 1, 1}, {m, 1}, {m + 1, 1}};
    Inequality q;
    q.check = "pseudoconcavity";
    q.m = m;
    q.sectors = sectors;
    q.weight = 2.0;
    q.sides = [m](const EnergySequence& s) {
      return Sides{std::min(s.ground(m - 1), s.ground(m + 1)), s.ground(m)};
    };
    rep.records.push_back(evaluate(q, seq, policy));
    if (!all_usable(seq, sectors)) continue;

    if (seq.ground(m) >= seq.ground(m - 1)) {
      Inequality c;
      c.check = "concavity";
      c.m = m;
      c.sectors = sectors;
      c.weight = 2.0;
      c.sides = [m](const EnergySequence& s) {
        return Sides{0.5 * (s.ground(m - 1) + s.ground(m + 1)), s.ground(m)};
      };
      rep.records.push_back(evaluate(c, seq, policy));
    }
    if (seq.ground(m) >= seq.ground(m + 1)) {
      Inequality w;
      w.check = "weighted_concavity";
      w.m = m;
      w.sectors = sectors;
      w.weight = 2.0;
      w.sides = [m](const EnergySequence& s) {
        const double mm = m;
        return Sides{(mm * s.ground(m - 1) + (mm + 1.0) * s.ground(m + 1)) / (2.0 * mm + 1.0), s.ground(m)};
      };
      rep.records.push_back(evaluate(w, seq, policy));
    }
  }
  return rep;
}

OrderingReport tangential_upper_bounds(const EnergySequence& seq, int ell, const TolerancePolicy& policy) {
  require_entries(seq, "tangential_upper_bounds");
  const int lo = first_nonnegative(seq);
  if (ell < lo || ell + 1 > seq.m_max())
    throw UsageError("tangential_upper_bounds: anchor " + std::to_string(ell) + " outside the sequence");
  OrderingReport rep;
  if (!seq.usable(ell) || !seq.usable(ell + 1)) {
    rep.notes.push_back("tangential bound at anchor " + std::to_string(ell) + " skipped: unconverged anchor");
    return rep;
  }
  const bool increasing = seq.ground(ell) <= seq.ground(ell + 1);
  const bool decreasing = seq.ground(ell) >= seq.ground(ell + 1);
  for (int m = lo; m <= seq.m_max(); ++m) {
    if (increasing) {
      Inequality q;
      q.check = "tangential_increasing";
      q.m = m;
      q.anchor = ell;
      q.sectors = {{m, 1}, {ell, 1}, {ell + 1, 1}};
      q.weight = 1.0 + 2.0 * std::abs(m - ell) + 1.0;
      q.sides = [m, ell](const EnergySequence& s) {
        const double el = s.ground(ell);
        return Sides{s.ground(m), el + static_cast<double>(m - ell) * (s.ground(ell + 1) - el)};
      };
      rep.records.push_back(evaluate(q, seq, policy));
    }
    if (decreasing) {
      const long double dS = harmonic_number(m) - harmonic_number(ell);
      Inequality q;
      q.check = "tangential_decreasing";
      q.m = m;
      q.anchor = ell;
      q.sectors = {{m, 1}, {ell, 1}, {ell + 1, 1}};
      q.weight = 2.0 + 2.0 * std::abs(static_cast<double>(dS)) * (ell + 1);
      q.sides = [m, ell, dS](const EnergySequence& s) {
        const long double el = s.ground(ell);
        const long double bound = el + dS * static_cast<long double>(ell + 1) * (s.ground(ell + 1) - el);
        return Sides{s.ground(m), static_cast<double>(bound)};
      };
      rep.records.push_back(evaluate(q, seq, policy));
    }
  }
  return rep;
}

TurningPoint classify_turning_point(const EnergySequence& seq, const TolerancePolicy& policy, OrderingReport* out) {
  require_entries(seq, "classify_turning_point");
  const int lo = first_nonnegative(seq);
  int hi = lo;
  while (hi + 1 <= seq.m_max() && seq.usable(hi + 1)) ++hi;
  TurningPoint tp;
  if (!seq.usable(lo)) {
    tp.valid = false;
    if (out) out->notes.push_back("turning point: ground level at m=" + std::to_string(lo) + " unconverged");
    return tp;
  }
  if (out && hi < seq.m_max())
    out->notes.push_back("turning point classified on m=" + std::to_string(lo) + ".." + std::to_string(hi) +
                         " (next sector unconverged)");

  int M = lo;
  while (M + 1 <= hi && evaluate(step_up(M + 1), seq, policy).strict) ++M;
  tp.M = M;
  tp.reaches_end = M == hi;
  for (int m = M + 1; m <= hi; ++m) {
    Inequality q;
    q.check = "turning_point";
    q.m = m;
    q.sectors = {{m - 1, 1}, {m, 1}};
    q.weight = 2.0;
    q.sides = [m](const EnergySequence& s) { return Sides{s.ground(m), s.ground(m - 1)}; };
    CheckRecord r = evaluate(q, seq, policy);
    r.anchor = M;
    if (!r.pass) tp.valid = false;
    if (out) out->records.push_back(std::move(r));
  }
  if (out) out->turning_point = tp;
  return tp;
}

OrderingReport check_general_bound(const EnergySequence& seq, const TolerancePolicy& policy) {
  require_entries(seq, "check_general_bound");
  OrderingReport rep;
  const double B = seq.field.B;
  const int levels = seq.level_count();
  for (int n = 1; n <= levels; ++n) {
    for (int m = seq.m_min; m + 1 <= seq.m_max(); ++m) {
      Inequality q;
      q.check = "general_bound";
      q.m = m;
      q.n = n;
      q.sectors = {{m, n}, {m + 1, n}};
      q.weight = 2.0;
      q.sides = [m, n, B](const EnergySequence& s) { return Sides{s.level(m, n), s.level(m + 1, n) + B}; };
      rep.records.push_back(evaluate(q, seq, policy));
    }
  }
  return rep;
}

OrderingReport check_grosse_stubbe(const EnergySequence& seq, const PotentialSpec& spec, const TolerancePolicy& policy) {
  require_entries(seq, "check_grosse_stubbe");
  OrderingReport rep;
  const RadialSign sign = spec.radial_sign();
  if (sign == RadialSign::indefinite || sign == RadialSign::constant_in_r) {
    rep.notes.push_back(std::string("grosse_stubbe skipped: dV/dr_perp is ") + std::string(to_string(sign)));
    return rep;
  }
  const bool up = sign == RadialSign::nondecreasing_in_r;
  for (int m = first_nonnegative(seq); m + 1 <= seq.m_max(); ++m) {
    Inequality q;
    q.check = "grosse_stubbe";
    q.m = m;
    q.sectors = {{m, 1}, {m + 1, 1}};
    q.weight = 2.0;
    q.sides = [m, up](const EnergySequence& s) {
      return up ? Sides{s.ground(m), s.ground(m + 1)} : Sides{s.ground(m + 1), s.ground(m)};
    };
    rep.records.push_back(evaluate(q, seq, policy));
  }
  return rep;
}

OrderingReport check_delta_monotonicity(const EnergySequence& seq, const TolerancePolicy& policy) {
  require_entries(seq, "check_delta_monotonicity");
  OrderingReport rep;
  for (int m = std::max(1, seq.m_min + 1); m + 1 <= seq.m_max(); ++m) {
    const std::vector<std::pair<int, int>> sectors{{m - 1, 1}, {m, 1}, {m + 1, 1}};
    if (!all_usable(seq, sectors) || seq.ground(m) < seq.ground(m + 1)) continue;
    Inequality q;
    q.check = "delta_monotonicity";
    q.m = m;
    q.sectors = sectors;
    q.weight = 4.0 * m + 2.0;
    q.sides = [m](const EnergySequence& s) {
      const double mm = m;
      return Sides{(mm + 1.0) * (s.ground(m + 1) - s.ground(m)), mm * (s.ground(m) - s.ground(m - 1))};
    };
    rep.records.push_back(evaluate(q, seq, policy));
  }
  return rep;
}

bool is_finite_charge(const PotentialSpec& spec) {
  return std::all_of(spec.terms().begin(), spec.terms().end(), [](const PotentialTerm& t) {
    return std::holds_alternative<AxisCharge>(t) || std::holds_alternative<AxisSegment>(t) ||
           std::holds_alternative<SmearedCharge>(t);
  });
}

OrderingReport check_ground_state_zero(const EnergySequence& seq, const PotentialSpec& spec,
                                       const TolerancePolicy& policy) {
  require_entries(seq, "check_ground_state_zero");
  OrderingReport rep;
  if (!is_finite_charge(spec)) {
    rep.notes.push_back("ground_state_zero skipped: V does not decay at infinity, B is not the spectral edge");
    return rep;
  }
  if (seq.m_min > 0 || !seq.usable(0)) {
    rep.notes.push_back("ground_state_zero skipped: E_0 unavailable");
    return rep;
  }
  const double B = seq.field.B;
  Inequality below;
  below.check = "ground_below_edge";
  below.sectors = {{0, 1}};
  below.sides = [B](const EnergySequence& s) { return Sides{s.ground(0), B}; };
  const CheckRecord edge = evaluate(below, seq, policy);
  if (!edge.strict) {
    rep.notes.push_back("ground_state_zero skipped: E_0 not below B beyond tolerance");
    return rep;
  }
  for (int m = 1; m <= seq.m_max(); ++m) {
    Inequality q;
    q.check = "ground_state_zero";
    q.m = m;
    q.sectors = {{0, 1}, {m, 1}};
    q.weight = 2.0;
    q.sides = [m](const EnergySequence& s) { return Sides{s.ground(0), s.ground(m)}; };
    rep.records.push_back(evaluate(q, seq, policy));
  }
  return rep;
}

OrderingReport check_finite_charge(const EnergySequence& seq, const PotentialSpec& spec,
                                   const TolerancePolicy& policy) {
  require_entries(seq, "check_finite_charge");
  OrderingReport rep;
  if (!is_finite_charge(spec)) return rep;
  const int lo = first_nonnegative(seq);
  for (int m = lo; m + 1 <= seq.m_max(); ++m) {
    Inequality q = step_up(m + 1);
    q.check = "finite_charge_nondecreasing";
    q.m = m;
    rep.records.push_back(evaluate(q, seq, policy));
  }
  if (!(spec.repulsive_charge() > spec.attractive_charge())) return rep;

  // Net repulsion: no bound states for large m, levels sit at the edge B.
  const double B = seq.field.B;
  std::vector<CheckRecord> edge;
  for (int m = lo; m <= seq.m_max(); ++m) {
    Inequality q;
    q.check = "plateau";
    q.m = m;
    q.sectors = {{m, 1}};
    q.sides = [m, B](const EnergySequence& s) { return Sides{std::abs(s.ground(m) - B), 0.0}; };
    edge.push_back(evaluate(q, seq, policy));
  }
  int onset = seq.m_max() + 1;
  while (onset - 1 >= lo && edge[static_cast<std::size_t>(onset - 1 - lo)].applicable &&
         edge[static_cast<std::size_t>(onset - 1 - lo)].pass)
    --onset;
  if (onset < seq.m_max()) {
    rep.plateau_onset = onset;
    for (int m = onset; m <= seq.m_max(); ++m) rep.records.push_back(edge[static_cast<std::size_t>(m - lo)]);
  } else {
    CheckRecord r = edge.back();
    r.pass = false;
    r.note = "no plateau at B within tolerance over two or more trailing sectors";
    rep.records.push_back(r);
  }
  return rep;
}

LogFit fit_log_asymptote(const std::vector<int>& ms, const std::vector<double>& energies) {
  if (ms.size() != energies.size()) throw UsageError("fit_log_asymptote: size mismatch");
  if (ms.size() < 8) throw UsageError("fit_log_asymptote: window needs at least 8 points");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (ms[i] < 1) throw UsageError("fit_log_asymptote: m must be >= 1");
    if (i > 0 && !(energies[i] < energies[i - 1]))
      throw UsageError("fit_log_asymptote: sequence not decreasing at m=" + std::to_string(ms[i]));
  }
  const double n = static_cast<double>(ms.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    sx += std::log(static_cast<double>(ms[i]));
    sy += energies[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const double dx = std::log(static_cast<double>(ms[i])) - mx;
    sxx += dx * dx;
    sxy += dx * (energies[i] - my);
  }
  LogFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const double d = energies[i] - (f.intercept + f.slope * std::log(static_cast<double>(ms[i])));
    ss += d * d;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

LogFit fit_log_asymptote(const EnergySequence& seq, int m_lo, int m_hi) {
  if (m_lo < 1 || m_hi > seq.m_max() || m_lo < seq.m_min) throw UsageError("fit_log_asymptote: window outside sequence");
  std::vector<int> ms;
  std::vector<double> es;
  for (int m = m_lo; m <= m_hi; ++m) {
    if (!seq.usable(m)) throw UsageError("fit_log_asymptote: sector m=" + std::to_string(m) + " unconverged");
    ms.push_back(m);
    es.push_back(seq.ground(m));
  }
  return fit_log_asymptote(ms, es);
}

OrderingReport least_slack_per_anchor(const OrderingReport& from) {
  OrderingReport into;
  into.hypothesis_met = from.hypothesis_met;
  std::map<std::pair<std::string, int>, std::pair<CheckRecord, int>> worst;
  for (const auto& r : from.records) {
    if (!r.applicable) continue;
    const auto key = std::make_pair(r.check, r.anchor.value_or(0));
    auto it = worst.find(key);
    if (it == worst.end()) {
      worst.emplace(key, std::make_pair(r, 1));
    } else {
      ++it->second.second;
      if (r.margin + r.tol < it->second.first.margin + it->second.first.tol || (!r.pass && it->second.first.pass))
        it->second.first = r;
    }
  }
  for (auto& [key, entry] : worst) {
    CheckRecord r = entry.first;
    r.note = "least slack of " + std::to_string(entry.second) + " values of m";
    into.records.push_back(std::move(r));
  }
  into.notes = from.notes;
  return into;
}

OrderingReport verify_sequence(const EnergySequence& seq, const PotentialSpec& spec, const TolerancePolicy& policy) {
  require_entries(seq, "verify_sequence");
  OrderingReport rep;
  rep.hypothesis_met = spec.certificate() != Certificate::not_superharmonic;
  rep.append(check_local_inequalities(seq, policy));
  for (int ell = first_nonnegative(seq); ell + 1 <= seq.m_max(); ++ell)
    rep.append(least_slack_per_anchor(tangential_upper_bounds(seq, ell, policy)));
  classify_turning_point(seq, policy, &rep);
  rep.append(check_delta_monotonicity(seq, policy));
  rep.append(check_grosse_stubbe(seq, spec, policy));
  rep.append(check_ground_state_zero(seq, spec, policy));
  rep.append(check_finite_charge(seq, spec, policy));
  if (rep.turning_point && !rep.turning_point->valid) {
    CheckRecord r;
    r.check = "turning_point_pattern";
    r.m = rep.turning_point->M;
    r.pass = false;
    r.note = "increase after a decrease beyond tolerance";
    rep.records.push_back(r);
  }
  if (!rep.hypothesis_met) {
    rep.notes.push_back("hypothesis not met (potential not superharmonic off axis): ordering checks are informational");
    for (auto& r : rep.records) r.applicable = false;
  }
  // The bound on the decrease holds for every potential.
  rep.append(check_general_bound(seq, policy));
  return rep;
}

}  // namespace landau
