#include "landau/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

#include "landau/errors.hpp"

namespace landau {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Potential of a uniformly charged ball of unit-normalized density, at
// distance s from its center.
double ball_potential(double charge, double radius, double s) {
  if (s < radius) return charge * (3.0 * radius * radius - s * s) / (2.0 * radius * radius * radius);
  return charge / s;
}

std::string term_name(const PotentialTerm& term) {
  return std::visit(overloaded{
                        [](const AxisCharge&) { return std::string("axis_charge"); },
                        [](const AxisSegment&) { return std::string("axis_segment"); },
                        [](const SmearedCharge&) { return std::string("smeared_charge"); },
                        [](const HollowTube&) { return std::string("hollow_tube"); },
                        [](const SeparableHarmonic&) { return std::string("separable_harmonic"); },
                        [](const PeriodicChainSpec&) { return std::string("periodic_chain"); },
                    },
                    term);
}

struct TermFlags {
  bool superharmonic;  // full Laplacian <= 0 off axis
  bool transverse;     // transverse Laplacian <= 0 off axis
  int radial;          // +1 nondecreasing, -1 nonincreasing, 0 constant
};

TermFlags flags_of(const PotentialTerm& term) {
  return std::visit(
      overloaded{
          [](const AxisCharge&) { return TermFlags{true, false, +1}; },
          [](const AxisSegment& s) {
            return s.linear_density > 0 ? TermFlags{true, false, +1} : TermFlags{true, true, 0};
          },
          [](const SmearedCharge& b) {
            return b.total_charge > 0 ? TermFlags{true, false, -1} : TermFlags{true, true, 0};
          },
          // ln r is harmonic in the plane; the kink at R carries a negative
          // surface density.
          [](const HollowTube&) { return TermFlags{true, true, -1}; },
          [](const SeparableHarmonic& h) {
            return TermFlags{h.c_perp == 0.0 && h.omega_z == 0.0, h.c_perp == 0.0, h.c_perp > 0.0 ? +1 : 0};
          },
          [](const PeriodicChainSpec& c) {
            const bool nuc = c.nucleus_charge > 0;
            const bool ball = c.smeared.total_charge > 0;
            if (nuc && ball) return TermFlags{true, false, 2};
            if (nuc) return TermFlags{true, false, +1};
            if (ball) return TermFlags{true, false, -1};
            return TermFlags{true, true, 0};
          },
      },
      term);
}

void validate_term(const PotentialTerm& term) {
  std::visit(overloaded{
                 [](const AxisCharge& c) {
                   if (!(c.charge > 0) || !std::isfinite(c.position))
                     throw UsageError("axis_charge: charge must be > 0");
                 },
                 [](const AxisSegment& s) {
                   if (!(s.z_lo < s.z_hi)) throw UsageError("axis_segment: z_lo must be < z_hi");
                   if (!(s.linear_density >= 0)) throw UsageError("axis_segment: linear_density must be >= 0");
                 },
                 [](const SmearedCharge& b) {
                   if (!(b.radius > 0)) throw UsageError("smeared_charge: radius must be > 0");
                   if (!(b.total_charge >= 0)) throw UsageError("smeared_charge: total_charge must be >= 0");
                 },
                 [](const HollowTube& t) {
                   if (!(t.tau > 0) || !(t.radius > 0))
                     throw UsageError("hollow_tube: tau and radius must be > 0");
                 },
                 [](const SeparableHarmonic& h) {
                   if (!(h.c_perp >= 0) || !(h.omega_z >= 0))
                     throw UsageError("separable_harmonic: coefficients must be >= 0");
                 },
                 [](const PeriodicChainSpec& c) {
                   if (!(c.period > 0)) throw UsageError("periodic_chain: period must be > 0");
                   if (!(c.nucleus_charge >= 0)) throw UsageError("periodic_chain: nucleus_charge must be >= 0");
                   if (!(c.smeared.radius > 0) || !(c.smeared.radius < c.period / 2))
                     throw UsageError("periodic_chain: smeared radius must lie in (0, a/2)");
                   if (!(c.smeared.total_charge >= 0))
                     throw UsageError("periodic_chain: smeared charge must be >= 0");
                   if (c.deficit != c.nucleus_charge - c.smeared.total_charge)
                     throw UsageError("periodic_chain: deficit must equal nucleus_charge - smeared charge");
                 },
             },
             term);
}

bool is_z_independent(const PotentialTerm& term) {
  if (std::holds_alternative<HollowTube>(term)) return true;
  if (const auto* h = std::get_if<SeparableHarmonic>(&term)) return h->omega_z == 0.0;
  return false;
}

double chain_cell(const PeriodicChainSpec& c, long n, double r, double z) {
  const double zn = static_cast<double>(n) * c.period;
  double v = 0.0;
  if (c.nucleus_charge != 0.0) v -= c.nucleus_charge / std::hypot(r, z - zn);
  if (c.smeared.total_charge != 0.0)
    v += ball_potential(c.smeared.total_charge, c.smeared.radius, std::hypot(r, z - zn - c.smeared.center_z));
  return v;
}

// Neumaier compensated summation; keeps lattice sums reproducible and
// accurate when 10^5 small terms are accumulated.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

PeriodicChainSpec PeriodicChainSpec::make(double period, double nucleus_charge, double smeared_radius,
                                          double smeared_charge) {
  PeriodicChainSpec c;
  c.period = period;
  c.nucleus_charge = nucleus_charge;
  c.smeared = SmearedCharge{period / 2.0, smeared_radius, smeared_charge};
  c.deficit = nucleus_charge - smeared_charge;
  return c;
}

std::string_view to_string(Certificate c) {
  switch (c) {
    case Certificate::superharmonic_off_axis: return "superharmonic_off_axis";
    case Certificate::transverse_superharmonic_off_axis: return "transverse_superharmonic_off_axis";
    case Certificate::not_superharmonic: return "not_superharmonic";
  }
  return "unknown";
}

std::string_view to_string(RadialSign s) {
  switch (s) {
    case RadialSign::nondecreasing_in_r: return "nondecreasing_in_r";
    case RadialSign::nonincreasing_in_r: return "nonincreasing_in_r";
    case RadialSign::indefinite: return "indefinite";
    case RadialSign::constant_in_r: return "constant_in_r";
  }
  return "unknown";
}

// ---------------------------------------------------------------- cache

struct ChainSumCache::Impl {
  struct KeyHash {
    std::size_t operator()(const std::pair<long long, long long>& k) const {
      return std::hash<long long>()(k.first) ^ (std::hash<long long>()(k.second) * 0x9e3779b97f4a7c15ULL);
    }
  };
  mutable std::shared_mutex mutex;
  std::unordered_map<std::pair<long long, long long>, double, KeyHash> values;

  static std::pair<long long, long long> key(double r, double z) {
    return {std::llround(r * 1e9), std::llround(z * 1e9)};
  }
};

ChainSumCache::ChainSumCache() : impl_(std::make_unique<Impl>()) {}
ChainSumCache::~ChainSumCache() = default;

std::optional<double> ChainSumCache::find(double r, double z) const {
  std::shared_lock lock(impl_->mutex);
  auto it = impl_->values.find(Impl::key(r, z));
  if (it == impl_->values.end()) return std::nullopt;
  return it->second;
}

void ChainSumCache::store(double r, double z, double value) {
  std::unique_lock lock(impl_->mutex);
  impl_->values.emplace(Impl::key(r, z), value);
}

std::size_t ChainSumCache::size() const {
  std::shared_lock lock(impl_->mutex);
  return impl_->values.size();
}

// ---------------------------------------------------------------- spec

PotentialSpec::PotentialSpec() : PotentialSpec(std::vector<PotentialTerm>{}) {}

PotentialSpec::PotentialSpec(std::vector<PotentialTerm> terms)
    : terms_(std::move(terms)), cache_(std::make_shared<ChainSumCache>()) {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    validate_term(terms_[i]);
    if (std::holds_alternative<PeriodicChainSpec>(terms_[i])) {
      if (chain_index_) throw UsageError("at most one periodic_chain term is allowed");
      chain_index_ = i;
    }
  }
  if (chain_index_) {
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i != *chain_index_ && !is_z_independent(terms_[i]))
        throw UsageError("a periodic potential may only be combined with z-independent terms, got " +
                         term_name(terms_[i]));
    }
  }

  bool all_full = true;
  bool all_transverse = true;
  bool seen_up = false;
  bool seen_down = false;
  for (const auto& t : terms_) {
    const TermFlags f = flags_of(t);
    all_full = all_full && f.superharmonic;
    all_transverse = all_transverse && f.transverse;
    if (f.radial == +1) seen_up = true;
    if (f.radial == -1) seen_down = true;
    if (f.radial == 2) seen_up = seen_down = true;
  }
  certificate_ = all_full        ? Certificate::superharmonic_off_axis
                 : all_transverse ? Certificate::transverse_superharmonic_off_axis
                                  : Certificate::not_superharmonic;
  if (seen_up && seen_down)
    radial_sign_ = RadialSign::indefinite;
  else if (seen_up)
    radial_sign_ = RadialSign::nondecreasing_in_r;
  else if (seen_down)
    radial_sign_ = RadialSign::nonincreasing_in_r;
  else
    radial_sign_ = RadialSign::constant_in_r;
}

const PeriodicChainSpec& PotentialSpec::chain() const {
  if (!chain_index_) throw UsageError("potential is not periodic");
  return std::get<PeriodicChainSpec>(terms_[*chain_index_]);
}

bool PotentialSpec::is_z_separable() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const PotentialTerm& t) {
    return std::holds_alternative<HollowTube>(t) || std::holds_alternative<SeparableHarmonic>(t);
  });
}

double PotentialSpec::attractive_charge() const {
  double z = 0.0;
  for (const auto& t : terms_) {
    if (const auto* c = std::get_if<AxisCharge>(&t)) z += c->charge;
    if (const auto* s = std::get_if<AxisSegment>(&t)) z += s->linear_density * (s->z_hi - s->z_lo);
  }
  return z;
}

double PotentialSpec::repulsive_charge() const {
  double c = 0.0;
  for (const auto& t : terms_)
    if (const auto* b = std::get_if<SmearedCharge>(&t)) c += b->total_charge;
  return c;
}

std::string PotentialSpec::digest() const {
  std::ostringstream os;
  os.precision(17);
  for (const auto& t : terms_) {
    os << term_name(t) << '(';
    std::visit(overloaded{
                   [&](const AxisCharge& c) { os << c.position << ',' << c.charge; },
                   [&](const AxisSegment& s) { os << s.z_lo << ',' << s.z_hi << ',' << s.linear_density; },
                   [&](const SmearedCharge& b) { os << b.center_z << ',' << b.radius << ',' << b.total_charge; },
                   [&](const HollowTube& h) { os << h.tau << ',' << h.radius; },
                   [&](const SeparableHarmonic& h) { os << h.c_perp << ',' << h.omega_z; },
                   [&](const PeriodicChainSpec& c) {
                     os << c.period << ',' << c.nucleus_charge << ',' << c.smeared.radius << ','
                        << c.smeared.total_charge;
                   },
               },
               t);
    os << ')';
  }
  return os.str();
}

// ---------------------------------------------------------------- evaluation

double renormalized_chain_sum(const PeriodicChainSpec& chain, double r, double z, double tol) {
  if (!(r > 0)) throw DomainError("periodic_chain: r must be > 0");
  if (!(tol > 0)) throw UsageError("periodic_chain: tolerance must be > 0");
  const double slope = 2.0 * chain.deficit / chain.period;

  // Start beyond the near zone so the doubling sequence is in its asymptotic regime.
  long n = 4;
  while (static_cast<double>(n) * chain.period < 4.0 * (r + std::abs(z)) && n < kChainSumMaxCells / 2) n *= 2;

  CompensatedSum full;
  full.add(chain_cell(chain, 0, r, z));
  for (long k = 1; k <= n; ++k) {
    full.add(chain_cell(chain, k, r, z));
    full.add(chain_cell(chain, -k, r, z));
  }
  auto value_at = [&](long cells) {
    return full.value() - 0.5 * (chain_cell(chain, cells, r, z) + chain_cell(chain, -cells, r, z)) +
           slope * std::log(static_cast<double>(cells));
  };
  double previous = value_at(n);
  while (true) {
    const long next = 2 * n;
    if (next > kChainSumMaxCells) {
      throw ConvergenceError("periodic_chain: lattice sum did not converge within 2^20 cells", previous, previous);
    }
    for (long k = n + 1; k <= next; ++k) {
      full.add(chain_cell(chain, k, r, z));
      full.add(chain_cell(chain, -k, r, z));
    }
    n = next;
    const double current = value_at(n);
    if (!std::isfinite(current)) throw DomainError("periodic_chain: non-finite lattice sum");
    if (std::abs(current - previous) < tol) return current;
    if (2 * n > kChainSumMaxCells)
      throw ConvergenceError("periodic_chain: lattice sum did not converge within 2^20 cells", previous, current);
    previous = current;
  }
}

double evaluate_term(const PotentialTerm& term, double r, double z) {
  if (!(r > 0)) throw DomainError(term_name(term) + ": evaluation requires r > 0");
  const double v = std::visit(
      overloaded{
          [&](const AxisCharge& c) { return -c.charge / std::hypot(r, z - c.position); },
          [&](const AxisSegment& s) {
            return -s.linear_density * (std::asinh((s.z_hi - z) / r) - std::asinh((s.z_lo - z) / r));
          },
          [&](const SmearedCharge& b) { return ball_potential(b.total_charge, b.radius, std::hypot(r, z - b.center_z)); },
          [&](const HollowTube& t) { return r <= t.radius ? 0.0 : -t.tau * std::log(r / t.radius); },
          [&](const SeparableHarmonic& h) { return h.c_perp * r * r + h.omega_z * h.omega_z * z * z; },
          [&](const PeriodicChainSpec& c) { return renormalized_chain_sum(c, r, z); },
      },
      term);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << term_name(term) << ": non-finite value at (r=" << r << ", z=" << z << ")";
    throw DomainError(os.str());
  }
  return v;
}

double evaluate(const PotentialSpec& spec, double r, double z) {
  double v = 0.0;
  for (const auto& term : spec.terms()) {
    if (const auto* chain = std::get_if<PeriodicChainSpec>(&term)) {
      if (!(r > 0)) throw DomainError("periodic_chain: evaluation requires r > 0");
      const double a = chain->period;
      const double zr = z - a * std::floor(z / a);
      auto& cache = spec.chain_cache();
      if (auto hit = cache.find(r, zr)) {
        v += *hit;
      } else {
        const double value = renormalized_chain_sum(*chain, r, zr);
        cache.store(r, zr, value);
        v += value;
      }
    } else {
      v += evaluate_term(term, r, z);
    }
  }
  return v;
}

Certificate transverse_laplacian_certificate(const PotentialSpec& spec) { return spec.certificate(); }

RadialSign radial_sign(const PotentialSpec& spec) { return spec.radial_sign(); }

// ---------------------------------------------------------------- scan

ScanReport numerical_superharmonicity_scan(const PotentialSpec& spec, const ScanRegion& region,
                                           const ScanOptions& options) {
  const double h = options.stencil;
  if (!(h > 0)) throw UsageError("scan: stencil must be > 0");
  if (!(region.r_min - h > 0)) throw DomainError("scan: region touches the axis (r_min must exceed the stencil)");
  if (!(region.r_max >= region.r_min) || !(region.z_max >= region.z_min) || options.samples < 1)
    throw UsageError("scan: empty region");
  const double margin = options.surface_margin >= 0 ? options.surface_margin : 3.0 * h;

  auto near_surface = [&](double r, double z) {
    for (const auto& t : spec.terms()) {
      if (const auto* tube = std::get_if<HollowTube>(&t)) {
        if (std::abs(r - tube->radius) < margin) return true;
      } else if (const auto* b = std::get_if<SmearedCharge>(&t)) {
        if (std::abs(std::hypot(r, z - b->center_z) - b->radius) < margin) return true;
      } else if (const auto* c = std::get_if<PeriodicChainSpec>(&t)) {
        const double a = c->period;
        const double rel = z - c->smeared.center_z;
        const double dz = rel - a * std::round(rel / a);
        if (std::abs(std::hypot(r, dz) - c->smeared.radius) < margin) return true;
      }
    }
    return false;
  };

  ScanReport report;
  report.min_discrete_laplacian = std::numeric_limits<double>::infinity();
  report.max_discrete_laplacian = -std::numeric_limits<double>::infinity();
  const int n = options.samples;
  for (int i = 0; i < n; ++i) {
    const double r = n == 1 ? region.r_min : region.r_min + (region.r_max - region.r_min) * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double z = n == 1 ? region.z_min : region.z_min + (region.z_max - region.z_min) * j / (n - 1);
      if (near_surface(r, z)) continue;
      const double v0 = evaluate(spec, r, z);
      // Cartesian stencil around (x, y, z) = (r, 0, z); the y-neighbours sit
      // at radius sqrt(r^2 + h^2).
      double lap = evaluate(spec, r + h, z) + evaluate(spec, r - h, z) + 2.0 * evaluate(spec, std::hypot(r, h), z) -
                   4.0 * v0;
      if (options.kind == LaplacianKind::full) lap += evaluate(spec, r, z + h) + evaluate(spec, r, z - h) - 2.0 * v0;
      lap /= h * h;
      ++report.points_evaluated;
      report.min_discrete_laplacian = std::min(report.min_discrete_laplacian, lap);
      report.max_discrete_laplacian = std::max(report.max_discrete_laplacian, lap);
      if (lap > options.tolerance) report.violation_points.push_back({r, z, lap});
    }
  }
  if (report.points_evaluated == 0) report.min_discrete_laplacian = report.max_discrete_laplacian = 0.0;
  return report;
}

}  // namespace landau
