#include "landau/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace landau {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_energies_csv(std::ostream& out, const std::vector<SectorLevels>& rows, std::optional<double> alpha) {
  out << "m,alpha,n,energy,residual,converged\n";
  const std::string a = alpha ? format_double(*alpha) : "";
  for (const auto& s : rows)
    for (std::size_t n = 0; n < s.levels.size(); ++n)
      out << s.m << ',' << a << ',' << n + 1 << ',' << format_double(s.levels[n]) << ','
          << format_double(s.residuals[n]) << ',' << (s.converged[n] ? 1 : 0) << '\n';
}

void write_energies_csv(std::ostream& out, const EnergySequence& seq) {
  write_energies_csv(out, seq.entries, seq.alpha);
}

void write_band_csv(std::ostream& out, const BandSurface& surface) {
  out << "alpha,m,energy,residual,converged\n";
  for (std::size_t i = 0; i < surface.slices.size(); ++i)
    for (const auto& s : surface.slices[i].entries)
      out << format_double(surface.alphas[i]) << ',' << s.m << ',' << format_double(s.levels.front()) << ','
          << format_double(s.residuals.front()) << ',' << (s.converged.front() ? 1 : 0) << '\n';
}

json record_to_json(const CheckRecord& r) {
  json j;
  j["check"] = r.check;
  j["m"] = r.m;
  j["n"] = r.n;
  j["anchor"] = r.anchor ? json(*r.anchor) : json(nullptr);
  j["alpha"] = r.alpha ? json(*r.alpha) : json(nullptr);
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["margin"] = r.margin;
  j["tol"] = r.tol;
  j["pass"] = r.pass;
  j["strict"] = r.strict;
  j["applicable"] = r.applicable;
  j["note"] = r.note;
  return j;
}

json report_to_json(const OrderingReport& report) {
  json j;
  j["passed"] = report.passed();
  j["hypothesis_met"] = report.hypothesis_met;
  json checks = json::array();
  for (const auto& r : report.records) checks.push_back(record_to_json(r));
  j["checks"] = std::move(checks);
  j["notes"] = report.notes;
  if (report.turning_point)
    j["turning_point"] = {{"M", report.turning_point->M},
                          {"valid", report.turning_point->valid},
                          {"reaches_end", report.turning_point->reaches_end}};
  else
    j["turning_point"] = nullptr;
  j["plateau_onset"] = report.plateau_onset ? json(*report.plateau_onset) : json(nullptr);
  j["max_tolerance"] = report.max_tolerance();
  return j;
}

std::optional<double> observed_order(double e0, double e1, double e2) {
  const double d1 = std::abs(e0 - e1);
  const double d2 = std::abs(e1 - e2);
  if (!(d1 > 0.0) || !(d2 > 0.0)) return std::nullopt;
  return std::log2(d1 / d2);
}

void annotate_convergence(std::vector<ConvergenceRow>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& r = rows[i];
    r.order.reset();
    r.extrapolated.reset();
    if (i >= 1 && rows[i - 1].m == r.m && rows[i - 1].resolution == r.resolution - 1)
      r.extrapolated = r.energy + (r.energy - rows[i - 1].energy) / 3.0;
    if (i >= 2 && rows[i - 2].m == r.m && rows[i - 1].m == r.m && rows[i - 2].resolution == r.resolution - 2 &&
        rows[i - 1].resolution == r.resolution - 1)
      r.order = observed_order(rows[i - 2].energy, rows[i - 1].energy, r.energy);
  }
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
  out << "m,resolution,h,energy,residual,converged,order,extrapolated\n";
  for (const auto& r : rows)
    out << r.m << ',' << r.resolution << ',' << format_double(r.h) << ',' << format_double(r.energy) << ','
        << format_double(r.residual) << ',' << (r.converged ? 1 : 0) << ','
        << (r.order ? format_double(*r.order) : "") << ',' << (r.extrapolated ? format_double(*r.extrapolated) : "")
        << '\n';
}

}  // namespace landau
