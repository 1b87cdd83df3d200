#include "landau/cli.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <new>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "landau/bloch_bands.hpp"
#include "landau/config.hpp"
#include "landau/errors.hpp"
#include "landau/ordering.hpp"
#include "landau/report.hpp"

namespace landau {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kOracleDimension = 2000;

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ResourceError("cannot write " + path.string());
  f << text;
  if (!f) throw ResourceError("write failed: " + path.string());
}

struct Context {
  const CliOptions& options;
  std::ostream& log;
  RunConfig config;
  json run = json::object();  // the "run" block of run.json
  json timings = json::object();
  Stopwatch clock;

  void prepare_output() const { fs::create_directories(options.out); }
  void write(const std::string& name, const std::string& text) const { write_text(options.out / name, text); }

  void write_run_json(const std::string& command) {
    json doc = config.document;
    run["command"] = command;
    run["config_digest"] = config.digest();
    run["potential_digest"] = config.potential.digest();
    run["threads"] = options.threads;
    run["oracle"] = options.oracle;
    run["timings_seconds"] = timings;
    doc["run"] = run;
    write("run.json", doc.dump(2) + "\n");
  }
};

SweepOptions sweep_options(const RunConfig& c, int threads) {
  SweepOptions o;
  o.m_max = c.m_max;
  o.levels = c.levels;
  o.solver = c.solver;
  o.threads = threads;
  return o;
}

Grid2D main_grid(const RunConfig& c) {
  return build_grid(c.field, c.m_max, c.potential, c.resolution, c.grid);
}

json grid_json(const Grid2D& g) {
  return {{"n_r", g.n_r}, {"n_z", g.n_z}, {"h_r", g.h_r}, {"h_z", g.h_z}, {"r_max", g.r_max},
          {"z_max", g.z_max}, {"period", g.period}, {"periodic", g.periodic}, {"resolution", g.resolution},
          {"dimension", g.dimension()}, {"digest", g.digest()}};
}

json sequence_diagnostics(const EnergySequence& seq) {
  json unconverged = json::array();
  long iterations = 0;
  std::map<std::string, int> methods;
  for (const auto& s : seq.entries) {
    iterations += s.iterations;
    ++methods[s.method];
    for (std::size_t n = 0; n < s.converged.size(); ++n)
      if (!s.converged[n]) unconverged.push_back({{"m", s.m}, {"n", n + 1}});
  }
  return {{"iterations", iterations}, {"methods", methods}, {"unconverged", unconverged}};
}

std::string energies_text(const EnergySequence& seq) {
  std::ostringstream os;
  write_energies_csv(os, seq);
  return os.str();
}

/// Dense comparison of every sector small enough to materialize.
OrderingReport oracle_report(const GridPotential& pot, const EnergySequence& seq) {
  OrderingReport rep;
  if (pot.grid.dimension() > kOracleDimension) {
    rep.notes.push_back("oracle skipped: dimension " + std::to_string(pot.grid.dimension()) + " > " +
                        std::to_string(kOracleDimension));
    return rep;
  }
  for (const auto& s : seq.entries) {
    const SectorOperator op =
        seq.alpha ? assemble_bloch(pot, seq.field, s.m, *seq.alpha) : assemble(pot, seq.field, s.m);
    const std::vector<double> dense = dense_reference(op);
    for (std::size_t n = 0; n < s.levels.size() && n < dense.size(); ++n) {
      CheckRecord r;
      r.check = "oracle_agreement";
      r.m = s.m;
      r.n = static_cast<int>(n) + 1;
      r.alpha = seq.alpha;
      r.lhs = std::abs(s.levels[n] - dense[n]);
      r.rhs = 0.0;
      r.margin = -r.lhs;
      r.tol = std::max(1e-8, 10.0 * s.residuals[n]);
      r.pass = r.margin >= -r.tol;
      r.applicable = s.converged[n];
      if (!r.applicable) r.note = "level not converged";
      rep.records.push_back(r);
    }
  }
  return rep;
}

json report_document(const Context& ctx, const OrderingReport& rep, const TolerancePolicy& policy,
                     bool fully_converged) {
  json j = report_to_json(rep);
  j["config_digest"] = ctx.config.digest();
  j["certificate"] = std::string(to_string(ctx.config.potential.certificate()));
  j["radial_sign"] = std::string(to_string(ctx.config.potential.radial_sign()));
  j["tolerance"] = {{"factor", policy.factor}, {"floor", policy.floor}, {"order", policy.order}};
  j["fully_converged"] = fully_converged;
  return j;
}

int outcome(const OrderingReport& rep, bool fully_converged) {
  if (!rep.passed()) return exit_code::checks_failed;
  return fully_converged ? exit_code::ok : exit_code::partial;
}

/// Config loading and the mapping from exceptions to exit codes shared by
/// every command.
int guarded(const CliOptions& options, std::ostream& log, const std::function<int(Context&)>& body) {
  std::optional<Context> ctx;
  try {
    if (options.threads < 1) throw UsageError("--threads must be >= 1");
    ctx.emplace(Context{options, log, load_config(options.config), json::object(), json::object(), Stopwatch{}});
  } catch (const ConfigError& e) {
    log << "config error at " << e.what() << "\n";
    return exit_code::usage;
  } catch (const UsageError& e) {
    log << "usage error: " << e.what() << "\n";
    return exit_code::usage;
  }
  try {
    return body(*ctx);
  } catch (const ConfigError& e) {
    log << "config error at " << e.what() << "\n";
    return exit_code::usage;
  } catch (const UsageError& e) {
    log << "usage error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const DomainError& e) {
    log << "domain error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const ResourceError& e) {
    log << "resource limit: " << e.what() << "\n";
    return exit_code::resource;
  } catch (const std::bad_alloc&) {
    log << "resource limit: out of memory\n";
    return exit_code::resource;
  } catch (const fs::filesystem_error& e) {
    log << "resource limit: " << e.what() << "\n";
    return exit_code::resource;
  } catch (const ConvergenceError& e) {
    log << "convergence failure: " << e.what() << "\n";
    return exit_code::partial;
  }
}

// Coarse sweep (sequential, each sector seeding the next) followed by the
// requested grid, whose sectors are independent given the coarse poles.
struct Sweeps {
  GridPotential fine_potential;
  EnergySequence coarse;
  EnergySequence fine;
  std::optional<EnergySequence> domain;
};

Sweeps run_sweeps(Context& ctx, const Grid2D& grid) {
  const RunConfig& c = ctx.config;
  Sweeps s;
  SweepOptions opt = sweep_options(c, ctx.options.threads);
  const Grid2D coarse_grid = regrid(grid, c.resolution - 1, c.grid.max_dimension);
  s.coarse = sweep_sectors(sample_potential(c.potential, coarse_grid), c.field, opt);
  ctx.timings["coarse_sweep"] = ctx.clock.lap();
  s.fine_potential = sample_potential(c.potential, grid);
  opt.hints = &s.coarse;
  s.fine = sweep_sectors(s.fine_potential, c.field, opt);
  ctx.timings["sweep"] = ctx.clock.lap();
  if (c.verify.domain_z_max) {
    if (grid.periodic) throw UsageError("verify.domain_z_max needs a non-periodic potential");
    GridOptions g = c.grid;
    g.z_max = *c.verify.domain_z_max;
    g.r_max = grid.r_max;
    opt.hints = &s.fine;
    s.domain = sweep_sectors(sample_potential(c.potential, build_grid(c.field, c.m_max, c.potential, c.resolution, g)),
                             c.field, opt);
    ctx.timings["domain_sweep"] = ctx.clock.lap();
  }
  ctx.run["grid"] = grid_json(grid);
  ctx.run["coarse_grid"] = grid_json(coarse_grid);
  ctx.run["diagnostics"] = sequence_diagnostics(s.fine);
  return s;
}

struct Bands {
  BandSurface coarse;
  BandSurface fine;
  GridPotential fine_potential;
};

Bands run_bands(Context& ctx, const Grid2D& grid) {
  const RunConfig& c = ctx.config;
  Bands b;
  const std::vector<double> alphas = uniform_alphas(c.band.n_alpha);
  const SweepOptions opt = sweep_options(c, ctx.options.threads);
  const Grid2D coarse_grid = regrid(grid, c.resolution - 1, c.grid.max_dimension);
  b.coarse = compute_band(sample_potential(c.potential, coarse_grid), c.field, alphas, opt);
  ctx.timings["coarse_band"] = ctx.clock.lap();
  b.fine_potential = sample_potential(c.potential, grid);
  b.fine = compute_band(b.fine_potential, c.field, alphas, opt, &b.coarse);
  ctx.timings["band"] = ctx.clock.lap();
  ctx.run["grid"] = grid_json(grid);
  ctx.run["coarse_grid"] = grid_json(coarse_grid);
  return b;
}

bool band_converged(const BandSurface& s) {
  return std::all_of(s.slices.begin(), s.slices.end(), [](const EnergySequence& q) { return q.fully_converged(); });
}

std::string band_text(const BandSurface& s) {
  std::ostringstream os;
  write_band_csv(os, s);
  return os.str();
}

OrderingReport band_checks(const Bands& b, const RunConfig& c) {
  BandTolerance t;
  t.factor = c.verify.tolerance_factor;
  t.floor = c.verify.tolerance_floor;
  t.coarse = &b.coarse;
  OrderingReport rep = check_band_pseudoconcavity(b.fine, t);
  rep.append(check_alpha_minimum(b.fine, t));
  rep.append(check_band_continuity(b.fine));
  return rep;
}

TolerancePolicy policy_for(const RunConfig& c) {
  TolerancePolicy p;
  p.factor = c.verify.tolerance_factor;
  p.floor = c.verify.tolerance_floor;
  return p;
}

}  // namespace

int cmd_solve(const CliOptions& options, std::ostream& log) {
  return guarded(options, log, [](Context& ctx) {
    const RunConfig& c = ctx.config;
    const Grid2D grid = main_grid(c);
    const GridPotential pot = sample_potential(c.potential, grid);
    ctx.timings["sample"] = ctx.clock.lap();
    ctx.run["grid"] = grid_json(grid);
    const std::optional<double> alpha = grid.periodic ? std::optional<double>(0.0) : std::nullopt;
    ctx.prepare_output();

    EnergySequence seq;
    bool all_failed = false;
    if (c.m) {
      seq.field = c.field;
      seq.alpha = alpha;
      seq.m_min = *c.m;
      seq.entries.push_back(solve_sector(pot, c.field, *c.m, alpha, sweep_options(c, 1)));
    } else {
      try {
        seq = sweep_sectors(pot, c.field, sweep_options(c, ctx.options.threads), alpha);
      } catch (const SweepFailure& e) {
        seq = e.partial();
        all_failed = true;
      }
    }
    ctx.timings["solve"] = ctx.clock.lap();
    ctx.run["diagnostics"] = sequence_diagnostics(seq);
    ctx.write("energies.csv", energies_text(seq));
    ctx.write_run_json("solve");
    if (all_failed || !seq.fully_converged()) {
      ctx.log << "partial convergence; unconverged rows have converged=0\n";
      return exit_code::partial;
    }
    return exit_code::ok;
  });
}

int cmd_verify(const CliOptions& options, std::ostream& log) {
  return guarded(options, log, [](Context& ctx) {
    const RunConfig& c = ctx.config;
    if (c.m) throw UsageError("verify needs a sweep; remove \"m\" and set \"m_max\"");
    const Grid2D grid = main_grid(c);
    ctx.prepare_output();
    const TolerancePolicy base = policy_for(c);
    OrderingReport rep;
    bool converged = true;

    if (grid.periodic) {
      const Bands b = run_bands(ctx, grid);
      TolerancePolicy p = base;
      p.coarse = &b.coarse.slices.front();
      rep = verify_sequence(b.fine.slices.front(), c.potential, p);
      rep.append(band_checks(b, c));
      if (ctx.options.oracle) rep.append(oracle_report(b.fine_potential, b.fine.slices.front()));
      converged = band_converged(b.fine);
      ctx.run["diagnostics"] = sequence_diagnostics(b.fine.slices.front());
      ctx.write("energies.csv", energies_text(b.fine.slices.front()));
      ctx.write("band.csv", band_text(b.fine));
    } else {
      const Sweeps s = run_sweeps(ctx, grid);
      TolerancePolicy p = base;
      p.coarse = &s.coarse;
      if (s.domain) p.domain = &*s.domain;
      rep = verify_sequence(s.fine, c.potential, p);
      if (ctx.options.oracle) rep.append(oracle_report(s.fine_potential, s.fine));
      converged = s.fine.fully_converged();
      ctx.write("energies.csv", energies_text(s.fine));
    }
    ctx.timings["checks"] = ctx.clock.lap();
    ctx.write("report.json", report_document(ctx, rep, base, converged).dump(2) + "\n");
    ctx.write_run_json("verify");
    const int code = outcome(rep, converged);
    ctx.log << "verify: " << rep.records.size() << " checks, " << (rep.passed() ? "all applicable passed" : "FAILED")
            << (converged ? "" : ", partial convergence") << "\n";
    return code;
  });
}

int cmd_band(const CliOptions& options, std::ostream& log) {
  return guarded(options, log, [](Context& ctx) {
    const RunConfig& c = ctx.config;
    if (!c.potential.is_periodic()) throw UsageError("band needs a periodic potential (\"period\" block)");
    if (c.m) throw UsageError("band needs a sweep; remove \"m\" and set \"m_max\"");
    const Grid2D grid = main_grid(c);
    ctx.prepare_output();
    const Bands b = run_bands(ctx, grid);
    const OrderingReport rep = band_checks(b, c);
    const bool converged = band_converged(b.fine);
    ctx.timings["checks"] = ctx.clock.lap();
    ctx.write("band.csv", band_text(b.fine));
    ctx.write("report.json", report_document(ctx, rep, policy_for(c), converged).dump(2) + "\n");
    ctx.write_run_json("band");
    return outcome(rep, converged);
  });
}

int cmd_convergence(const CliOptions& options, std::ostream& log) {
  return guarded(options, log, [](Context& ctx) {
    const RunConfig& c = ctx.config;
    const auto& levels = c.convergence.resolutions;
    if (levels.size() < 3) throw UsageError("convergence needs at least 3 resolution levels");
    for (std::size_t i = 1; i < levels.size(); ++i)
      if (levels[i] != levels[i - 1] + 1) throw UsageError("convergence resolutions must be consecutive and ascending");
    const int m_top = *std::max_element(c.convergence.m.begin(), c.convergence.m.end());
    ctx.prepare_output();

    std::vector<ConvergenceRow> rows;
    json grids = json::array();
    bool converged = true;
    SweepOptions opt = sweep_options(c, 1);
    opt.levels = 1;
    std::vector<GridPotential> potentials;
    for (int level : levels) {
      const Grid2D g = build_grid(c.field, std::max(m_top, c.m_max), c.potential, level, c.grid);
      grids.push_back(grid_json(g));
      potentials.push_back(sample_potential(c.potential, g));
    }
    for (int m : c.convergence.m) {
      std::optional<double> hint;
      for (std::size_t i = 0; i < levels.size(); ++i) {
        const GridPotential& pot = potentials[i];
        const std::optional<double> alpha = pot.grid.periodic ? std::optional<double>(0.0) : std::nullopt;
        const SectorLevels s = solve_sector(pot, c.field, m, alpha, opt, hint);
        ConvergenceRow r;
        r.m = m;
        r.resolution = levels[i];
        r.h = pot.grid.h_r;
        r.energy = s.levels.front();
        r.residual = s.residuals.front();
        r.converged = s.converged.front();
        converged = converged && r.converged;
        if (r.converged) hint = r.energy;
        rows.push_back(r);
      }
    }
    annotate_convergence(rows);
    ctx.timings["convergence"] = ctx.clock.lap();
    ctx.run["grids"] = grids;
    std::ostringstream os;
    write_convergence_csv(os, rows);
    ctx.write("convergence.csv", os.str());
    ctx.write_run_json("convergence");
    return converged ? exit_code::ok : exit_code::partial;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Angular-momentum ordering of magnetic Schroedinger levels", "landau_order"};
  app.require_subcommand(1);
  CliOptions options;
  std::function<int(const CliOptions&, std::ostream&)> command;

  auto add = [&](const char* name, const char* help, int (*fn)(const CliOptions&, std::ostream&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", options.config, "JSON run configuration")->required();
    sub->add_option("--out", options.out, "output directory")->capture_default_str();
    sub->add_option("--threads", options.threads, "worker threads across sectors")->capture_default_str();
    sub->add_flag("--oracle", options.oracle, "dense cross-check on small grids");
    sub->callback([&command, fn] { command = fn; });
  };
  add("solve", "lowest levels per angular momentum sector", &cmd_solve);
  add("verify", "sweep plus the ordering check battery", &cmd_verify);
  add("band", "Bloch bands of a periodic chain and their checks", &cmd_band);
  add("convergence", "observed order and Richardson extrapolation across resolutions", &cmd_convergence);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << "run with --help for usage\n";
    return exit_code::usage;
  }
  return command(options, err);
}

}  // namespace landau
