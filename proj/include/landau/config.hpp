#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "landau/eigensolve.hpp"
#include "landau/grid.hpp"
#include "landau/potentials.hpp"

namespace landau {

struct VerifyOptions {
  double tolerance_factor = 5.0;
  double tolerance_floor = 1e-10;
  std::optional<double> domain_z_max;  // companion box for the truncation estimate
};

struct BandOptions {
  int n_alpha = 16;
};

struct ConvergenceOptions {
  std::vector<int> resolutions;
  std::vector<int> m{0};
};

/// Parsed and validated run configuration. `document` keeps the JSON as
/// given so run.json can be fed back as a config.
struct RunConfig {
  nlohmann::json document;
  PotentialSpec potential;
  FieldConfig field;
  int m_max = 10;
  std::optional<int> m;  // single sector instead of 0..m_max
  int levels = 1;
  int resolution = 0;
  SolveConfig solver;
  GridOptions grid;
  BandOptions band;
  VerifyOptions verify;
  ConvergenceOptions convergence;

  /// FNV-1a of the canonical document without the "run" block.
  std::string digest() const;
};

/// Validates against the schema in docs/schemas/config.schema.json and
/// builds the typed config. Throws ConfigError with a JSON pointer.
RunConfig parse_config(const nlohmann::json& document);
RunConfig load_config(const std::filesystem::path& path);

PotentialSpec parse_potential(const nlohmann::json& document, const std::string& pointer = "/potential");
nlohmann::json potential_to_json(const PotentialSpec& spec);

std::string_view to_string(SpectralTransform t);

/// 16 hex digits of FNV-1a over the bytes.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace landau
