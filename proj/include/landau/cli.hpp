#pragma once

#include <filesystem>
#include <iosfwd>

namespace landau {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int checks_failed = 1;  // verify/band: an applicable check failed
inline constexpr int partial = 2;
inline constexpr int usage = 64;
inline constexpr int resource = 70;
}  // namespace exit_code

struct CliOptions {
  std::filesystem::path config;
  std::filesystem::path out = ".";
  int threads = 1;
  bool oracle = false;  // dense cross-check of sectors with dimension <= 2000
};

/// Each command validates the config before touching `out`; an invalid
/// config leaves no artifacts behind.
int cmd_solve(const CliOptions& options, std::ostream& log);
int cmd_verify(const CliOptions& options, std::ostream& log);
int cmd_band(const CliOptions& options, std::ostream& log);
int cmd_convergence(const CliOptions& options, std::ostream& log);

/// argv front end: `landau_order <solve|verify|band|convergence> --config PATH ...`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace landau
