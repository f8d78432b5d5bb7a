#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace crossdiff {

struct CliOptions {
  std::string command;  // analyze | threshold | dispersion | simulate | sweep | classify
  std::optional<std::filesystem::path> config;
  std::filesystem::path out = "runs";
  std::optional<std::uint64_t> seed;
  std::vector<double> epsilons;
  std::vector<double> d12;
  std::string signs;    // classify: four entries J11,J12,J21,J22 as +/- or +1/-1
  std::string d2_sign;  // classify: +, - or 0
  bool quiet = false;
};

struct CommandResult {
  int exit_code = 0;
  std::filesystem::path directory;  // empty on failure
};

// Exit codes: 0 success, 2 configuration/validation error, 3 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Runs one command, writing its files under out/<hash>/. Errors are reported
// on `err` as a single JSON object and mapped to the exit code.
CommandResult run_command(const CliOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace crossdiff
