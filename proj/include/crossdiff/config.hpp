#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crossdiff/analysis.hpp"
#include "crossdiff/convergence.hpp"
#include "crossdiff/model.hpp"
#include "crossdiff/pde.hpp"

namespace crossdiff {

inline constexpr int kSchemaVersion = 1;

struct Perturbation {
  std::string kind = "cosine";  // cosine | noise | none
  int mode = 1;
  double amplitude = 1e-3;      // relative to the base value of the field
  std::string field = "u";      // u | v
};

struct BaseState {
  std::string kind = "coexistence";  // coexistence | explicit
  double u = 0.0;
  double v = 0.0;
};

struct DispersionRange {
  double lambda_min = 0.0;
  std::optional<double> lambda_max;  // default: covers the band or the first modes
  int points = 401;
};

struct SweepSpec {
  std::vector<double> epsilons;
  std::vector<double> d12;
  GapNorm norm = GapNorm::FinalL2;
};

struct RunConfig {
  ModelSpec model;
  double length = 10.0;
  int cells = 128;
  double t_end = 100.0;
  Controls controls;
  BaseState base;
  Perturbation perturbation;
  DispersionRange dispersion;
  SweepSpec sweep;
  PatternOptions analysis;
  std::uint64_t seed = 0;

  Grid1D grid() const { return Grid1D(length, cells); }
};

// Parses and validates a config document. Unknown keys are rejected so typos
// surface as configuration errors.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

// Fully resolved config with every default filled in.
nlohmann::json to_json(const RunConfig& cfg);

// Hex SHA-256 of the canonical serialization of `doc`.
std::string content_hash(const nlohmann::json& doc);

// Base state (homogeneous equilibrium or explicit values) plus perturbation.
SimState initial_state(const RunConfig& cfg);

}  // namespace crossdiff
