#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crossdiff/diffusivity.hpp"
#include "crossdiff/kinetics.hpp"
#include "crossdiff/rates.hpp"

namespace crossdiff {

enum class Variant {
  SktPlusLimit,   // u_t = Lap(D+(u, v)) + f
  SktMinusLimit,  // u_t = Lap(D-(u, v)) + f
  SktFastPlus,    // (u_a, u_b, v) with u_b diffusing at d_u + d12
  SktFastMinus,   // (u_a, u_b, v) with u_b diffusing at d_u - d12
  DdsLimit,       // u_t = Lap(d_a u_a + d_b u_b) + f, (u_a, u_b) from Q_DDS = 0
  DdsFast,        // (u_a, u_b, v) with the nonlinear starvation exchange
};

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view name);

struct ModelSpec {
  Variant variant = Variant::SktPlusLimit;
  double epsilon = 0.0;  // fast variants only
  ReactionParams reaction;
  TransitionRates rates;
  std::optional<DdsParams> dds;

  bool is_fast() const;
  bool is_dds() const;
  // The aggregated system a fast variant converges to (identity for limits).
  Variant limit_variant() const;
  ModelSpec limit() const;
  // Same family with a different fast variant/epsilon.
  ModelSpec fast(double eps) const;

  // Species stored in SimState: {u, v} for limits, {u_a, u_b, v} for fast.
  std::size_t species() const { return is_fast() ? 3 : 2; }
  std::vector<std::string> field_names() const;

  // Diffusion coefficients of (u_a, u_b) in the fast variants.
  double d_a() const;
  double d_b() const;

  // Throws ConfigError on any precondition violation of the owning modules.
  void validate() const;
};

// Diffusivity D(u, v) of the aggregated system and its gradient.
double diffusivity(const ModelSpec& m, double u, double v);
Grad2 diffusivity_gradient(const ModelSpec& m, double u, double v);

// Quasi-steady fraction u_b / u (phi for SKT, the Q_DDS root for DDS).
Partition quasi_steady_partition(const ModelSpec& m, double u, double v,
                                 std::optional<double> guess = std::nullopt);

}  // namespace crossdiff
