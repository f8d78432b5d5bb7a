#include "crossdiff/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "crossdiff/error.hpp"

namespace crossdiff {

namespace {

constexpr std::array<std::pair<Variant, std::string_view>, 6> kVariantNames{{
    {Variant::SktPlusLimit, "skt_plus_limit"},
    {Variant::SktMinusLimit, "skt_minus_limit"},
    {Variant::SktFastPlus, "skt_fast_plus"},
    {Variant::SktFastMinus, "skt_fast_minus"},
    {Variant::DdsLimit, "dds_limit"},
    {Variant::DdsFast, "dds_fast"},
}};

}  // namespace

std::string_view to_string(Variant v) {
  for (const auto& [value, name] : kVariantNames) {
    if (value == v) return name;
  }
  return "?";
}

Variant variant_from_string(std::string_view name) {
  for (const auto& [value, n] : kVariantNames) {
    if (n == name) return value;
  }
  throw ConfigError("unknown_variant", "unknown model variant '" + std::string(name) + "'");
}

bool ModelSpec::is_fast() const {
  return variant == Variant::SktFastPlus || variant == Variant::SktFastMinus ||
         variant == Variant::DdsFast;
}

bool ModelSpec::is_dds() const {
  return variant == Variant::DdsLimit || variant == Variant::DdsFast;
}

Variant ModelSpec::limit_variant() const {
  switch (variant) {
    case Variant::SktFastPlus: return Variant::SktPlusLimit;
    case Variant::SktFastMinus: return Variant::SktMinusLimit;
    case Variant::DdsFast: return Variant::DdsLimit;
    default: return variant;
  }
}

ModelSpec ModelSpec::limit() const {
  ModelSpec out = *this;
  out.variant = limit_variant();
  out.epsilon = 0.0;
  return out;
}

ModelSpec ModelSpec::fast(double eps) const {
  ModelSpec out = *this;
  switch (limit_variant()) {
    case Variant::SktPlusLimit: out.variant = Variant::SktFastPlus; break;
    case Variant::SktMinusLimit: out.variant = Variant::SktFastMinus; break;
    default: out.variant = Variant::DdsFast; break;
  }
  out.epsilon = eps;
  return out;
}

std::vector<std::string> ModelSpec::field_names() const {
  if (is_fast()) return {"u_a", "u_b", "v"};
  return {"u", "v"};
}

double ModelSpec::d_a() const {
  return is_dds() ? dds->d_a : reaction.d_u;
}

double ModelSpec::d_b() const {
  switch (variant) {
    case Variant::SktFastPlus:
    case Variant::SktPlusLimit: return reaction.d_u + reaction.d12;
    case Variant::SktFastMinus:
    case Variant::SktMinusLimit: return reaction.d_u - reaction.d12;
    default: return dds->d_b;
  }
}

void ModelSpec::validate() const {
  reaction.validate();
  if (is_fast() && !(epsilon > 0.0 && std::isfinite(epsilon))) {
    throw ConfigError("invalid_epsilon", "fast variants need epsilon > 0");
  }
  if (variant == Variant::SktMinusLimit || variant == Variant::SktFastMinus) {
    require_hiding_admissible(reaction);
  }
  const double sample_upper = std::max(10.0, 2.0 * reaction.r_v / reaction.r22);
  if (is_dds()) {
    if (!dds) throw ConfigError("missing_dds_params", "DDS variants need DdsParams");
    dds->validate();
    if (!rates.dds_admissible(sample_upper)) {
      throw ConfigError("rates_not_dds_admissible",
                        "DDS rates must be positive and increasing (h' >= 0, k' >= 0)");
    }
  } else if (!rates.skt_admissible(sample_upper)) {
    throw ConfigError("rates_not_skt_admissible",
                      "SKT rates must satisfy 0 < h, k <= 1, h' >= 0, k' <= 0");
  }
}

double diffusivity(const ModelSpec& m, double u, double v) {
  switch (m.limit_variant()) {
    case Variant::SktPlusLimit: return d_plus(m.reaction, m.rates, u, v);
    case Variant::SktMinusLimit: return d_minus(m.reaction, m.rates, u, v);
    default: return d_dds(*m.dds, m.rates, u, v);
  }
}

Grad2 diffusivity_gradient(const ModelSpec& m, double u, double v) {
  switch (m.limit_variant()) {
    case Variant::SktPlusLimit: return grad_d_plus(m.reaction, m.rates, u, v);
    case Variant::SktMinusLimit: return grad_d_minus(m.reaction, m.rates, u, v);
    default: return grad_d_dds(*m.dds, m.rates, u, v);
  }
}

Partition quasi_steady_partition(const ModelSpec& m, double u, double v,
                                 std::optional<double> guess) {
  if (m.is_dds()) return dds_partition(*m.dds, m.rates, u, v, guess);
  const double u_b = phi(m.rates, v) * u;
  return {u - u_b, u_b, 0.0, 0};
}

}  // namespace crossdiff
