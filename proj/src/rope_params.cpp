#include "ropeid/rope_params.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "ropeid/rng.hpp"

namespace ropeid {

using nlohmann::json;

std::array<double, kNumRopeParams> RopeParams::as_array() const {
  return {static_cast<double>(num_links),
          rope_length_m,
          ball_damping,
          ball_stiffness,
          rope_radius_m,
          mass_per_unit_length_kg_m,
          lead_mass_kg,
          lead_radius_m,
          link_extra_scale};
}

RopeParams RopeParams::from_array(const std::array<double, kNumRopeParams>& raw) {
  RopeParams p;
  p.num_links = static_cast<int>(std::lround(raw[0]));
  p.rope_length_m = raw[1];
  p.ball_damping = raw[2];
  p.ball_stiffness = raw[3];
  p.rope_radius_m = raw[4];
  p.mass_per_unit_length_kg_m = raw[5];
  p.lead_mass_kg = raw[6];
  p.lead_radius_m = raw[7];
  p.link_extra_scale = raw[8];
  return p;
}

bool ParamBounds::ordered() const {
  for (int i = 0; i < kNumRopeParams; ++i)
    if (!(min[i] < max[i])) return false;
  return true;
}

const std::array<std::string, kNumRopeParams>& param_names() {
  static const std::array<std::string, kNumRopeParams> names = {
      "num_links",    "rope_length_m", "ball_damping",
      "ball_stiffness", "rope_radius_m", "mass_per_unit_length_kg_m",
      "lead_mass_kg", "lead_radius_m", "link_extra_scale"};
  return names;
}

const std::array<std::string, kNumRopeParams>& param_units() {
  static const std::array<std::string, kNumRopeParams> units = {
      "", "m", "N*m*s/rad", "N*m/rad", "m", "kg/m", "kg", "m", ""};
  return units;
}

NormalizedParams normalize(const RopeParams& params, const ParamBounds& bounds) {
  if (!bounds.ordered()) throw std::invalid_argument("normalize: bounds must satisfy min < max");
  const auto raw = params.as_array();
  NormalizedParams out;
  for (int i = 0; i < kNumRopeParams; ++i) {
    if (!std::isfinite(raw[i]))
      throw std::invalid_argument("normalize: non-finite value for " + param_names()[i]);
    const double v = (raw[i] - bounds.min[i]) / (bounds.max[i] - bounds.min[i]);
    out.values[i] = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

RopeParams denormalize(const NormalizedParams& norm, const ParamBounds& bounds) {
  if (!bounds.ordered()) throw std::invalid_argument("denormalize: bounds must satisfy min < max");
  std::array<double, kNumRopeParams> raw;
  for (int i = 0; i < kNumRopeParams; ++i) {
    const double v = norm.values[i];
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("denormalize: entry outside [0,1] for " + param_names()[i]);
    raw[i] = bounds.min[i] + v * (bounds.max[i] - bounds.min[i]);
  }
  return RopeParams::from_array(raw);
}

std::vector<NormalizedParams> sample_lhs_unit(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_lhs_unit: n must be >= 1");
  Rng rng(seed);
  std::vector<NormalizedParams> out(n);
  std::vector<int> perm(n);
  for (int d = 0; d < kNumRopeParams; ++d) {
    std::iota(perm.begin(), perm.end(), 0);
    // Fisher-Yates
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.integer(static_cast<std::uint64_t>(i) + 1));
      std::swap(perm[i], perm[j]);
    }
    for (int k = 0; k < n; ++k) {
      const double u = rng.uniform();
      out[k].values[d] = (perm[k] + u) / n;
    }
  }
  return out;
}

std::vector<RopeParams> sample_lhs(int n, const ParamBounds& bounds, std::uint64_t seed) {
  const auto unit = sample_lhs_unit(n, seed);
  std::vector<RopeParams> out;
  out.reserve(unit.size());
  for (const auto& u : unit) out.push_back(denormalize(u, bounds));
  return out;
}

std::vector<std::string> validate(const RopeParams& params) {
  std::vector<std::string> violations;
  const auto raw = params.as_array();
  for (int i = 0; i < kNumRopeParams; ++i) {
    if (!std::isfinite(raw[i]))
      violations.push_back(param_names()[i] + " is not finite");
    else if (raw[i] <= 0.0)
      violations.push_back(param_names()[i] + " must be strictly positive");
  }
  if (params.num_links < 2) violations.push_back("num_links must be >= 2");
  return violations;
}

std::string to_json(const RopeParams& params) {
  json j;
  const auto raw = params.as_array();
  j[param_names()[0]] = params.num_links;
  for (int i = 1; i < kNumRopeParams; ++i) j[param_names()[i]] = raw[i];
  return j.dump(2);
}

RopeParams rope_params_from_json(const std::string& text) {
  const json j = json::parse(text);
  std::array<double, kNumRopeParams> raw;
  for (int i = 0; i < kNumRopeParams; ++i) raw[i] = j.at(param_names()[i]).get<double>();
  return RopeParams::from_array(raw);
}

std::string to_json(const ParamBounds& bounds) {
  json j;
  for (int i = 0; i < kNumRopeParams; ++i) {
    j[param_names()[i]] = {{"min", bounds.min[i]}, {"max", bounds.max[i]}};
  }
  return j.dump(2);
}

ParamBounds bounds_from_json(const std::string& text) {
  const json j = json::parse(text);
  ParamBounds b;
  for (int i = 0; i < kNumRopeParams; ++i) {
    const auto& e = j.at(param_names()[i]);
    b.min[i] = e.at("min").get<double>();
    b.max[i] = e.at("max").get<double>();
  }
  if (!b.ordered()) throw std::invalid_argument("bounds_from_json: min must be < max");
  return b;
}

}  // namespace ropeid
