#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ropeid {

inline constexpr int kNumRopeParams = 9;

// The nine behavioral parameters of the ball-joint rope representation.
// Stiffness and damping are rotational joint coefficients (N*m/rad and
// N*m*s/rad); link_extra_scale is a fraction (0.5..1.2 = 50..120 %).
struct RopeParams {
  int num_links = 23;
  double rope_length_m = 0.55;
  double ball_damping = 0.02;
  double ball_stiffness = 0.4;
  double rope_radius_m = 0.008;
  double mass_per_unit_length_kg_m = 0.06;
  double lead_mass_kg = 0.06;
  double lead_radius_m = 0.03;
  double link_extra_scale = 0.85;

  double segment_length() const { return rope_length_m / (num_links - 1); }

  // Values as a 9-vector in the canonical parameter order (num_links first,
  // promoted to real).
  std::array<double, kNumRopeParams> as_array() const;
  static RopeParams from_array(const std::array<double, kNumRopeParams>& raw);
};

// Per-parameter [min, max] training bounds. Defaults reproduce the
// in-distribution training ranges used throughout.
struct ParamBounds {
  std::array<double, kNumRopeParams> min{20.0, 0.45, 0.001, 0.05, 0.003, 0.02, 0.02, 0.015, 0.5};
  std::array<double, kNumRopeParams> max{26.0, 0.65, 0.05, 1.0, 0.015, 0.12, 0.12, 0.045, 1.2};

  bool ordered() const;
};

// Canonical parameter names, also used as JSON keys.
const std::array<std::string, kNumRopeParams>& param_names();

// Units for reporting.
const std::array<std::string, kNumRopeParams>& param_units();

// 9-vector in [0,1], the network's native output space.
struct NormalizedParams {
  std::array<double, kNumRopeParams> values{};
};

// Maps raw parameters into [0,1]^9, clamping out-of-range values (so that
// out-of-distribution ropes can flow through the pipeline). Throws on
// non-finite input.
NormalizedParams normalize(const RopeParams& params, const ParamBounds& bounds);

// Inverse of normalize on [0,1]^9; num_links is rounded to the nearest
// integer. Throws if any entry lies outside [0,1].
RopeParams denormalize(const NormalizedParams& norm, const ParamBounds& bounds);

// Latin hypercube sample of the unit box: n points, every dimension
// stratified into n bins with exactly one point per bin. Deterministic in
// seed.
std::vector<NormalizedParams> sample_lhs_unit(int n, std::uint64_t seed);

// LHS sample mapped into bounds (num_links rounded per denormalize).
std::vector<RopeParams> sample_lhs(int n, const ParamBounds& bounds, std::uint64_t seed);

// Empty when params are usable: all fields finite and positive, num_links
// >= 2. Links may overlap (segment length is allowed to be smaller than the
// rope diameter).
std::vector<std::string> validate(const RopeParams& params);

// JSON (de)serialization. Keys: num_links, rope_length_m, ball_damping,
// ball_stiffness, rope_radius_m, mass_per_unit_length_kg_m, lead_mass_kg,
// lead_radius_m, link_extra_scale.
std::string to_json(const RopeParams& params);
RopeParams rope_params_from_json(const std::string& text);
std::string to_json(const ParamBounds& bounds);
ParamBounds bounds_from_json(const std::string& text);

}  // namespace ropeid
