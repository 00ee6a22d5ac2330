#include "ropeid/augmentation.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "ropeid/rng.hpp"

namespace ropeid {

using nlohmann::json;

std::string AugmentConfig::to_json() const {
  json j;
  j["enabled"] = enabled;
  j["calib_sigma_m"] = calib_sigma_m;
  j["track_px_max"] = track_px_max;
  j["track_alpha"] = track_alpha;
  j["lateral_ratio"] = lateral_ratio;
  j["pad_max"] = pad_max;
  return j.dump(2);
}

AugmentConfig AugmentConfig::from_json(const std::string& text) {
  const json j = json::parse(text);
  AugmentConfig c;
  c.enabled = j.value("enabled", true);
  c.calib_sigma_m = j.value("calib_sigma_m", 0.02);
  c.track_px_max = j.value("track_px_max", 3.0);
  c.track_alpha = j.value("track_alpha", 0.8);
  c.lateral_ratio = j.value("lateral_ratio", 0.5);
  c.pad_max = j.value("pad_max", 20);
  return c;
}

std::uint64_t AugmentConfig::digest() const {
  // FNV-1a over the canonical JSON text
  const std::string text = to_json();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

CameraModel calibration_noise(const CameraModel& camera, const AugmentConfig& cfg,
                              std::uint64_t seed) {
  CameraModel out = camera;
  if (cfg.calib_sigma_m <= 0.0) return out;
  Rng rng(seed);
  for (int i = 0; i < 3; ++i) out.position[i] += rng.normal(0.0, cfg.calib_sigma_m);
  for (int i = 0; i < 3; ++i) out.lookat[i] += rng.normal(0.0, cfg.calib_sigma_m);
  return out;
}

TrackedPoints tracking_noise(const TrackedPoints& tracked, const AugmentConfig& cfg,
                             std::uint64_t seed) {
  TrackedPoints out = tracked;
  Rng rng(seed);
  const double sigma_long = rng.uniform(0.0, cfg.track_px_max);
  const double sigma_lat = cfg.lateral_ratio * sigma_long;
  if (sigma_long <= 0.0) return out;
  const int n = tracked.num_points();
  const int t_count = tracked.frame_count();
  std::vector<Vec2> state(n, Vec2::Zero());  // (longitudinal, lateral) per point
  for (int t = 0; t < t_count; ++t) {
    for (int i = 0; i < n; ++i) {
      Vec2& s = state[i];
      s.x() = cfg.track_alpha * s.x() + rng.normal(0.0, sigma_long);
      s.y() = cfg.track_alpha * s.y() + rng.normal(0.0, sigma_lat);
      // longitudinal axis: local segment direction in the clean input
      const int a = i + 1 < n ? i : i - 1;
      Vec2 axis = tracked.points[t][a + 1] - tracked.points[t][a];
      const double norm = axis.norm();
      axis = norm > 1e-9 ? Vec2(axis / norm) : Vec2(1.0, 0.0);
      const Vec2 perp(-axis.y(), axis.x());
      out.points[t][i] += s.x() * axis + s.y() * perp;
    }
  }
  return out;
}

TrackedPoints pad_start(const TrackedPoints& tracked, const AugmentConfig& cfg, std::uint64_t seed,
                        int t_max) {
  Rng rng(seed);
  const int k = static_cast<int>(rng.integer(static_cast<std::uint64_t>(cfg.pad_max) + 1));
  if (tracked.frame_count() + k > t_max)
    throw std::invalid_argument("pad_start: padded trajectory exceeds t_max");
  if (k == 0) return tracked;
  TrackedPoints out;
  out.frame_rate = tracked.frame_rate;
  out.points.reserve(tracked.frame_count() + k);
  for (int i = 0; i < k; ++i) out.points.push_back(tracked.points.front());
  out.points.insert(out.points.end(), tracked.points.begin(), tracked.points.end());
  return out;
}

FeatureTensor curriculum_mask(const FeatureTensor& features, int epoch, std::uint64_t seed) {
  if (epoch < 50) return features;
  Rng rng(seed);
  const int t_max = features.t_max;
  const int max_start = t_max - kMaskBlockFrames;
  if (max_start < 0) return features;

  int blocks;
  bool beginning_biased;
  if (epoch < 200) {
    blocks = 1 + static_cast<int>(rng.integer(2));
    beginning_biased = false;
  } else if (epoch < 400) {
    blocks = 1 + static_cast<int>(rng.integer(2));
    beginning_biased = true;
  } else {
    blocks = 7;
    beginning_biased = true;
  }

  FeatureTensor out = features;
  for (int b = 0; b < blocks; ++b) {
    int start;
    if (!beginning_biased) {
      start = static_cast<int>(rng.integer(static_cast<std::uint64_t>(max_start) + 1));
    } else {
      // weight(start) = t_max - start, sampled by inverting the cumulative sum
      // of the arithmetic series
      const double lo = static_cast<double>(t_max - max_start);  // weight of last start
      const double hi = static_cast<double>(t_max);              // weight of start 0
      const double total = 0.5 * (lo + hi) * (max_start + 1);
      double u = rng.uniform() * total;
      start = 0;
      double acc = 0.0;
      for (int s = 0; s <= max_start; ++s) {
        acc += t_max - s;
        if (u <= acc) {
          start = s;
          break;
        }
        start = s;
      }
    }
    for (int t = start; t < start + kMaskBlockFrames && t < t_max; ++t)
      for (int c = 0; c < out.channels; ++c) out.at(t, c) = 0.0f;
  }
  return out;
}

}  // namespace ropeid
