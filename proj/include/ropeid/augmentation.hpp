#pragma once

#include <cstdint>
#include <string>

#include "ropeid/observation.hpp"

namespace ropeid {

struct AugmentConfig {
  bool enabled = true;
  double calib_sigma_m = 0.02;
  double track_px_max = 3.0;    // longitudinal noise std drawn from [0, max]
  double track_alpha = 0.8;     // AR(1) temporal correlation
  double lateral_ratio = 0.5;   // lateral std as a fraction of longitudinal
  int pad_max = 20;             // frames prepended at the start

  std::string to_json() const;
  static AugmentConfig from_json(const std::string& text);
  std::uint64_t digest() const;
};

// Gaussian perturbation (calib_sigma_m per coordinate) of camera position
// and lookat.
CameraModel calibration_noise(const CameraModel& camera, const AugmentConfig& cfg,
                              std::uint64_t seed);

// Temporally correlated anisotropic tracking noise. Per point an AR(1) state
// n_t = alpha*n_{t-1} + eps_t is evolved in a (longitudinal, lateral) frame,
// with eps std drawn once per trajectory (longitudinal U[0, track_px_max],
// lateral = lateral_ratio * longitudinal), then projected onto each frame's
// local segment direction.
TrackedPoints tracking_noise(const TrackedPoints& tracked, const AugmentConfig& cfg,
                             std::uint64_t seed);

// Prepends k ~ U{0..pad_max} copies of frame 0. Throws when the result would
// exceed t_max frames.
TrackedPoints pad_start(const TrackedPoints& tracked, const AugmentConfig& cfg, std::uint64_t seed,
                        int t_max = 420);

// Curriculum masking schedule. Before epoch 50: identity. Epochs [50,200):
// 1-2 random 50-frame blocks zeroed. [200,400): same count, block starts
// drawn with weight (t_max - start), biasing the trajectory beginning.
// From 400 on: 7 blocks, same bias. Masked frames are zero in all channels.
FeatureTensor curriculum_mask(const FeatureTensor& features, int epoch, std::uint64_t seed);

inline constexpr int kMaskBlockFrames = 50;

}  // namespace ropeid
