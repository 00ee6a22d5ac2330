#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ropeid/geometry.hpp"
#include "ropeid/rope_sim.hpp"

namespace ropeid {

struct CameraModel {
  Vec3 position{0.0, -0.65, 0.5};
  Vec3 lookat{0.0, 0.0, 0.5};
  Vec3 up = Vec3::UnitZ();
  double focal_px = 700.0;
  int width = 1280;
  int height = 720;
  double depth_nominal_m = 0.65;
};

// 2D point tracks, points[t][i] in pixels. Image v grows downward.
struct TrackedPoints {
  std::vector<std::vector<Vec2>> points;
  double frame_rate = 60.0;

  int frame_count() const { return static_cast<int>(points.size()); }
  int num_points() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
};

enum class FeatureSet : std::uint32_t {
  kPositionsAngles = 0,  // deployment set
  kAll = 1,              // adds angular velocity and acceleration channels
};

// Channels per tracked point for a feature set.
int channels_per_point(FeatureSet set);

// Fixed-shape network input. Layout per frame: [x~_1..x~_N, y~_1..y~_N,
// theta_1..theta_N, (dtheta_1..N), (ddtheta_1..N)], row-major over frames.
// Frames at or beyond valid_frames are zero.
struct FeatureTensor {
  std::vector<float> grid;  // t_max * channels
  int t_max = 420;
  int channels = 0;
  int valid_frames = 0;
  int num_points = 0;
  FeatureSet feature_set = FeatureSet::kPositionsAngles;
  double frame_rate = 60.0;

  float at(int t, int c) const { return grid[static_cast<std::size_t>(t) * channels + c]; }
  float& at(int t, int c) { return grid[static_cast<std::size_t>(t) * channels + c]; }
};

// Pinhole projection of every link center. Throws when a point is at or
// behind the camera plane. No clipping to the image rectangle.
TrackedPoints project(const CameraModel& camera, const LinkTrajectory& traj);

Vec2 project_point(const CameraModel& camera, const Vec3& p);

// Resamples each frame's polyline at `count` uniformly spaced arc-length
// positions (endpoints included). This fixes the tracked-point count
// independently of the rope's link count, mirroring centerline tracking.
TrackedPoints resample_arclength(const TrackedPoints& tracked, int count);

// Discrete Gaussian, normalized to sum 1. Size must be odd.
std::vector<double> gaussian_kernel(double sigma, int size);

// Cumulative unwrap: successive differences mapped into (-pi, pi].
std::vector<double> unwrap_angles(const std::vector<double>& series);

// Feature extraction per the two-benefit normalization: positions relative
// to the first point (scaled by image height), per-segment image-plane
// angles (unwrapped over time; angle of point 1 defined 0), and optionally
// smoothed angular velocity (sigma 1.0, size 5) and acceleration (sigma 1.5,
// size 7) in rad/s and rad/s^2. Zero-padded/truncated to t_max.
FeatureTensor extract_features(const TrackedPoints& tracked, FeatureSet set, int t_max = 420,
                               double image_height = 720.0);

// CSV with header frame,point,u,v.
void export_tracked_csv(const TrackedPoints& tracked, const std::string& path);
TrackedPoints ingest_tracked_csv(const std::string& path, double frame_rate = 60.0);

// Binary feature format: magic "WAGF", version, dims, f32 grid.
void save_features(const FeatureTensor& f, const std::string& path);
FeatureTensor load_features(const std::string& path);

}  // namespace ropeid
