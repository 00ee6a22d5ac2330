#include "ropeid/observation.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ropeid {

int channels_per_point(FeatureSet set) {
  return set == FeatureSet::kAll ? 5 : 3;
}

namespace {

struct CameraFrame {
  Vec3 origin, right, down, forward;
};

CameraFrame camera_frame(const CameraModel& cam) {
  const Vec3 f = (cam.lookat - cam.position);
  const double n = f.norm();
  if (n < 1e-12) throw std::invalid_argument("camera: position must differ from lookat");
  if (cam.focal_px <= 0.0) throw std::invalid_argument("camera: focal length must be positive");
  CameraFrame out;
  out.origin = cam.position;
  out.forward = f / n;
  Vec3 r = out.forward.cross(cam.up);
  if (r.norm() < 1e-9) throw std::invalid_argument("camera: up vector parallel to view direction");
  out.right = r.normalized();
  out.down = out.forward.cross(out.right);
  return out;
}

Vec2 project_with_frame(const CameraModel& cam, const CameraFrame& fr, const Vec3& p) {
  const Vec3 q = p - fr.origin;
  const double z = q.dot(fr.forward);
  if (z <= 1e-9) throw std::invalid_argument("project: point at or behind the camera plane");
  return {cam.width / 2.0 + cam.focal_px * q.dot(fr.right) / z,
          cam.height / 2.0 + cam.focal_px * q.dot(fr.down) / z};
}

// Convolution with edge replication, preserving length.
std::vector<double> smooth(const std::vector<double>& x, const std::vector<double>& kernel) {
  const int n = static_cast<int>(x.size());
  const int half = static_cast<int>(kernel.size()) / 2;
  std::vector<double> out(n, 0.0);
  for (int t = 0; t < n; ++t) {
    double acc = 0.0;
    for (int k = 0; k < static_cast<int>(kernel.size()); ++k) {
      const int idx = std::clamp(t + k - half, 0, n - 1);
      acc += kernel[k] * x[idx];
    }
    out[t] = acc;
  }
  return out;
}

std::vector<double> central_derivative(const std::vector<double>& x, double rate) {
  const int n = static_cast<int>(x.size());
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  for (int t = 1; t + 1 < n; ++t) out[t] = 0.5 * (x[t + 1] - x[t - 1]) * rate;
  out[0] = (x[1] - x[0]) * rate;
  out[n - 1] = (x[n - 1] - x[n - 2]) * rate;
  return out;
}

}  // namespace

Vec2 project_point(const CameraModel& camera, const Vec3& p) {
  return project_with_frame(camera, camera_frame(camera), p);
}

TrackedPoints project(const CameraModel& camera, const LinkTrajectory& traj) {
  const CameraFrame fr = camera_frame(camera);
  TrackedPoints out;
  out.frame_rate = traj.frame_rate;
  out.points.resize(traj.frame_count());
  for (int t = 0; t < traj.frame_count(); ++t) {
    out.points[t].reserve(traj.num_links());
    for (const Vec3& p : traj.frames[t]) out.points[t].push_back(project_with_frame(camera, fr, p));
  }
  return out;
}

TrackedPoints resample_arclength(const TrackedPoints& tracked, int count) {
  if (count < 2) throw std::invalid_argument("resample_arclength: need at least 2 points");
  if (tracked.num_points() < 2)
    throw std::invalid_argument("resample_arclength: need at least 2 input points");
  TrackedPoints out;
  out.frame_rate = tracked.frame_rate;
  out.points.resize(tracked.frame_count());
  const int n = tracked.num_points();
  std::vector<double> arc(n);
  for (int t = 0; t < tracked.frame_count(); ++t) {
    const auto& pts = tracked.points[t];
    arc[0] = 0.0;
    for (int i = 1; i < n; ++i) arc[i] = arc[i - 1] + (pts[i] - pts[i - 1]).norm();
    auto& dst = out.points[t];
    dst.resize(count);
    if (arc[n - 1] <= 1e-12) {
      for (int k = 0; k < count; ++k) dst[k] = pts[0];
      continue;
    }
    int seg = 0;
    for (int k = 0; k < count; ++k) {
      const double s = arc[n - 1] * k / (count - 1);
      while (seg + 2 < n && arc[seg + 1] < s) ++seg;
      const double len = arc[seg + 1] - arc[seg];
      const double u = len > 1e-12 ? (s - arc[seg]) / len : 0.0;
      dst[k] = pts[seg] + std::clamp(u, 0.0, 1.0) * (pts[seg + 1] - pts[seg]);
    }
  }
  return out;
}

std::vector<double> gaussian_kernel(double sigma, int size) {
  if (size < 1 || size % 2 == 0)
    throw std::invalid_argument("gaussian_kernel: size must be odd and >= 1");
  if (sigma <= 0.0) throw std::invalid_argument("gaussian_kernel: sigma must be positive");
  std::vector<double> w(size);
  const int half = size / 2;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double x = i - half;
    w[i] = std::exp(-0.5 * x * x / (sigma * sigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

std::vector<double> unwrap_angles(const std::vector<double>& series) {
  std::vector<double> out(series.size());
  if (series.empty()) return out;
  out[0] = series[0];
  for (std::size_t t = 1; t < series.size(); ++t) {
    double d = std::remainder(series[t] - series[t - 1], 2.0 * M_PI);
    if (d <= -M_PI) d += 2.0 * M_PI;
    out[t] = out[t - 1] + d;
  }
  return out;
}

FeatureTensor extract_features(const TrackedPoints& tracked, FeatureSet set, int t_max,
                               double image_height) {
  const int n = tracked.num_points();
  const int t_in = tracked.frame_count();
  if (n < 2) throw std::invalid_argument("extract_features: need at least 2 points");
  if (t_in < 2) throw std::invalid_argument("extract_features: need at least 2 frames");
  for (const auto& frame : tracked.points)
    for (const auto& p : frame)
      if (!p.allFinite()) throw std::invalid_argument("extract_features: non-finite input");

  FeatureTensor f;
  f.t_max = t_max;
  f.num_points = n;
  f.feature_set = set;
  f.channels = n * channels_per_point(set);
  f.frame_rate = tracked.frame_rate;
  f.valid_frames = std::min(t_in, t_max);
  f.grid.assign(static_cast<std::size_t>(t_max) * f.channels, 0.0f);

  // positions relative to the first point, in units of image height
  for (int t = 0; t < f.valid_frames; ++t) {
    const Vec2 origin = tracked.points[t][0];
    for (int i = 0; i < n; ++i) {
      const Vec2 rel = (tracked.points[t][i] - origin) / image_height;
      f.at(t, i) = static_cast<float>(rel.x());
      f.at(t, n + i) = static_cast<float>(rel.y());
    }
  }

  // per-segment image-plane angles, unwrapped along time
  std::vector<std::vector<double>> angles(n, std::vector<double>(f.valid_frames, 0.0));
  for (int i = 1; i < n; ++i) {
    std::vector<double> raw(f.valid_frames);
    for (int t = 0; t < f.valid_frames; ++t) {
      const Vec2 seg = tracked.points[t][i] - tracked.points[t][i - 1];
      raw[t] = std::atan2(seg.y(), seg.x());
    }
    angles[i] = unwrap_angles(raw);
  }
  for (int t = 0; t < f.valid_frames; ++t)
    for (int i = 0; i < n; ++i) f.at(t, 2 * n + i) = static_cast<float>(angles[i][t]);

  if (set == FeatureSet::kAll) {
    const auto k_vel = gaussian_kernel(1.0, 5);
    const auto k_acc = gaussian_kernel(1.5, 7);
    const double rate = tracked.frame_rate;
    for (int i = 0; i < n; ++i) {
      const auto vel = smooth(central_derivative(angles[i], rate), k_vel);
      const auto acc = smooth(central_derivative(central_derivative(angles[i], rate), rate), k_acc);
      for (int t = 0; t < f.valid_frames; ++t) {
        f.at(t, 3 * n + i) = static_cast<float>(vel[t]);
        f.at(t, 4 * n + i) = static_cast<float>(acc[t]);
      }
    }
  }
  return f;
}

void export_tracked_csv(const TrackedPoints& tracked, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_tracked_csv: cannot open " + path);
  out << "frame,point,u,v\n";
  char buf[96];
  for (int t = 0; t < tracked.frame_count(); ++t) {
    for (int i = 0; i < tracked.num_points(); ++i) {
      std::snprintf(buf, sizeof(buf), "%d,%d,%.12g,%.12g\n", t, i, tracked.points[t][i].x(),
                    tracked.points[t][i].y());
      out << buf;
    }
  }
}

TrackedPoints ingest_tracked_csv(const std::string& path, double frame_rate) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingest_tracked_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("ingest_tracked_csv: empty file");
  TrackedPoints out;
  out.frame_rate = frame_rate;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    int frame, point;
    double u, v;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &frame, &point, &u, &v) != 4)
      throw std::runtime_error("ingest_tracked_csv: malformed row at line " + std::to_string(line_no));
    if (frame == static_cast<int>(out.points.size())) {
      if (point != 0)
        throw std::runtime_error("ingest_tracked_csv: frame must start at point 0 (line " +
                                 std::to_string(line_no) + ")");
      out.points.emplace_back();
    } else if (frame != static_cast<int>(out.points.size()) - 1) {
      throw std::runtime_error("ingest_tracked_csv: missing or out-of-order frame index at line " +
                               std::to_string(line_no));
    }
    if (point != static_cast<int>(out.points.back().size()))
      throw std::runtime_error("ingest_tracked_csv: point indices must be contiguous (line " +
                               std::to_string(line_no) + ")");
    out.points.back().push_back({u, v});
  }
  if (out.points.empty()) throw std::runtime_error("ingest_tracked_csv: no data rows");
  for (const auto& frame : out.points)
    if (frame.size() != out.points.front().size())
      throw std::runtime_error("ingest_tracked_csv: ragged frames");
  return out;
}

void save_features(const FeatureTensor& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_features: cannot open " + path);
  const char magic[4] = {'W', 'A', 'G', 'F'};
  const std::uint32_t version = 1;
  const std::uint32_t vals[5] = {static_cast<std::uint32_t>(f.t_max),
                                 static_cast<std::uint32_t>(f.channels),
                                 static_cast<std::uint32_t>(f.valid_frames),
                                 static_cast<std::uint32_t>(f.num_points),
                                 static_cast<std::uint32_t>(f.feature_set)};
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(vals), sizeof(vals));
  out.write(reinterpret_cast<const char*>(&f.frame_rate), 8);
  out.write(reinterpret_cast<const char*>(f.grid.data()),
            static_cast<std::streamsize>(f.grid.size() * sizeof(float)));
  if (!out) throw std::runtime_error("save_features: write failed for " + path);
}

FeatureTensor load_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_features: cannot open " + path);
  char magic[4];
  std::uint32_t version, vals[5];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "WAGF", 4) != 0)
    throw std::runtime_error("load_features: bad magic in " + path);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(vals), sizeof(vals));
  FeatureTensor f;
  f.t_max = static_cast<int>(vals[0]);
  f.channels = static_cast<int>(vals[1]);
  f.valid_frames = static_cast<int>(vals[2]);
  f.num_points = static_cast<int>(vals[3]);
  f.feature_set = static_cast<FeatureSet>(vals[4]);
  in.read(reinterpret_cast<char*>(&f.frame_rate), 8);
  f.grid.resize(static_cast<std::size_t>(f.t_max) * f.channels);
  in.read(reinterpret_cast<char*>(f.grid.data()),
          static_cast<std::streamsize>(f.grid.size() * sizeof(float)));
  if (!in) throw std::runtime_error("load_features: truncated file " + path);
  return f;
}

}  // namespace ropeid
