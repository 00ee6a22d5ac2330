#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace ropeid {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// Axis-aligned box, used for scene walls, boards and keep-out regions.
struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool valid() const { return (max.array() > min.array()).all(); }
  Vec3 center() const { return 0.5 * (min + max); }

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }

  // Closest point on the solid box to p (p itself when inside).
  Vec3 closest_point(const Vec3& p) const { return p.cwiseMax(min).cwiseMin(max); }

  // Signed distance: negative inside, measured to the nearest face.
  double signed_distance(const Vec3& p) const {
    if (!contains(p)) return (p - closest_point(p)).norm();
    const Vec3 to_min = p - min;
    const Vec3 to_max = max - p;
    return -std::min(to_min.minCoeff(), to_max.minCoeff());
  }
};

// Distance from point p to segment [a, b].
inline double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace ropeid
