#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ropeid/geometry.hpp"
#include "ropeid/rope_sim.hpp"

namespace ropeid {

inline constexpr int kArmDof = 7;

using JointVector = std::array<double, kArmDof>;

// One standard Denavit-Hartenberg row: RotZ(theta+offset) TransZ(d) TransX(a)
// RotX(alpha).
struct DhRow {
  double a = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double theta_offset = 0.0;
};

struct ArmModel {
  std::array<DhRow, kArmDof> dh;
  JointVector q_min;
  JointVector q_max;
  JointVector velocity_limit;  // rad/s
  double tool_extension_m = 0.20;

  bool within_limits(const JointVector& q, double tol = 1e-9) const;
};

// Pose of the pole tip: position plus the tool axis direction.
struct ToolPose {
  Vec3 position = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();
};

// Three joint-space waypoints after q0, traversed over `duration` seconds.
// planar_mask, when set, lists the joints allowed to move; all others stay at
// q0.
struct WaypointPlan {
  JointVector q0{};
  std::array<JointVector, 3> waypoints{};
  double duration = 2.0;
  std::optional<std::vector<int>> planar_mask;
};

struct JointTrajectory {
  std::vector<double> times;                  // uniform, increasing
  std::vector<JointVector> positions;
  std::vector<JointVector> velocities;
  // Factor by which enforce_velocity_limits stretched time (1 = untouched).
  double time_scale = 1.0;

  int sample_count() const { return static_cast<int>(times.size()); }
};

// Pole-tip pose for a configuration (end-effector frame advanced by the tool
// extension along its z axis).
ToolPose forward_kinematics(const ArmModel& arm, const JointVector& q);

// 4x4 end-effector transform (before the tool extension).
Mat4 end_effector_transform(const ArmModel& arm, const JointVector& q);

// Clamped cubic spline per joint through (q0, w1, w2, w3) at knot times
// (0, T/3, 2T/3, T), zero velocity at both ends, sampled at `rate`.
// Waypoints outside joint limits throw.
JointTrajectory spline_plan(const ArmModel& arm, const WaypointPlan& plan, double rate = 100.0);

// Uniform time scaling so every joint respects its velocity limit; identity
// when already feasible. The sampled positions (the geometric path) are
// unchanged.
JointTrajectory enforce_velocity_limits(const JointTrajectory& traj, const ArmModel& arm);

// q(t) = q_home except joint_index follows amplitude*sin(2*pi*frequency*t);
// n_frames samples at `rate`. Throws when the oscillation leaves the joint's
// limits.
JointTrajectory wiggle_trajectory(const ArmModel& arm, int joint_index, double amplitude_rad,
                                  double frequency_hz, int n_frames, double rate,
                                  const JointVector& q_home);

// Forward kinematics per sample -> attachment-frame motion for the rope.
BaseMotion to_base_motion(const ArmModel& arm, const JointTrajectory& traj);

// Arm config JSON: dh rows, limits, tool_extension_m.
std::string to_json(const ArmModel& arm);
ArmModel arm_from_json(const std::string& text);

// CSV export with header t,q1..q7,v1..v7.
void export_joint_trajectory_csv(const JointTrajectory& traj, const std::string& path);

}  // namespace ropeid
