#include "ropeid/arm.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ropeid {

using nlohmann::json;

bool ArmModel::within_limits(const JointVector& q, double tol) const {
  for (int j = 0; j < kArmDof; ++j)
    if (q[j] < q_min[j] - tol || q[j] > q_max[j] + tol) return false;
  return true;
}

Mat4 end_effector_transform(const ArmModel& arm, const JointVector& q) {
  Mat4 t = Mat4::Identity();
  for (int j = 0; j < kArmDof; ++j) {
    const DhRow& row = arm.dh[j];
    const double th = q[j] + row.theta_offset;
    const double ct = std::cos(th), st = std::sin(th);
    const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
    Mat4 a;
    a << ct, -st * ca, st * sa, row.a * ct,
         st, ct * ca, -ct * sa, row.a * st,
         0.0, sa, ca, row.d,
         0.0, 0.0, 0.0, 1.0;
    t = t * a;
  }
  return t;
}

ToolPose forward_kinematics(const ArmModel& arm, const JointVector& q) {
  const Mat4 t = end_effector_transform(arm, q);
  ToolPose pose;
  pose.direction = t.block<3, 1>(0, 2);
  pose.position = t.block<3, 1>(0, 3) + arm.tool_extension_m * pose.direction;
  return pose;
}

namespace {

// Clamped cubic spline via Hermite form: solves the tridiagonal system for
// interior slopes with zero end slopes.
struct ClampedCubic {
  std::vector<double> knots;   // times
  std::vector<double> values;  // one joint's waypoints
  std::vector<double> slopes;

  void fit() {
    const int n = static_cast<int>(knots.size());
    slopes.assign(n, 0.0);
    if (n < 3) return;
    // tridiagonal system for s_1..s_{n-2}; s_0 = s_{n-1} = 0
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
    for (int i = 1; i + 1 < n; ++i) {
      const double h0 = knots[i] - knots[i - 1];
      const double h1 = knots[i + 1] - knots[i];
      a[i] = 1.0 / h0;
      b[i] = 2.0 * (1.0 / h0 + 1.0 / h1);
      c[i] = 1.0 / h1;
      r[i] = 3.0 * ((values[i] - values[i - 1]) / (h0 * h0) +
                    (values[i + 1] - values[i]) / (h1 * h1));
    }
    for (int i = 2; i + 1 < n; ++i) {
      const double m = a[i] / b[i - 1];
      b[i] -= m * c[i - 1];
      r[i] -= m * r[i - 1];
    }
    for (int i = n - 2; i >= 1; --i)
      slopes[i] = (r[i] - (i + 1 < n - 1 ? c[i] * slopes[i + 1] : 0.0)) / b[i];
  }

  void eval(double t, double& pos, double& vel) const {
    const int n = static_cast<int>(knots.size());
    int seg = 0;
    while (seg + 2 < n && t > knots[seg + 1]) ++seg;
    const double h = knots[seg + 1] - knots[seg];
    const double u = std::clamp((t - knots[seg]) / h, 0.0, 1.0);
    const double p0 = values[seg], p1 = values[seg + 1];
    const double m0 = slopes[seg] * h, m1 = slopes[seg + 1] * h;
    const double u2 = u * u, u3 = u2 * u;
    pos = (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * m0 +
          (-2 * u3 + 3 * u2) * p1 + (u3 - u2) * m1;
    vel = ((6 * u2 - 6 * u) * p0 + (3 * u2 - 4 * u + 1) * m0 +
           (-6 * u2 + 6 * u) * p1 + (3 * u2 - 2 * u) * m1) / h;
  }
};

}  // namespace

JointTrajectory spline_plan(const ArmModel& arm, const WaypointPlan& plan, double rate) {
  if (plan.duration <= 0.0) throw std::invalid_argument("spline_plan: duration must be positive");
  for (const auto& w : plan.waypoints)
    if (!arm.within_limits(w)) throw std::invalid_argument("spline_plan: waypoint outside joint limits");
  if (!arm.within_limits(plan.q0)) throw std::invalid_argument("spline_plan: q0 outside joint limits");

  std::vector<bool> active(kArmDof, true);
  if (plan.planar_mask) {
    active.assign(kArmDof, false);
    for (int j : *plan.planar_mask) {
      if (j < 0 || j >= kArmDof) throw std::invalid_argument("spline_plan: planar_mask joint out of range");
      active[j] = true;
    }
  }

  const double t_knot = plan.duration / 3.0;
  std::array<ClampedCubic, kArmDof> splines;
  for (int j = 0; j < kArmDof; ++j) {
    splines[j].knots = {0.0, t_knot, 2.0 * t_knot, plan.duration};
    if (active[j]) {
      splines[j].values = {plan.q0[j], plan.waypoints[0][j], plan.waypoints[1][j],
                           plan.waypoints[2][j]};
    } else {
      splines[j].values.assign(4, plan.q0[j]);
    }
    splines[j].fit();
  }

  const int count = std::max(2, static_cast<int>(std::lround(plan.duration * rate)) + 1);
  const double dt = plan.duration / (count - 1);
  JointTrajectory traj;
  traj.times.resize(count);
  traj.positions.resize(count);
  traj.velocities.resize(count);
  for (int k = 0; k < count; ++k) {
    const double t = k * dt;
    traj.times[k] = t;
    for (int j = 0; j < kArmDof; ++j)
      splines[j].eval(t, traj.positions[k][j], traj.velocities[k][j]);
  }
  return traj;
}

JointTrajectory enforce_velocity_limits(const JointTrajectory& traj, const ArmModel& arm) {
  double scale = 1.0;
  for (const auto& v : traj.velocities)
    for (int j = 0; j < kArmDof; ++j)
      scale = std::max(scale, std::abs(v[j]) / arm.velocity_limit[j]);
  if (scale <= 1.0 + 1e-12) return traj;
  JointTrajectory out = traj;
  out.time_scale = traj.time_scale * scale;
  for (auto& t : out.times) t *= scale;
  for (auto& v : out.velocities)
    for (int j = 0; j < kArmDof; ++j) v[j] /= scale;
  return out;
}

JointTrajectory wiggle_trajectory(const ArmModel& arm, int joint_index, double amplitude_rad,
                                  double frequency_hz, int n_frames, double rate,
                                  const JointVector& q_home) {
  if (joint_index < 0 || joint_index >= kArmDof)
    throw std::invalid_argument("wiggle_trajectory: joint index out of range");
  if (amplitude_rad < 0.0 || frequency_hz <= 0.0 || n_frames < 1 || rate <= 0.0)
    throw std::invalid_argument("wiggle_trajectory: invalid amplitude/frequency/frames/rate");
  if (q_home[joint_index] + amplitude_rad > arm.q_max[joint_index] ||
      q_home[joint_index] - amplitude_rad < arm.q_min[joint_index])
    throw std::invalid_argument("wiggle_trajectory: amplitude exceeds joint limit");

  JointTrajectory traj;
  traj.times.resize(n_frames);
  traj.positions.resize(n_frames);
  traj.velocities.resize(n_frames);
  const double omega = 2.0 * M_PI * frequency_hz;
  for (int k = 0; k < n_frames; ++k) {
    const double t = k / rate;
    traj.times[k] = t;
    traj.positions[k] = q_home;
    traj.velocities[k] = JointVector{};
    traj.positions[k][joint_index] += amplitude_rad * std::sin(omega * t);
    traj.velocities[k][joint_index] = amplitude_rad * omega * std::cos(omega * t);
  }
  return traj;
}

BaseMotion to_base_motion(const ArmModel& arm, const JointTrajectory& traj) {
  if (traj.times.empty()) throw std::invalid_argument("to_base_motion: empty trajectory");
  BaseMotion motion;
  motion.samples.reserve(traj.times.size());
  for (int k = 0; k < traj.sample_count(); ++k) {
    const ToolPose pose = forward_kinematics(arm, traj.positions[k]);
    motion.samples.push_back({traj.times[k], pose.position, pose.direction.normalized()});
  }
  return motion;
}

std::string to_json(const ArmModel& arm) {
  json j;
  j["dh"] = json::array();
  for (const auto& row : arm.dh)
    j["dh"].push_back({{"a", row.a}, {"alpha", row.alpha}, {"d", row.d},
                       {"theta_offset", row.theta_offset}});
  j["q_min"] = arm.q_min;
  j["q_max"] = arm.q_max;
  j["velocity_limit"] = arm.velocity_limit;
  j["tool_extension_m"] = arm.tool_extension_m;
  return j.dump(2);
}

ArmModel arm_from_json(const std::string& text) {
  const json j = json::parse(text);
  ArmModel arm;
  const auto& dh = j.at("dh");
  if (dh.size() != kArmDof) throw std::invalid_argument("arm_from_json: expected 7 dh rows");
  for (int i = 0; i < kArmDof; ++i) {
    arm.dh[i].a = dh[i].at("a").get<double>();
    arm.dh[i].alpha = dh[i].at("alpha").get<double>();
    arm.dh[i].d = dh[i].at("d").get<double>();
    arm.dh[i].theta_offset = dh[i].at("theta_offset").get<double>();
  }
  for (int i = 0; i < kArmDof; ++i) {
    arm.q_min[i] = j.at("q_min")[i].get<double>();
    arm.q_max[i] = j.at("q_max")[i].get<double>();
    arm.velocity_limit[i] = j.at("velocity_limit")[i].get<double>();
  }
  arm.tool_extension_m = j.at("tool_extension_m").get<double>();
  for (int i = 0; i < kArmDof; ++i)
    if (!(arm.q_min[i] < arm.q_max[i]))
      throw std::invalid_argument("arm_from_json: joint limits must satisfy min < max");
  return arm;
}

void export_joint_trajectory_csv(const JointTrajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_joint_trajectory_csv: cannot open " + path);
  out << "t";
  for (int j = 1; j <= kArmDof; ++j) out << ",q" << j;
  for (int j = 1; j <= kArmDof; ++j) out << ",v" << j;
  out << "\n";
  char buf[64];
  for (int k = 0; k < traj.sample_count(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.12g", traj.times[k]);
    out << buf;
    for (int j = 0; j < kArmDof; ++j) {
      std::snprintf(buf, sizeof(buf), ",%.12g", traj.positions[k][j]);
      out << buf;
    }
    for (int j = 0; j < kArmDof; ++j) {
      std::snprintf(buf, sizeof(buf), ",%.12g", traj.velocities[k][j]);
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace ropeid
