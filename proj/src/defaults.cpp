#include "ropeid/defaults.hpp"

#include <json.hpp>

#include "ropeid/rng.hpp"

namespace ropeid {

using nlohmann::json;

ArmModel default_arm() {
  ArmModel arm;
  const double half_pi = M_PI / 2.0;
  arm.dh = {DhRow{0.0, -half_pi, 0.30, 0.0}, DhRow{0.0, half_pi, 0.0, 0.0},
            DhRow{0.0, -half_pi, 0.30, 0.0}, DhRow{0.0, half_pi, 0.0, 0.0},
            DhRow{0.0, -half_pi, 0.32, 0.0}, DhRow{0.0, half_pi, 0.0, 0.0},
            DhRow{0.0, 0.0, 0.10, 0.0}};
  arm.q_min = {-2.9, -2.0, -2.9, -2.2, -2.9, -1.8, -2.9};
  arm.q_max = {2.9, 2.0, 2.9, 2.2, 2.9, 1.8, 2.9};
  arm.velocity_limit = {3.14, 3.14, 3.14, 3.14, 3.14, 3.14, 3.14};
  arm.tool_extension_m = 0.20;
  return arm;
}

JointVector default_home() {
  // pitch distributed over joints 2 and 4 so the tool ends up horizontal
  return {0.0, 0.6, 0.0, -1.0, 0.0, 0.4, 0.0};
}

ToolPose default_home_pose() { return forward_kinematics(default_arm(), default_home()); }

CameraModel default_camera() {
  const ToolPose tip = default_home_pose();
  CameraModel cam;
  cam.lookat = Vec3(tip.position.x(), 0.0, tip.position.z() - 0.30);
  cam.position = cam.lookat + Vec3(0.0, -0.65, 0.0);
  cam.up = Vec3::UnitZ();
  cam.focal_px = 700.0;
  cam.width = 1280;
  cam.height = 720;
  cam.depth_nominal_m = 0.65;
  return cam;
}

SceneGeometry wiggle_scene() {
  SceneGeometry scene;
  scene.ground_height = 0.0;
  return scene;
}

std::string WiggleSpec::to_json() const {
  json j;
  j["kind"] = kind;
  j["joint_index"] = joint_index;
  j["amplitude_rad"] = amplitude_rad;
  j["frequency_hz"] = frequency_hz;
  j["frequency_end_hz"] = frequency_end_hz;
  j["n_frames"] = n_frames;
  j["rate_hz"] = rate_hz;
  j["seed"] = seed;
  return j.dump(2);
}

WiggleSpec WiggleSpec::from_json(const std::string& text) {
  const json j = json::parse(text);
  WiggleSpec s;
  s.kind = j.value("kind", std::string("sinusoid"));
  s.joint_index = j.value("joint_index", 5);
  s.amplitude_rad = j.value("amplitude_rad", 25.0 * M_PI / 180.0);
  s.frequency_hz = j.value("frequency_hz", 0.75);
  s.frequency_end_hz = j.value("frequency_end_hz", 2.0);
  s.n_frames = j.value("n_frames", 400);
  s.rate_hz = j.value("rate_hz", 60.0);
  s.seed = j.value("seed", std::uint64_t{0});
  return s;
}

WiggleSpec main_wiggle() { return WiggleSpec{}; }

WiggleSpec chirp_wiggle() {
  WiggleSpec s;
  s.kind = "chirp";
  s.amplitude_rad = 30.0 * M_PI / 180.0;
  s.frequency_hz = 0.5;
  s.frequency_end_hz = 2.0;
  return s;
}

BaseMotion wiggle_motion(const WiggleSpec& spec, const ArmModel& arm, const JointVector& home) {
  if (spec.kind == "sinusoid") {
    return to_base_motion(arm, wiggle_trajectory(arm, spec.joint_index, spec.amplitude_rad,
                                                 spec.frequency_hz, spec.n_frames, spec.rate_hz,
                                                 home));
  }
  if (spec.kind == "chirp") {
    JointTrajectory traj;
    traj.times.resize(spec.n_frames);
    traj.positions.resize(spec.n_frames);
    traj.velocities.resize(spec.n_frames);
    const double duration = (spec.n_frames - 1) / spec.rate_hz;
    for (int k = 0; k < spec.n_frames; ++k) {
      const double t = k / spec.rate_hz;
      // linear chirp: phase = 2*pi*(f0*t + (f1-f0) t^2 / (2*duration))
      const double phase =
          2.0 * M_PI *
          (spec.frequency_hz * t +
           (spec.frequency_end_hz - spec.frequency_hz) * t * t / (2.0 * duration));
      const double inst_freq =
          spec.frequency_hz + (spec.frequency_end_hz - spec.frequency_hz) * t / duration;
      traj.times[k] = t;
      traj.positions[k] = home;
      traj.velocities[k] = JointVector{};
      traj.positions[k][spec.joint_index] += spec.amplitude_rad * std::sin(phase);
      traj.velocities[k][spec.joint_index] =
          spec.amplitude_rad * 2.0 * M_PI * inst_freq * std::cos(phase);
    }
    return to_base_motion(arm, traj);
  }
  if (spec.kind == "meander") {
    // slow drift through random waypoints: a deliberately weak excitation
    Rng rng(spec.seed + 0x77a9);
    WaypointPlan plan;
    plan.q0 = home;
    plan.duration = (spec.n_frames - 1) / spec.rate_hz;
    for (auto& w : plan.waypoints) {
      w = home;
      for (int j : {1, 3, 5}) w[j] += rng.uniform(-0.25, 0.25);
    }
    return to_base_motion(arm, spline_plan(arm, plan, spec.rate_hz));
  }
  throw std::invalid_argument("wiggle_motion: unknown kind " + spec.kind);
}

}  // namespace ropeid
