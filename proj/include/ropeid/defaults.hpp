#pragma once

#include "ropeid/arm.hpp"
#include "ropeid/observation.hpp"
#include "ropeid/rope_params.hpp"
#include "ropeid/rope_sim.hpp"

namespace ropeid {

// Default 7-DOF arm (alternating-twist DH chain, 20 cm pole extender).
ArmModel default_arm();

// Home configuration used for wiggles and as the plan start: tool roughly
// horizontal along +x, tip high enough that a 0.65 m rope clears the ground.
JointVector default_home();

// Tool-tip pose at the home configuration (golden value, see arm tests).
ToolPose default_home_pose();

// Camera 0.65 m in front of the wiggle plane (the x-z plane through the
// home tip), framing the hanging rope.
CameraModel default_camera();

// Scene used while observing wiggles: just the ground plane.
SceneGeometry wiggle_scene();

// Oscillation of one joint about home. kind "sinusoid" and "chirp" sweep
// joint_index; "meander" is a low-excitation random waypoint spline (the
// unstructured-trajectory baseline).
struct WiggleSpec {
  std::string kind = "sinusoid";  // sinusoid | chirp | meander
  int joint_index = 5;
  double amplitude_rad = 25.0 * M_PI / 180.0;
  double frequency_hz = 0.75;
  double frequency_end_hz = 2.0;  // chirp only
  int n_frames = 400;
  double rate_hz = 60.0;
  std::uint64_t seed = 0;  // meander only

  std::string to_json() const;
  static WiggleSpec from_json(const std::string& text);
};

// The primary wiggle: joint 6, 25 deg, 0.75 Hz, 400 frames at 60 FPS.
WiggleSpec main_wiggle();

// Higher-jerk test motion: joint-6 chirp 0.5 -> 2 Hz at 30 deg.
WiggleSpec chirp_wiggle();

BaseMotion wiggle_motion(const WiggleSpec& spec, const ArmModel& arm, const JointVector& home);

}  // namespace ropeid
