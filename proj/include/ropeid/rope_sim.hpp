#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ropeid/geometry.hpp"
#include "ropeid/rope_params.hpp"

namespace ropeid {

// Thrown when the integration blows up (non-finite or runaway coordinates).
struct SimDivergedError : std::runtime_error {
  explicit SimDivergedError(double t)
      : std::runtime_error("simulation diverged at t=" + std::to_string(t)), time(t) {}
  double time = 0.0;
};

// Link-center particle state of the chain.
struct RopeState {
  std::vector<Vec3> positions;
  std::vector<Vec3> velocities;
  double time = 0.0;

  int num_links() const { return static_cast<int>(positions.size()); }
};

struct SimConfig {
  double dt = 0.01;
  int substeps_per_dt = 4;
  int constraint_iterations = 20;
  double gravity = 9.81;
  double friction = 0.5;
  // Scale on the aerodynamic drag model (1 = physical estimate, 0 = off).
  // Drag is what gives rope_radius and lead_radius a dynamic footprint in
  // free air.
  double air_drag = 1.0;
  // When true, the first segment's direction is slaved to the attachment
  // frame (a rope tied to a pole tip inherits the pole's orientation at the
  // knot). Turn off for free-pendulum experiments.
  bool drive_first_segment = true;

  double substep() const { return dt / substeps_per_dt; }
};

// One commanded pose of the attachment frame.
struct BasePose {
  double time = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 direction = -Vec3::UnitZ();  // first-segment direction (unit)
};

// Sampled motion of the attachment frame. Times must be strictly increasing
// and directions unit-norm.
struct BaseMotion {
  std::vector<BasePose> samples;

  bool empty() const { return samples.empty(); }
  double start_time() const { return samples.front().time; }
  double end_time() const { return samples.back().time; }
  // Linear interpolation (direction renormalized); clamps outside the range.
  BasePose at(double t) const;
  // Validates invariants, throws on violation.
  void check() const;
  // Appends a hold of the final pose for `duration` seconds.
  BaseMotion with_settle(double duration, double sample_dt = 0.05) const;
};

struct SceneGeometry {
  std::optional<double> ground_height;
  std::optional<Vec3> target;
  std::optional<Aabb> wall;
  std::optional<Aabb> board;
  std::vector<Aabb> keep_out;
};

// Recorded link-center trajectory, frames[t][i] = position of link i.
struct LinkTrajectory {
  std::vector<std::vector<Vec3>> frames;
  double frame_rate = 60.0;

  int frame_count() const { return static_cast<int>(frames.size()); }
  int num_links() const { return frames.empty() ? 0 : static_cast<int>(frames.front().size()); }
};

// Initial state: link 0 at the base pose, the first segment along the base
// direction when driving is enabled, and the remainder hanging straight
// down. Velocities zero. Throws on invalid params.
RopeState build_rope(const RopeParams& params, const BasePose& base,
                     bool drive_first_segment = true);

// Per-link masses: interior links carry mass_per_unit_length * segment_length
// * link_extra_scale; the final link additionally carries the lead mass.
std::vector<double> link_masses(const RopeParams& params);

// Advances the state by one substep of length h, driven by the base poses at
// the start and end of the substep. Throws SimDivergedError on blow-up.
void substep(RopeState& state, const RopeParams& params, const BasePose& base_now,
             const BasePose& base_next, const SceneGeometry& scene, const SimConfig& config,
             double h);

// Advances by config.dt (convenience wrapper over substep).
RopeState step(const RopeState& state, const RopeParams& params, const BaseMotion& motion,
               const SceneGeometry& scene, const SimConfig& config);

// Runs the full motion and records frames at record_rate. Frames land exactly
// on k/record_rate (substeps are shrunk slightly so each frame boundary is
// hit), so the base boundary condition holds exactly at every recorded frame.
LinkTrajectory simulate(const RopeParams& params, const BaseMotion& motion,
                        const SceneGeometry& scene, const SimConfig& config,
                        double record_rate = 60.0);

// Per-frame distance of the final link to the target, plus the minimum and
// its frame index.
struct DistanceProfile {
  std::vector<double> distances;
  double min_distance = 0.0;
  int min_frame = 0;
};
DistanceProfile tip_distance_profile(const LinkTrajectory& traj, const Vec3& target);

// A contact of one link with one scene surface in one recorded frame.
struct ContactEvent {
  int frame = 0;
  int link = 0;
  std::string surface;  // "ground", "wall", "board", "keep_out_<i>"
};

// Post-hoc contact report on a recorded trajectory: a link is in contact
// when its sphere is within `tolerance` of a surface (resolved frames rest
// exactly on the surface, so touching counts).
std::vector<ContactEvent> contact_events(const LinkTrajectory& traj, const RopeParams& params,
                                         const SceneGeometry& scene, double tolerance = 1e-4);

// Largest relative segment strain over all frames (inextensibility check).
double max_segment_strain(const LinkTrajectory& traj, const RopeParams& params);

// Kinetic + gravitational potential energy of a state.
double mechanical_energy(const RopeState& state, const RopeParams& params, double gravity);

// Binary trajectory format: magic "WAGT", version u32, T u32, N u32,
// frame_rate f64, then T*N*3 little-endian f64.
void save_trajectory(const LinkTrajectory& traj, const std::string& path);
LinkTrajectory load_trajectory(const std::string& path);

// CSV export with header frame,link,x,y,z.
void export_trajectory_csv(const LinkTrajectory& traj, const std::string& path);

}  // namespace ropeid
