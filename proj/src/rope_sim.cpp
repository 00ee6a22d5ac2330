#include "ropeid/rope_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace ropeid {

namespace {

constexpr double kAirDensity = 1.2;     // kg/m^3
constexpr double kDragCylinder = 1.2;   // drag coefficient, cylinder cross-flow
constexpr double kDragSphere = 0.47;    // drag coefficient, sphere
constexpr double kDivergenceLimit = 100.0;  // m

void check_finite_or_throw(const RopeState& state) {
  for (const auto& p : state.positions) {
    if (!p.allFinite() || p.cwiseAbs().maxCoeff() > kDivergenceLimit)
      throw SimDivergedError(state.time);
  }
}

struct Contact {
  bool active = false;
  Vec3 normal = Vec3::UnitZ();
  double depth = 0.0;
};

// Pushes a sphere of radius r out of the scene surfaces. Returns the last
// resolved contact for the friction pass.
Contact resolve_scene_contact(Vec3& p, double r, const SceneGeometry& scene) {
  Contact contact;
  if (scene.ground_height) {
    const double pen = (*scene.ground_height + r) - p.z();
    if (pen > 0.0) {
      p.z() += pen;
      contact = {true, Vec3::UnitZ(), pen};
    }
  }
  for (const Aabb* box : {scene.wall ? &*scene.wall : nullptr, scene.board ? &*scene.board : nullptr}) {
    if (!box) continue;
    if (box->contains(p)) {
      // push out along the face with least penetration
      const Vec3 to_min = p - box->min;
      const Vec3 to_max = box->max - p;
      int axis = 0;
      double best = to_min[0];
      int sign = -1;
      for (int a = 0; a < 3; ++a) {
        if (to_min[a] < best) { best = to_min[a]; axis = a; sign = -1; }
        if (to_max[a] < best) { best = to_max[a]; axis = a; sign = 1; }
      }
      Vec3 n = Vec3::Zero();
      n[axis] = sign;
      p[axis] = (sign > 0 ? box->max[axis] + r : box->min[axis] - r);
      contact = {true, n, best + r};
    } else {
      const Vec3 q = box->closest_point(p);
      const Vec3 d = p - q;
      const double dist = d.norm();
      if (dist < r && dist > 1e-12) {
        const Vec3 n = d / dist;
        p = q + n * r;
        contact = {true, n, r - dist};
      }
    }
  }
  return contact;
}

double contact_radius(const RopeParams& params, int link) {
  return link == params.num_links - 1 ? std::max(params.rope_radius_m, params.lead_radius_m)
                                      : params.rope_radius_m;
}

// Gradients of the relative joint angle theta at joint i with respect to the
// three adjacent link centers. Returns false when the segments are (anti-)
// parallel and the rotation plane is undefined.
bool joint_angle_gradients(const Vec3& prev, const Vec3& mid, const Vec3& next, double& theta,
                           Vec3& g_prev, Vec3& g_mid, Vec3& g_next) {
  const Vec3 a = mid - prev;
  const Vec3 b = next - mid;
  const double la = a.norm(), lb = b.norm();
  if (la < 1e-12 || lb < 1e-12) return false;
  const Vec3 ua = a / la, ub = b / lb;
  const Vec3 cross = ua.cross(ub);
  const double sin_t = cross.norm();
  const double cos_t = std::clamp(ua.dot(ub), -1.0, 1.0);
  theta = std::atan2(sin_t, cos_t);
  if (sin_t < 1e-9) return false;
  const Vec3 n = cross / sin_t;
  g_prev = n.cross(ua) / la;
  g_next = n.cross(ub) / lb;
  g_mid = -(g_prev + g_next);
  return true;
}

}  // namespace

BasePose BaseMotion::at(double t) const {
  if (samples.empty()) throw std::invalid_argument("BaseMotion::at: empty motion");
  if (t <= samples.front().time) return {t, samples.front().position, samples.front().direction};
  if (t >= samples.back().time) return {t, samples.back().position, samples.back().direction};
  auto it = std::upper_bound(samples.begin(), samples.end(), t,
                             [](double v, const BasePose& s) { return v < s.time; });
  const BasePose& hi = *it;
  const BasePose& lo = *(it - 1);
  const double u = (t - lo.time) / (hi.time - lo.time);
  BasePose out;
  out.time = t;
  out.position = lo.position + u * (hi.position - lo.position);
  Vec3 dir = lo.direction + u * (hi.direction - lo.direction);
  const double n = dir.norm();
  out.direction = n > 1e-9 ? Vec3(dir / n) : lo.direction;
  return out;
}

void BaseMotion::check() const {
  if (samples.empty()) throw std::invalid_argument("BaseMotion: no samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i > 0 && !(samples[i].time > samples[i - 1].time))
      throw std::invalid_argument("BaseMotion: times must be strictly increasing");
    if (std::abs(samples[i].direction.norm() - 1.0) > 1e-6)
      throw std::invalid_argument("BaseMotion: directions must be unit-norm");
  }
}

BaseMotion BaseMotion::with_settle(double duration, double sample_dt) const {
  BaseMotion out = *this;
  if (samples.empty() || duration <= 0.0) return out;
  BasePose hold = samples.back();
  for (double t = sample_dt; t < duration + sample_dt * 0.5; t += sample_dt) {
    hold.time = samples.back().time + t;
    out.samples.push_back(hold);
  }
  return out;
}

std::vector<double> link_masses(const RopeParams& params) {
  // Segment j's mass is lumped onto link j+1; link 0 is the driven attachment
  // point and carries none.
  const int n = params.num_links;
  const double seg_mass =
      params.mass_per_unit_length_kg_m * params.segment_length() * params.link_extra_scale;
  std::vector<double> masses(n, seg_mass);
  masses[0] = 0.0;
  masses[n - 1] += params.lead_mass_kg;
  return masses;
}

RopeState build_rope(const RopeParams& params, const BasePose& base, bool drive_first_segment) {
  const auto violations = validate(params);
  if (!violations.empty())
    throw std::invalid_argument("build_rope: invalid params: " + violations.front());
  const int n = params.num_links;
  const double seg = params.segment_length();
  RopeState state;
  state.positions.resize(n);
  state.velocities.assign(n, Vec3::Zero());
  state.time = base.time;
  state.positions[0] = base.position;
  int first_free = 1;
  if (drive_first_segment && n >= 2) {
    state.positions[1] = base.position + seg * base.direction;
    first_free = 2;
  }
  for (int i = first_free; i < n; ++i)
    state.positions[i] = state.positions[i - 1] - seg * Vec3::UnitZ();
  return state;
}

void substep(RopeState& state, const RopeParams& params, const BasePose& base_now,
             const BasePose& base_next, const SceneGeometry& scene, const SimConfig& config,
             double h) {
  const int n = state.num_links();
  const double seg = params.segment_length();
  const auto masses = link_masses(params);
  const int driven = config.drive_first_segment && n >= 2 ? 2 : 1;

  std::vector<double> inv_mass(n);
  for (int i = 0; i < n; ++i) inv_mass[i] = (i < driven || masses[i] <= 0.0) ? 0.0 : 1.0 / masses[i];

  // forces on free links: gravity, joint stiffness handled as a compliant
  // constraint below, aerodynamic drag
  const double drag_link = config.air_drag * 0.5 * kAirDensity * kDragCylinder *
                           (2.0 * params.rope_radius_m * seg);
  const double drag_lead = config.air_drag * 0.5 * kAirDensity * kDragSphere * M_PI *
                           params.lead_radius_m * params.lead_radius_m;
  std::vector<Vec3> prev_positions = state.positions;
  for (int i = driven; i < n; ++i) {
    Vec3 force = masses[i] * config.gravity * -Vec3::UnitZ();
    const double kappa = drag_link + (i == n - 1 ? drag_lead : 0.0);
    force -= kappa * state.velocities[i].norm() * state.velocities[i];
    state.velocities[i] += h * inv_mass[i] * force;
    state.positions[i] += h * state.velocities[i];
  }

  // driven boundary: link 0 (and link 1 when the first segment is slaved)
  state.positions[0] = base_next.position;
  state.velocities[0] = (base_next.position - base_now.position) / h;
  if (driven == 2) {
    state.positions[1] = base_next.position + seg * base_next.direction;
    const Vec3 p1_now = base_now.position + seg * base_now.direction;
    state.velocities[1] = (state.positions[1] - p1_now) / h;
  }

  // constraint projection: inextensible segments (zero compliance) plus
  // joint-angle constraints with compliance 1/k (XPBD), interleaved with
  // scene contacts. Segment sweeps alternate direction, which propagates
  // corrections along the chain much faster than one-directional passes.
  const double alpha_tilde =
      params.ball_stiffness > 0.0 ? 1.0 / (params.ball_stiffness * h * h) : -1.0;
  std::vector<double> lambda(std::max(0, n - 2), 0.0);
  std::vector<Contact> contacts(n);
  for (int iter = 0; iter < config.constraint_iterations; ++iter) {
    const bool forward = (iter % 2) == 0;
    for (int s = 0; s < n - 1; ++s) {
      const int j = forward ? s : n - 2 - s;
      const int i0 = j, i1 = j + 1;
      const double w = inv_mass[i0] + inv_mass[i1];
      if (w <= 0.0) continue;
      Vec3 d = state.positions[i1] - state.positions[i0];
      const double len = d.norm();
      if (len < 1e-12) continue;
      const double corr = (len - seg) / w;
      const Vec3 dir = d / len;
      state.positions[i0] += inv_mass[i0] * corr * dir;
      state.positions[i1] -= inv_mass[i1] * corr * dir;
    }
    if (alpha_tilde > 0.0) {
      for (int i = 1; i < n - 1; ++i) {
        double theta;
        Vec3 g_prev, g_mid, g_next;
        if (!joint_angle_gradients(state.positions[i - 1], state.positions[i],
                                   state.positions[i + 1], theta, g_prev, g_mid, g_next))
          continue;
        const double denom = inv_mass[i - 1] * g_prev.squaredNorm() +
                             inv_mass[i] * g_mid.squaredNorm() +
                             inv_mass[i + 1] * g_next.squaredNorm() + alpha_tilde;
        if (denom <= 0.0) continue;
        const double dlambda = (-theta - alpha_tilde * lambda[i - 1]) / denom;
        lambda[i - 1] += dlambda;
        state.positions[i - 1] += inv_mass[i - 1] * dlambda * g_prev;
        state.positions[i] += inv_mass[i] * dlambda * g_mid;
        state.positions[i + 1] += inv_mass[i + 1] * dlambda * g_next;
      }
    }
    for (int i = driven; i < n; ++i) {
      const Contact c = resolve_scene_contact(state.positions[i], contact_radius(params, i), scene);
      if (c.active) contacts[i] = c;
    }
  }

  // distance-only stabilization tail: the bending and contact passes above
  // may leave residual stretch, so finish on exactly satisfied segments
  for (int iter = 0; iter < config.constraint_iterations; ++iter) {
    const bool forward = (iter % 2) == 0;
    double worst = 0.0;
    for (int s = 0; s < n - 1; ++s) {
      const int j = forward ? s : n - 2 - s;
      const int i0 = j, i1 = j + 1;
      const double w = inv_mass[i0] + inv_mass[i1];
      if (w <= 0.0) continue;
      Vec3 d = state.positions[i1] - state.positions[i0];
      const double len = d.norm();
      if (len < 1e-12) continue;
      worst = std::max(worst, std::abs(len - seg));
      const double corr = (len - seg) / w;
      const Vec3 dir = d / len;
      state.positions[i0] += inv_mass[i0] * corr * dir;
      state.positions[i1] -= inv_mass[i1] * corr * dir;
    }
    if (worst < 1e-5 * seg) break;
  }

  // velocity recomputation from positions
  for (int i = driven; i < n; ++i)
    state.velocities[i] = (state.positions[i] - prev_positions[i]) / h;

  // velocity projection onto the constraint tangent space (the RATTLE step):
  // removes relative radial velocities so the position solve does not have to
  // absorb them next substep, which is what keeps the scheme near-conservative
  for (int iter = 0; iter < config.constraint_iterations; ++iter) {
    const bool forward = (iter % 2) == 0;
    double worst = 0.0;
    for (int s = 0; s < n - 1; ++s) {
      const int j = forward ? s : n - 2 - s;
      const int i0 = j, i1 = j + 1;
      const double w = inv_mass[i0] + inv_mass[i1];
      if (w <= 0.0) continue;
      Vec3 d = state.positions[i1] - state.positions[i0];
      const double len = d.norm();
      if (len < 1e-12) continue;
      const Vec3 dir = d / len;
      const double v_rel = (state.velocities[i1] - state.velocities[i0]).dot(dir);
      worst = std::max(worst, std::abs(v_rel));
      const double corr = v_rel / w;
      state.velocities[i0] += inv_mass[i0] * corr * dir;
      state.velocities[i1] -= inv_mass[i1] * corr * dir;
    }
    if (worst < 1e-9) break;
  }

  // joint damping: exact implicit decay of each joint-angle rate
  if (params.ball_damping > 0.0) {
    for (int i = 1; i < n - 1; ++i) {
      double theta;
      Vec3 g_prev, g_mid, g_next;
      if (!joint_angle_gradients(state.positions[i - 1], state.positions[i],
                                 state.positions[i + 1], theta, g_prev, g_mid, g_next))
        continue;
      const double w_sum = inv_mass[i - 1] * g_prev.squaredNorm() +
                           inv_mass[i] * g_mid.squaredNorm() +
                           inv_mass[i + 1] * g_next.squaredNorm();
      if (w_sum <= 0.0) continue;
      const double theta_dot = g_prev.dot(state.velocities[i - 1]) +
                               g_mid.dot(state.velocities[i]) +
                               g_next.dot(state.velocities[i + 1]);
      // I_eff = 1 / w_sum; theta_dot decays by exp(-c h / I_eff)
      const double decay = std::exp(-params.ball_damping * h * w_sum);
      const double impulse = (decay - 1.0) * theta_dot / w_sum;
      state.velocities[i - 1] += inv_mass[i - 1] * impulse * g_prev;
      state.velocities[i] += inv_mass[i] * impulse * g_mid;
      state.velocities[i + 1] += inv_mass[i + 1] * impulse * g_next;
    }
  }

  // contact velocity pass: inelastic normal response, Coulomb-capped friction
  for (int i = driven; i < n; ++i) {
    if (!contacts[i].active) continue;
    Vec3& v = state.velocities[i];
    const Vec3& nrm = contacts[i].normal;
    const double vn = v.dot(nrm);
    if (vn < 0.0) {
      v -= vn * nrm;
      Vec3 vt = v - v.dot(nrm) * nrm;
      const double vt_norm = vt.norm();
      const double max_drop = config.friction * (-vn);
      if (vt_norm > 1e-12) v -= vt * (std::min(vt_norm, max_drop) / vt_norm);
    }
  }

  state.time += h;
  check_finite_or_throw(state);
}

RopeState step(const RopeState& state, const RopeParams& params, const BaseMotion& motion,
               const SceneGeometry& scene, const SimConfig& config) {
  RopeState out = state;
  const double h = config.substep();
  for (int s = 0; s < config.substeps_per_dt; ++s) {
    const double t = state.time + s * h;
    substep(out, params, motion.at(t), motion.at(t + h), scene, config, h);
  }
  out.time = state.time + config.dt;
  return out;
}

LinkTrajectory simulate(const RopeParams& params, const BaseMotion& motion,
                        const SceneGeometry& scene, const SimConfig& config, double record_rate) {
  motion.check();
  if (record_rate <= 0.0) throw std::invalid_argument("simulate: record_rate must be positive");
  const double t0 = motion.start_time();
  const double span = motion.end_time() - t0;
  const int frames = static_cast<int>(std::lround(span * record_rate)) + 1;

  RopeState state = build_rope(params, motion.at(t0), config.drive_first_segment);
  state.time = t0;

  LinkTrajectory traj;
  traj.frame_rate = record_rate;
  traj.frames.reserve(frames);
  traj.frames.push_back(state.positions);

  const double frame_dt = 1.0 / record_rate;
  const double h_nominal = config.substep();
  const int per_frame = std::max(1, static_cast<int>(std::ceil(frame_dt / h_nominal - 1e-9)));
  const double h = frame_dt / per_frame;
  for (int k = 1; k < frames; ++k) {
    const double t_frame = t0 + (k - 1) * frame_dt;
    for (int s = 0; s < per_frame; ++s) {
      const double t = t_frame + s * h;
      substep(state, params, motion.at(t), motion.at(t + h), scene, config, h);
    }
    state.time = t0 + k * frame_dt;  // keep frame times exact
    traj.frames.push_back(state.positions);
  }
  return traj;
}

DistanceProfile tip_distance_profile(const LinkTrajectory& traj, const Vec3& target) {
  if (traj.frames.empty()) throw std::invalid_argument("tip_distance_profile: empty trajectory");
  DistanceProfile out;
  out.distances.reserve(traj.frames.size());
  out.min_distance = std::numeric_limits<double>::infinity();
  for (int k = 0; k < traj.frame_count(); ++k) {
    const double d = (traj.frames[k].back() - target).norm();
    out.distances.push_back(d);
    if (d < out.min_distance) {
      out.min_distance = d;
      out.min_frame = k;
    }
  }
  return out;
}

std::vector<ContactEvent> contact_events(const LinkTrajectory& traj, const RopeParams& params,
                                         const SceneGeometry& scene, double tolerance) {
  if (!scene.ground_height && !scene.wall && !scene.board)
    throw std::invalid_argument("contact_events: scene has no surfaces");
  std::vector<ContactEvent> events;
  for (int k = 0; k < traj.frame_count(); ++k) {
    for (int i = 0; i < traj.num_links(); ++i) {
      const Vec3& p = traj.frames[k][i];
      const double r = contact_radius(params, i);
      if (scene.ground_height && p.z() - r <= *scene.ground_height + tolerance)
        events.push_back({k, i, "ground"});
      if (scene.wall && scene.wall->signed_distance(p) <= r + tolerance)
        events.push_back({k, i, "wall"});
      if (scene.board && scene.board->signed_distance(p) <= r + tolerance)
        events.push_back({k, i, "board"});
    }
  }
  return events;
}

double max_segment_strain(const LinkTrajectory& traj, const RopeParams& params) {
  const double seg = params.segment_length();
  double worst = 0.0;
  for (const auto& frame : traj.frames) {
    for (std::size_t i = 0; i + 1 < frame.size(); ++i) {
      const double len = (frame[i + 1] - frame[i]).norm();
      worst = std::max(worst, std::abs(len - seg) / seg);
    }
  }
  return worst;
}

double mechanical_energy(const RopeState& state, const RopeParams& params, double gravity) {
  const auto masses = link_masses(params);
  double e = 0.0;
  for (int i = 0; i < state.num_links(); ++i) {
    e += 0.5 * masses[i] * state.velocities[i].squaredNorm();
    e += masses[i] * gravity * state.positions[i].z();
  }
  return e;
}

void save_trajectory(const LinkTrajectory& traj, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_trajectory: cannot open " + path);
  const char magic[4] = {'W', 'A', 'G', 'T'};
  const std::uint32_t version = 1;
  const std::uint32_t t = traj.frame_count();
  const std::uint32_t n = traj.num_links();
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&t), 4);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&traj.frame_rate), 8);
  for (const auto& frame : traj.frames)
    for (const auto& p : frame) out.write(reinterpret_cast<const char*>(p.data()), 24);
  if (!out) throw std::runtime_error("save_trajectory: write failed for " + path);
}

LinkTrajectory load_trajectory(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_trajectory: cannot open " + path);
  char magic[4];
  std::uint32_t version = 0, t = 0, n = 0;
  LinkTrajectory traj;
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "WAGT", 4) != 0)
    throw std::runtime_error("load_trajectory: bad magic in " + path);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&t), 4);
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&traj.frame_rate), 8);
  traj.frames.assign(t, std::vector<Vec3>(n));
  for (auto& frame : traj.frames)
    for (auto& p : frame) in.read(reinterpret_cast<char*>(p.data()), 24);
  if (!in) throw std::runtime_error("load_trajectory: truncated file " + path);
  return traj;
}

void export_trajectory_csv(const LinkTrajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_trajectory_csv: cannot open " + path);
  out << "frame,link,x,y,z\n";
  char buf[128];
  for (int k = 0; k < traj.frame_count(); ++k) {
    for (int i = 0; i < traj.num_links(); ++i) {
      const Vec3& p = traj.frames[k][i];
      std::snprintf(buf, sizeof(buf), "%d,%d,%.12g,%.12g,%.12g\n", k, i, p.x(), p.y(), p.z());
      out << buf;
    }
  }
}

}  // namespace ropeid
