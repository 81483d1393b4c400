#include "rtn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rtn {

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 normalized(const Vec3& v) {
  const double n = v.norm();
  if (n < 1e-12) throw std::runtime_error("synth: degenerate direction");
  return v * (1.0 / n);
}

// Quaternion from an orthonormal right-handed basis (columns x, y, z).
Quat quat_from_basis(const Vec3& x, const Vec3& y, const Vec3& z) {
  const double m00 = x.x, m10 = x.y, m20 = x.z;
  const double m01 = y.x, m11 = y.y, m21 = y.z;
  const double m02 = z.x, m12 = z.y, m22 = z.z;
  const double tr = m00 + m11 + m22;
  Quat q;
  if (tr > 0) {
    double s = std::sqrt(tr + 1.0) * 2;
    q = {0.25 * s, (m21 - m12) / s, (m02 - m20) / s, (m10 - m01) / s};
  } else if (m00 > m11 && m00 > m22) {
    double s = std::sqrt(1.0 + m00 - m11 - m22) * 2;
    q = {(m21 - m12) / s, 0.25 * s, (m01 + m10) / s, (m02 + m20) / s};
  } else if (m11 > m22) {
    double s = std::sqrt(1.0 + m11 - m00 - m22) * 2;
    q = {(m02 - m20) / s, (m01 + m10) / s, 0.25 * s, (m12 + m21) / s};
  } else {
    double s = std::sqrt(1.0 + m22 - m00 - m11) * 2;
    q = {(m10 - m01) / s, (m02 + m20) / s, (m12 + m21) / s, 0.25 * s};
  }
  return q.normalized();
}

Quat yaw(double psi) { return Quat::axis_angle({0, 1, 0}, psi); }

// Global rotation whose local -y axis points along `bone_dir`, with the local
// +z axis leaning toward `forward`.
Quat aim_bone(const Vec3& bone_dir, const Vec3& forward) {
  const Vec3 yaxis = normalized(bone_dir) * -1.0;
  Vec3 zaxis = forward - yaxis * dot(forward, yaxis);
  if (zaxis.norm() < 1e-9) zaxis = Vec3{1, 0, 0} - yaxis * dot(Vec3{1, 0, 0}, yaxis);
  zaxis = normalized(zaxis);
  const Vec3 xaxis = cross(yaxis, zaxis);
  return quat_from_basis(xaxis, yaxis, zaxis);
}

struct Style {
  double stride_scale, bob_amp, sway_amp, arm_swing, stance_width, lift;
};

Style actor_style(const GaitSpec& spec) {
  std::seed_seq seq{spec.seed, static_cast<uint64_t>(std::hash<std::string>{}(spec.actor_id))};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Style s;
  s.stride_scale = 1.0 + 0.12 * u(rng);
  s.bob_amp = 0.015 + 0.008 * u(rng);
  s.sway_amp = 0.012 + 0.006 * u(rng);
  s.arm_swing = 0.5 + 0.2 * u(rng);
  s.stance_width = 0.11 + 0.02 * u(rng);
  s.lift = 0.0;  // per-kind below
  return s;
}

struct Phase {
  bool stance;
  double u;      // progress within the phase, [0, 1)
  int stride;    // stride index
};

Phase foot_phase(double t_frames, double period, double duty, double offset) {
  const double s = t_frames / period + offset;
  const double k = std::floor(s);
  const double frac = s - k;
  Phase p;
  p.stride = static_cast<int>(k);
  if (frac < duty) {
    p.stance = true;
    p.u = frac / duty;
  } else {
    p.stance = false;
    p.u = (frac - duty) / (1.0 - duty);
  }
  return p;
}

}  // namespace

Skeleton reference_skeleton() {
  Skeleton s;
  s.joint_names = {"hips",     "spine",     "spine1",    "spine2", "neck",   "head",
                   "lclav",    "lshoulder", "lelbow",    "lwrist", "rclav",  "rshoulder",
                   "relbow",   "rwrist",    "lhip",      "lknee",  "lankle", "ltoe",
                   "rhip",     "rknee",     "rankle",    "rtoe"};
  s.parents = {-1, 0, 1, 2, 3, 4, 3, 6, 7, 8, 3, 10, 11, 12, 0, 14, 15, 16, 0, 18, 19, 20};
  s.rest_offsets = {
      {0, 0, 0},           // hips
      {0, 0.12, 0},        // spine
      {0, 0.14, 0},        // spine1
      {0, 0.14, 0},        // spine2
      {0, 0.12, 0},        // neck
      {0, 0.15, 0},        // head
      {0.08, 0.06, 0},     // lclav
      {0.12, 0, 0},        // lshoulder
      {0.28, 0, 0},        // lelbow
      {0.26, 0, 0},        // lwrist
      {-0.08, 0.06, 0},    // rclav
      {-0.12, 0, 0},       // rshoulder
      {-0.28, 0, 0},       // relbow
      {-0.26, 0, 0},       // rwrist
      {0.10, -0.05, 0},    // lhip
      {0, -0.42, 0},       // lknee
      {0, -0.42, 0},       // lankle
      {0, -0.07, 0.14},    // ltoe
      {-0.10, -0.05, 0},   // rhip
      {0, -0.42, 0},       // rknee
      {0, -0.42, 0},       // rankle
      {0, -0.07, 0.14},    // rtoe
  };
  s.validate();
  return s;
}

std::vector<int> reference_feet() { return {17, 21}; }

GaitClip gen_gait(const GaitSpec& spec, int length_frames) {
  if (spec.speed < 0) throw std::invalid_argument("gen_gait: speed must be >= 0");
  if (spec.stride_period < 8) throw std::invalid_argument("gen_gait: stride period must be >= 8");
  if (length_frames < 2) throw std::invalid_argument("gen_gait: need at least 2 frames");

  const Skeleton skel = reference_skeleton();
  const double fps = 30.0;
  Style style = actor_style(spec);

  double duty = 0.62, lift = 0.05;
  switch (spec.kind) {
    case GaitKind::Walk: break;
    case GaitKind::Run: duty = 0.38; lift = 0.10; break;
    case GaitKind::Turn: break;
    case GaitKind::Leap: duty = 0.30; lift = 0.18; break;
  }
  style.lift = lift;

  const double period = spec.stride_period * style.stride_scale;
  const double stride_len = spec.speed * period / fps;

  // Heading and ground track of the root, per frame (plus slack for plants
  // scheduled beyond the clip end).
  const int pad = static_cast<int>(period * 2) + 4;
  const int total = length_frames + pad;
  std::vector<double> psi(total);
  std::vector<Vec3> track(total);  // y = 0
  for (int t = 0; t < total; ++t) {
    const double ts = t / fps;
    psi[t] = spec.heading + spec.turn_rate * ts +
             spec.wiggle_amp * std::sin(2.0 * kPi * ts / spec.wiggle_period);
    if (t + 1 < total) {
      const Vec3 dir{std::cos(psi[t]), 0.0, std::sin(psi[t])};
      track[t + 1] = track[t] + dir * (spec.speed / fps);
    }
  }
  auto track_at = [&](double tf) {
    const int t0 = std::clamp(static_cast<int>(tf), 0, total - 2);
    const double a = tf - t0;
    return track[t0] + (track[t0 + 1] - track[t0]) * a;
  };

  // Crouch so the leg IK always reaches: bound the horizontal hip-to-ankle
  // stretch and solve the standing height from the leg length.
  const double leg = 0.42 + 0.42;
  const double max_horiz = 0.5 * duty * stride_len + 0.06;
  const double reach = 0.985 * leg;
  if (reach * reach <= max_horiz * max_horiz)
    throw std::invalid_argument("gen_gait: stride too long for the leg length");
  const double hip_joint_y = std::min(0.83, std::sqrt(reach * reach - max_horiz * max_horiz) + 0.07);
  const double hip_h = hip_joint_y + 0.05;

  const double ankle_rest_y = 0.07;  // toe exactly on the ground when flat
  const Vec3 toe_off{0, -0.07, 0.14};

  // Plant schedule per foot: world toe position frozen over each stance.
  struct Plant {
    Vec3 toe;
    double yaw_angle;
  };
  auto plant_for = [&](int stride, double phase_offset, double lateral) {
    // mid-stance moment of this stride
    const double mid = (stride - phase_offset + 0.5 * duty) * period;
    const double tf = std::clamp(mid, 0.0, static_cast<double>(total - 1));
    const double a = psi[std::clamp(static_cast<int>(tf), 0, total - 1)];
    const Vec3 side{-std::sin(a), 0.0, std::cos(a)};
    Plant p;
    p.toe = track_at(tf) + side * lateral;
    p.toe.y = 0.0;
    p.yaw_angle = a;
    return p;
  };

  GaitClip clip;
  clip.motion.skeleton = skel;
  clip.motion.fps = fps;
  clip.motion.actor_id = spec.actor_id;
  clip.feet = reference_feet();
  clip.contacts.feet = clip.feet;
  clip.contacts.contact.assign(length_frames, std::vector<bool>(2, false));

  const int K = skel.joint_count();
  for (int t = 0; t < length_frames; ++t) {
    const double ts = t / fps;
    const double stride_phase = spec.speed > 0 ? t / period : 0.0;

    // Root: ground track + crouch + bob (zero when standing still).
    const double bob = spec.speed > 0 ? style.bob_amp * (1.0 - std::cos(4.0 * kPi * stride_phase)) * 0.5
                                      : 0.0;
    const double sway = spec.speed > 0 ? style.sway_amp * std::sin(2.0 * kPi * stride_phase) : 0.0;
    const Vec3 side{-std::sin(psi[t]), 0.0, std::cos(psi[t])};
    Vec3 root = track[t] + side * sway;
    root.y = hip_h - bob;
    const Quat q_root = yaw(psi[t]);

    std::vector<Quat> local(K);
    local[0] = q_root;

    // Gentle upper-body motion.
    const double lean = 0.04 + 0.03 * std::min(spec.speed, 2.0) / 2.0;
    const Quat spine_osc = Quat::axis_angle({0, 1, 0}, 0.06 * std::sin(2.0 * kPi * stride_phase)) *
                           Quat::axis_angle({1, 0, 0}, lean);
    local[1] = spine_osc;
    local[2] = Quat::axis_angle({1, 0, 0}, -0.02);
    local[3] = Quat::axis_angle({1, 0, 0}, -0.02);
    local[4] = Quat::axis_angle({1, 0, 0}, -lean * 0.5);
    local[5] = {};

    // Arms hang from the clavicles and swing against the same-side leg.
    const double arm = spec.speed > 0 ? style.arm_swing * 0.35 * std::sin(2.0 * kPi * stride_phase) : 0.0;
    local[6] = {};
    local[7] = Quat::axis_angle({0, 0, 1}, -1.35) * Quat::axis_angle({0, 1, 0}, arm);
    local[8] = Quat::axis_angle({0, 0, 1}, -0.25);
    local[9] = {};
    local[10] = {};
    local[11] = Quat::axis_angle({0, 0, 1}, 1.35) * Quat::axis_angle({0, 1, 0}, arm);
    local[12] = Quat::axis_angle({0, 0, 1}, 0.25);
    local[13] = {};

    // Legs.
    for (int side_i = 0; side_i < 2; ++side_i) {
      const bool left = side_i == 0;
      const double phase_offset = left ? 0.0 : 0.5;
      const double lateral = (left ? 1.0 : -1.0) * style.stance_width;
      const int hip_j = left ? 14 : 18;

      Vec3 toe_target;
      double foot_yaw;
      if (spec.speed <= 0) {
        const Vec3 s2{-std::sin(spec.heading), 0.0, std::cos(spec.heading)};
        toe_target = track[0] + s2 * lateral +
                     Vec3{std::cos(spec.heading), 0, std::sin(spec.heading)} * 0.12;
        toe_target.y = 0.0;
        foot_yaw = spec.heading;
        clip.contacts.contact[t][side_i] = true;
      } else {
        const Phase ph = foot_phase(t, period, duty, phase_offset);
        const Plant cur = plant_for(ph.stride, phase_offset, lateral);
        if (ph.stance) {
          toe_target = cur.toe;
          foot_yaw = cur.yaw_angle;
          clip.contacts.contact[t][side_i] = true;
        } else {
          const Plant next = plant_for(ph.stride + 1, phase_offset, lateral);
          toe_target = cur.toe + (next.toe - cur.toe) * ph.u;
          toe_target.y = style.lift * std::sin(kPi * ph.u);
          double d = next.yaw_angle - cur.yaw_angle;
          foot_yaw = cur.yaw_angle + d * ph.u;
        }
      }

      const Quat q_ankle = yaw(foot_yaw);
      const Vec3 ankle_target = toe_target - q_ankle.rotate(toe_off);
      const Vec3 hip_pos = root + q_root.rotate(skel.rest_offsets[hip_j]);

      // Two-bone IK with the knee bending toward the heading.
      const double L1 = 0.42, L2 = 0.42;
      Vec3 d = ankle_target - hip_pos;
      double dist = d.norm();
      dist = std::clamp(dist, 0.05, 0.995 * (L1 + L2));
      const Vec3 u = normalized(d);
      const Vec3 fwd{std::cos(psi[t]), 0.0, std::sin(psi[t])};
      Vec3 w = fwd - u * dot(fwd, u);
      if (w.norm() < 1e-9) w = Vec3{1, 0, 0} - u * dot(Vec3{1, 0, 0}, u);
      w = normalized(w);
      const double cos_a = std::clamp((L1 * L1 + dist * dist - L2 * L2) / (2 * L1 * dist), -1.0, 1.0);
      const double sin_a = std::sqrt(std::max(0.0, 1.0 - cos_a * cos_a));
      const Vec3 knee_pos = hip_pos + u * (L1 * cos_a) + w * (L1 * sin_a);
      const Vec3 ankle_pos = hip_pos + u * dist;

      const Quat g_hip = aim_bone(knee_pos - hip_pos, fwd);
      const Quat g_knee = aim_bone(ankle_pos - knee_pos, fwd);
      local[hip_j] = q_root.conjugate() * g_hip;
      local[hip_j + 1] = g_hip.conjugate() * g_knee;
      local[hip_j + 2] = g_knee.conjugate() * q_ankle;
      local[hip_j + 3] = {};
    }

    clip.motion.local_rotations.push_back(local);
    clip.motion.frames.push_back(forward_kinematics(skel, root, local));
  }
  clip.motion.validate();
  return clip;
}

Heightmap gen_terrain(const TerrainSpec& spec) {
  if (spec.rows < 2 || spec.cols < 2) throw std::invalid_argument("gen_terrain: size must be > 1");
  Heightmap hm;
  hm.rows = spec.rows;
  hm.cols = spec.cols;
  hm.cell = spec.cell;
  hm.origin_x = spec.origin_x;
  hm.origin_z = spec.origin_z;
  hm.elev.assign(static_cast<size_t>(spec.rows) * spec.cols, 0.0);

  if (spec.roughness > 0) {
    // two octaves of value noise over coarse lattices
    auto lattice = [&](int cells_per_knot, uint64_t salt) {
      const int lr = spec.rows / cells_per_knot + 2;
      const int lc = spec.cols / cells_per_knot + 2;
      std::seed_seq sseq{spec.seed, salt};
      std::mt19937_64 rng(sseq);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      std::vector<double> knots(static_cast<size_t>(lr) * lc);
      for (double& v : knots) v = u(rng);
      return std::tuple{knots, lr, lc};
    };
    auto smooth = [](double a) { return a * a * (3 - 2 * a); };
    for (auto [knot_spacing, amp, salt] :
         {std::tuple{48, 1.0, uint64_t{1}}, std::tuple{16, 0.35, uint64_t{2}}}) {
      auto [knots, lr, lc] = lattice(knot_spacing, salt);
      for (int i = 0; i < spec.rows; ++i)
        for (int j = 0; j < spec.cols; ++j) {
          const double fi = static_cast<double>(i) / knot_spacing;
          const double fj = static_cast<double>(j) / knot_spacing;
          const int i0 = static_cast<int>(fi), j0 = static_cast<int>(fj);
          const double ai = smooth(fi - i0), aj = smooth(fj - j0);
          const double v00 = knots[i0 * lc + j0], v01 = knots[i0 * lc + j0 + 1];
          const double v10 = knots[(i0 + 1) * lc + j0], v11 = knots[(i0 + 1) * lc + j0 + 1];
          hm.at(i, j) += spec.roughness * amp *
                         ((1 - ai) * ((1 - aj) * v00 + aj * v01) + ai * ((1 - aj) * v10 + aj * v11));
        }
    }
  }
  if (spec.obstacle_height > 0) {
    for (int i = spec.rows / 3; i < 2 * spec.rows / 3; ++i)
      for (int j = spec.cols / 3; j < 2 * spec.cols / 3; ++j)
        hm.at(i, j) += spec.obstacle_height;
  }
  return hm;
}

}  // namespace rtn
