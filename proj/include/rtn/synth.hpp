#pragma once

#include <cstdint>
#include <string>

#include "rtn/heightmap.hpp"
#include "rtn/motion.hpp"
#include "rtn/terrain_fit.hpp"

namespace rtn {

enum class GaitKind { Walk, Run, Turn, Leap };

// Procedural locomotion spec. Heading follows
//   psi(t) = heading + turn_rate * t + wiggle_amp * sin(2*pi*t / wiggle_period).
struct GaitSpec {
  GaitKind kind = GaitKind::Walk;
  double speed = 1.0;        // m/s, >= 0
  int stride_period = 30;    // frames per full stride, >= 8
  double heading = 0.0;      // radians
  double turn_rate = 0.0;    // rad/s
  double wiggle_amp = 0.0;   // radians
  double wiggle_period = 4.0;  // seconds
  std::string actor_id = "actor00";
  uint64_t seed = 0;
};

struct GaitClip {
  MotionSequence motion;      // 22 joints, FK-consistent local rotations included
  ContactTrack contacts;      // scripted ground truth, toe joints
  std::vector<int> feet;      // toe joint indices
};

// The fixed 22-joint skeleton every synthetic clip uses.
Skeleton reference_skeleton();
std::vector<int> reference_feet();  // toe joints {17, 21}

// Kinematic gait: the root follows the heading curve, feet stay planted
// (zero velocity, toes on the ground plane) during scripted stance phases,
// legs are solved with a two-bone IK, and the emitted local rotations
// reproduce the global positions exactly through forward kinematics.
// Actor id + seed jitter the style (stride, bob, arm swing, stance width).
GaitClip gen_gait(const GaitSpec& spec, int length_frames);

// Smooth value-noise terrain; roughness 0 gives a flat map. Obstacle mode
// raises a plateau of the given height in the middle third of the map.
struct TerrainSpec {
  uint64_t seed = 0;
  int rows = 129, cols = 129;
  double cell = 1.3 / 32.0;
  double origin_x = 0, origin_z = 0;
  double roughness = 0.1;   // amplitude in meters
  double obstacle_height = 0.0;  // > 0 enables the plateau
};

Heightmap gen_terrain(const TerrainSpec& spec);

}  // namespace rtn
