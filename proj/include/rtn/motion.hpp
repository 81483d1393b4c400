#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rtn/quat.hpp"
#include "rtn/tensor.hpp"

namespace rtn {

// Joint hierarchy. Parents are topologically ordered: parent[j] < j for every
// non-root joint, root at index 0 with parent -1.
struct Skeleton {
  std::vector<std::string> joint_names;
  std::vector<int> parents;
  std::vector<Vec3> rest_offsets;  // local offset from parent; optional (empty when unknown)

  int joint_count() const { return static_cast<int>(parents.size()); }
  void validate() const;
};

// Global joint positions per frame plus optional local-rotation track.
// Positions are meters; frame f stores K Vec3 entries.
struct MotionSequence {
  Skeleton skeleton;
  double fps = 30.0;
  std::string actor_id;
  std::vector<std::vector<Vec3>> frames;          // [frame][joint]
  std::vector<std::vector<Quat>> local_rotations;  // optional; same framing when present

  int frame_count() const { return static_cast<int>(frames.size()); }
  int joint_count() const { return skeleton.joint_count(); }
  bool has_rotations() const { return !local_rotations.empty(); }

  const Vec3& root(int frame) const { return frames[frame][0]; }

  // Flattened (3K) x 1 view of one frame: [p0, p1, ..., p_{K-1}].
  std::vector<double> flat_frame(int frame) const;

  void validate() const;
};

// Forward kinematics: local rotations + root position -> global positions.
std::vector<Vec3> forward_kinematics(const Skeleton& skel, const Vec3& root_pos,
                                     const std::vector<Quat>& local_rot);

// Self-describing text container (see README for the grammar). Decimal
// serialization uses 17 significant digits so round-trips are bit-exact.
void save_motion(const MotionSequence& seq, const std::string& path);
MotionSequence load_motion(const std::string& path);

// Rotates every global position (and the root orientation of the quaternion
// track, when present) about the vertical axis through `center`.
MotionSequence rotate_motion(const MotionSequence& seq, double angle, const Vec3& center);

}  // namespace rtn
