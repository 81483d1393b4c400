#include "rtn/baseline.hpp"

#include <stdexcept>

namespace rtn {

std::vector<Vec3> interpolate_frame(const TransitionWindow& w, double u, IntMode mode) {
  const int a = w.past - 1;        // last context frame
  const int b = w.target_index();  // target frame
  const auto& seq = w.frames;
  if (mode == IntMode::Lerp) {
    const int k = seq.joint_count();
    std::vector<Vec3> out(k);
    for (int j = 0; j < k; ++j)
      out[j] = seq.frames[a][j] + (seq.frames[b][j] - seq.frames[a][j]) * u;
    return out;
  }
  if (!seq.has_rotations())
    throw std::invalid_argument("interpolation baseline: slerp needs a quaternion track");
  if (seq.skeleton.rest_offsets.empty())
    throw std::invalid_argument("interpolation baseline: slerp needs skeleton rest offsets");
  const int k = seq.joint_count();
  std::vector<Quat> rot(k);
  for (int j = 0; j < k; ++j) rot[j] = slerp(seq.local_rotations[a][j], seq.local_rotations[b][j], u);
  const Vec3 root = seq.root(a) + (seq.root(b) - seq.root(a)) * u;
  return forward_kinematics(seq.skeleton, root, rot);
}

std::vector<std::vector<Vec3>> interpolation_baseline(const TransitionWindow& w, IntMode mode) {
  w.validate();
  std::vector<std::vector<Vec3>> out;
  const int P = w.transition;
  out.reserve(P + 1);
  for (int i = 0; i <= P; ++i)
    out.push_back(interpolate_frame(w, static_cast<double>(i + 1) / (P + 1), mode));
  return out;
}

}  // namespace rtn
