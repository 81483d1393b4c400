#pragma once

#include "rtn/window.hpp"

namespace rtn {

enum class IntMode { Slerp, Lerp };

// Interpolated frame at parameter u in [0, 1] between the last past-context
// frame (u = 0) and the target frame (u = 1). Slerp interpolates the local
// quaternion track and runs forward kinematics; Lerp interpolates global
// positions directly.
std::vector<Vec3> interpolate_frame(const TransitionWindow& w, double u, IntMode mode);

// The INT baseline: P+1 frames at u = (i+1)/(P+1), i = 0..P. The final frame
// reproduces the target exactly; no training involved.
std::vector<std::vector<Vec3>> interpolation_baseline(const TransitionWindow& w,
                                                      IntMode mode = IntMode::Slerp);

}  // namespace rtn
