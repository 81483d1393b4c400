#pragma once

#include <vector>

#include "rtn/tensor.hpp"

namespace rtn {

// Average centimeter offset: mean absolute global-space error per degree of
// freedom per frame, meters in, centimeters out.
double aco(const std::vector<std::vector<Vec3>>& predicted,
           const std::vector<std::vector<Vec3>>& truth);

// Per-frame-index ACO curve; its mean equals the scalar aco.
std::vector<double> offset_profile(const std::vector<std::vector<Vec3>>& predicted,
                                   const std::vector<std::vector<Vec3>>& truth);

}  // namespace rtn
