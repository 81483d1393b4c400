#include "rtn/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace rtn {

std::vector<double> offset_profile(const std::vector<std::vector<Vec3>>& predicted,
                                   const std::vector<std::vector<Vec3>>& truth) {
  if (predicted.size() != truth.size() || predicted.empty())
    throw std::invalid_argument("offset_profile: sequences must have equal, nonzero length");
  std::vector<double> curve;
  curve.reserve(predicted.size());
  for (size_t t = 0; t < predicted.size(); ++t) {
    if (predicted[t].size() != truth[t].size())
      throw std::invalid_argument("offset_profile: joint counts differ");
    double acc = 0.0;
    for (size_t j = 0; j < predicted[t].size(); ++j) {
      const Vec3 d = predicted[t][j] - truth[t][j];
      acc += std::abs(d.x) + std::abs(d.y) + std::abs(d.z);
    }
    curve.push_back(100.0 * acc / (3.0 * predicted[t].size()));
  }
  return curve;
}

double aco(const std::vector<std::vector<Vec3>>& predicted,
           const std::vector<std::vector<Vec3>>& truth) {
  const auto curve = offset_profile(predicted, truth);
  double s = 0.0;
  for (double v : curve) s += v;
  return s / curve.size();
}

}  // namespace rtn
