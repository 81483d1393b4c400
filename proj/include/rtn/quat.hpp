#pragma once

#include <cmath>
#include <stdexcept>

#include "rtn/tensor.hpp"

namespace rtn {

// Unit quaternion (w, x, y, z).
struct Quat {
  double w = 1, x = 0, y = 0, z = 0;

  static Quat axis_angle(const Vec3& axis, double angle) {
    const double n = axis.norm();
    if (n == 0.0) return {};
    const double h = 0.5 * angle, s = std::sin(h) / n;
    return {std::cos(h), axis.x * s, axis.y * s, axis.z * s};
  }

  Quat operator*(const Quat& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z, w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x, w * o.z + x * o.y - y * o.x + z * o.w};
  }

  Vec3 rotate(const Vec3& v) const {
    // q v q^-1 for unit q
    const Quat qv{0, v.x, v.y, v.z};
    const Quat r = (*this) * qv * conjugate();
    return {r.x, r.y, r.z};
  }

  Quat conjugate() const { return {w, -x, -y, -z}; }

  double dot(const Quat& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }

  Quat normalized() const {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (n == 0.0) throw std::invalid_argument("cannot normalize zero quaternion");
    return {w / n, x / n, y / n, z / n};
  }
};

// Shortest-path spherical interpolation; falls back to normalized lerp when
// the endpoints are nearly parallel.
inline Quat slerp(const Quat& a, Quat b, double u) {
  double d = a.dot(b);
  if (d < 0.0) {
    b = {-b.w, -b.x, -b.y, -b.z};
    d = -d;
  }
  if (d > 0.9995) {
    Quat r{a.w + u * (b.w - a.w), a.x + u * (b.x - a.x), a.y + u * (b.y - a.y),
           a.z + u * (b.z - a.z)};
    return r.normalized();
  }
  const double theta = std::acos(d);
  const double sa = std::sin((1.0 - u) * theta) / std::sin(theta);
  const double sb = std::sin(u * theta) / std::sin(theta);
  return {sa * a.w + sb * b.w, sa * a.x + sb * b.x, sa * a.y + sb * b.y, sa * a.z + sb * b.z};
}

}  // namespace rtn
