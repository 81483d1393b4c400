#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtn {

// Dense 2D double matrix, row-major. Vectors are stored as n x 1 columns.
struct Tensor2 {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor2() = default;
  Tensor2(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {
    if (r < 0 || c < 0) throw std::invalid_argument("Tensor2: negative shape");
  }

  static Tensor2 column(std::span<const double> v) {
    Tensor2 t(static_cast<int>(v.size()), 1);
    std::copy(v.begin(), v.end(), t.data.begin());
    return t;
  }

  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  size_t size() const { return data.size(); }
  bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  Tensor2& operator+=(const Tensor2& o) {
    if (!same_shape(o)) throw std::invalid_argument("Tensor2 +=: shape mismatch");
    for (size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
    return *this;
  }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

// c = a * b, Eigen-backed GEMM (single threaded, deterministic).
Tensor2 matmul(const Tensor2& a, const Tensor2& b);

// Accumulating variant used by the backward pass: out += a * b, with optional
// transposes applied to a / b before the product.
void matmul_acc(Tensor2& out, const Tensor2& a, bool ta, const Tensor2& b, bool tb);

inline Tensor2 transpose(const Tensor2& a) {
  Tensor2 t(a.cols, a.rows);
  for (int r = 0; r < a.rows; ++r)
    for (int c = 0; c < a.cols; ++c) t.at(c, r) = a.at(r, c);
  return t;
}

// Uniform fan-in scaled init: entries ~ U(-s, s) with s = sqrt(1 / fan_in).
// fan_in is the column count for weight matrices.
Tensor2 uniform_fan_in(int rows, int cols, std::mt19937_64& rng);

// Small fixed-size helpers for global-space geometry.
struct Vec3 {
  double x = 0, y = 0, z = 0;
  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

// Rotation by angle about the +y (up) axis through `center`.
inline Vec3 rotate_y(const Vec3& p, double angle, const Vec3& center = {}) {
  const double c = std::cos(angle), s = std::sin(angle);
  const double dx = p.x - center.x, dz = p.z - center.z;
  return {center.x + c * dx + s * dz, p.y, center.z - s * dx + c * dz};
}

}  // namespace rtn
