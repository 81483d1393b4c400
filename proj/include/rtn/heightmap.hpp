#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rtn/preprocess.hpp"
#include "rtn/tensor.hpp"

namespace rtn {

// World elevation grid. Row i runs along +z, column j along +x:
//   world(x, z) of cell (i, j) = (origin_x + j*cell, origin_z + i*cell).
struct Heightmap {
  int rows = 0, cols = 0;
  double cell = 1.3 / 32.0;  // meters; matches the 33x33 smoothing filter span
  double origin_x = 0, origin_z = 0;
  std::vector<double> elev;  // row-major, meters

  double& at(int i, int j) { return elev[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const { return elev[static_cast<size_t>(i) * cols + j]; }

  double width_x() const { return (cols - 1) * cell; }
  double width_z() const { return (rows - 1) * cell; }
  Vec3 center() const { return {origin_x + 0.5 * width_x(), 0.0, origin_z + 0.5 * width_z()}; }

  bool inside(double x, double z) const {
    return x >= origin_x && z >= origin_z && x <= origin_x + width_x() && z <= origin_z + width_z();
  }

  // Bilinear elevation sample; strict=true errors outside the grid,
  // strict=false clamps to the border.
  double sample(double x, double z, bool strict = false) const;

  void validate() const;
};

void save_heightmap(const Heightmap& hm, const std::string& path);
Heightmap load_heightmap(const std::string& path);

// Exact rotation views and resampled rotation (for augmentation): the surface
// is rotated by `angle` about the vertical axis through the grid center.
Heightmap rotate_heightmap(const Heightmap& hm, double angle);

// Sampling adapter used during training augmentation: samples the original
// grid at back-rotated coordinates instead of materializing a rotated copy.
struct TerrainView {
  const Heightmap* hm = nullptr;
  double angle = 0.0;  // rotation applied to the world
  Vec3 center;

  double sample(double x, double z) const {
    const Vec3 p = rotate_y({x, 0.0, z}, -angle, center);
    return hm->sample(p.x, p.z);
  }
};

// 13x13 grid spanning 2.06 x 2.06 m centered at the root (x, z); entries are
// terrain_y - root_y, then standardized with the patch stream stats.
// Sample points outside the map clamp to its border.
constexpr int kPatchSide = 13;
constexpr double kPatchSpan = 2.06;

std::vector<double> extract_patch_raw(const TerrainView& view, const Vec3& root);
std::vector<double> extract_patch(const Heightmap& hm, const Vec3& root, const NormStats& stats);
std::vector<double> extract_patch(const TerrainView& view, const Vec3& root, const NormStats& stats);

}  // namespace rtn
