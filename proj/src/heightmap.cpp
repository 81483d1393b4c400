#include "rtn/heightmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rtn/text_io.hpp"

namespace rtn {

void Heightmap::validate() const {
  if (rows < 2 || cols < 2) throw std::invalid_argument("heightmap: needs at least 2x2 cells");
  if (!(cell > 0)) throw std::invalid_argument("heightmap: cell size must be positive");
  if (elev.size() != static_cast<size_t>(rows) * cols)
    throw std::invalid_argument("heightmap: elevation count mismatch");
  for (double v : elev)
    if (!std::isfinite(v)) throw std::invalid_argument("heightmap: non-finite elevation");
}

double Heightmap::sample(double x, double z, bool strict) const {
  double fx = (x - origin_x) / cell;
  double fz = (z - origin_z) / cell;
  if (strict && (fx < 0 || fz < 0 || fx > cols - 1 || fz > rows - 1))
    throw std::out_of_range("heightmap: sample outside grid");
  fx = std::clamp(fx, 0.0, static_cast<double>(cols - 1));
  fz = std::clamp(fz, 0.0, static_cast<double>(rows - 1));
  const int j0 = std::min(static_cast<int>(fx), cols - 2);
  const int i0 = std::min(static_cast<int>(fz), rows - 2);
  const double ax = fx - j0, az = fz - i0;
  const double h00 = at(i0, j0), h01 = at(i0, j0 + 1);
  const double h10 = at(i0 + 1, j0), h11 = at(i0 + 1, j0 + 1);
  return (1 - az) * ((1 - ax) * h00 + ax * h01) + az * ((1 - ax) * h10 + ax * h11);
}

void save_heightmap(const Heightmap& hm, const std::string& path) {
  hm.validate();
  auto os = open_out(path);
  os << "RTN-HEIGHTMAP 1\n";
  os << "rows " << hm.rows << " cols " << hm.cols << "\n";
  os << "cell " << fmt17(hm.cell) << "\n";
  os << "origin " << fmt17(hm.origin_x) << ' ' << fmt17(hm.origin_z) << "\n";
  for (int i = 0; i < hm.rows; ++i) write_row(os, &hm.elev[static_cast<size_t>(i) * hm.cols], hm.cols);
}

Heightmap load_heightmap(const std::string& path) {
  auto is = open_in(path);
  TextReader r(is, path);
  r.expect("RTN-HEIGHTMAP 1");
  Heightmap hm;
  auto t = r.tokens();
  if (t.size() != 4 || t[0] != "rows" || t[2] != "cols") r.fail("expected rows/cols line");
  hm.rows = std::stoi(t[1]);
  hm.cols = std::stoi(t[3]);
  t = r.tokens();
  if (t.size() != 2 || t[0] != "cell") r.fail("expected cell line");
  hm.cell = std::stod(t[1]);
  t = r.tokens();
  if (t.size() != 3 || t[0] != "origin") r.fail("expected origin line");
  hm.origin_x = std::stod(t[1]);
  hm.origin_z = std::stod(t[2]);
  hm.elev.reserve(static_cast<size_t>(hm.rows) * hm.cols);
  for (int i = 0; i < hm.rows; ++i) {
    auto row = r.reals(hm.cols);
    hm.elev.insert(hm.elev.end(), row.begin(), row.end());
  }
  hm.validate();
  return hm;
}

Heightmap rotate_heightmap(const Heightmap& hm, double angle) {
  Heightmap out = hm;
  const Vec3 c = hm.center();
  for (int i = 0; i < hm.rows; ++i)
    for (int j = 0; j < hm.cols; ++j) {
      const double x = hm.origin_x + j * hm.cell;
      const double z = hm.origin_z + i * hm.cell;
      const Vec3 p = rotate_y({x, 0.0, z}, -angle, c);
      out.at(i, j) = hm.sample(p.x, p.z);
    }
  return out;
}

std::vector<double> extract_patch_raw(const TerrainView& view, const Vec3& root) {
  const double spacing = kPatchSpan / (kPatchSide - 1);
  const double half = 0.5 * kPatchSpan;
  std::vector<double> p;
  p.reserve(kPatchDim);
  for (int i = 0; i < kPatchSide; ++i)
    for (int j = 0; j < kPatchSide; ++j) {
      const double x = root.x - half + j * spacing;
      const double z = root.z - half + i * spacing;
      p.push_back(view.sample(x, z) - root.y);
    }
  return p;
}

std::vector<double> extract_patch(const TerrainView& view, const Vec3& root, const NormStats& stats) {
  if (stats.patch.empty())
    throw std::invalid_argument("extract_patch: stats have no patch stream");
  return normalize(extract_patch_raw(view, root), stats.patch);
}

std::vector<double> extract_patch(const Heightmap& hm, const Vec3& root, const NormStats& stats) {
  TerrainView v{&hm, 0.0, {}};
  return extract_patch(v, root, stats);
}

}  // namespace rtn
