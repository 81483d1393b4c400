#include "rtn/terrain_fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rtn {

ContactTrack detect_contacts(const MotionSequence& seq, const std::vector<int>& feet,
                             const ContactParams& params) {
  const int nf = seq.frame_count();
  for (int f : feet)
    if (f < 0 || f >= seq.joint_count())
      throw std::invalid_argument("detect_contacts: invalid foot joint index");
  ContactTrack track;
  track.feet = feet;
  track.contact.assign(nf, std::vector<bool>(feet.size(), false));
  const int half = params.min_window / 2;
  for (size_t fi = 0; fi < feet.size(); ++fi) {
    const int j = feet[fi];
    for (int t = 0; t < nf; ++t) {
      const int tp = std::max(t - 1, 0);
      const int tn = tp + 1;
      const double speed = (seq.frames[tn][j] - seq.frames[tp][j]).norm() * seq.fps;
      double local_min = seq.frames[t][j].y;
      for (int u = std::max(0, t - half); u <= std::min(nf - 1, t + half); ++u)
        local_min = std::min(local_min, seq.frames[u][j].y);
      const bool grounded = seq.frames[t][j].y <= local_min + params.height_band;
      track.contact[t][fi] = speed < params.speed_threshold && grounded;
    }
  }
  return track;
}

double terrain_score(const MotionSequence& seq, const ContactTrack& contacts, const Heightmap& hm,
                     const TerrainScoreParams& params) {
  double cost = 0.0;
  for (int t = 0; t < seq.frame_count(); ++t) {
    for (int fi = 0; fi < contacts.foot_count(); ++fi) {
      const Vec3& p = seq.frames[t][contacts.feet[fi]];
      if (!hm.inside(p.x, p.z)) throw std::out_of_range("terrain_score: foot outside heightmap");
      const double ty = hm.sample(p.x, p.z, true);
      if (contacts.contact[t][fi]) {
        const double gap = p.y - ty;
        cost += gap * gap;
      }
      const double below = ty - p.y;
      if (below > 0) cost += params.traversal_weight * below * below;
    }
  }
  return cost;
}

double logistic_kernel(double r, double length_scale) {
  const double u = r / length_scale;
  return 1.0 / (std::exp(u) + 2.0 + std::exp(-u));
}

namespace {

struct ContactPoint {
  double x, z, foot_y;
};

// Collect foot positions on contact frames and merge near-duplicates
// (a planted foot yields many identical samples).
std::vector<ContactPoint> contact_points(const ContactTrack& contacts, const MotionSequence& seq,
                                         double merge_radius) {
  struct Acc {
    double x = 0, z = 0, y = 0;
    int n = 0;
  };
  std::vector<Acc> acc;
  for (int t = 0; t < seq.frame_count(); ++t)
    for (int fi = 0; fi < contacts.foot_count(); ++fi) {
      if (!contacts.contact[t][fi]) continue;
      const Vec3& p = seq.frames[t][contacts.feet[fi]];
      bool merged = false;
      for (Acc& a : acc) {
        const double dx = a.x / a.n - p.x, dz = a.z / a.n - p.z;
        if (dx * dx + dz * dz <= merge_radius * merge_radius) {
          a.x += p.x;
          a.z += p.z;
          a.y += p.y;
          a.n += 1;
          merged = true;
          break;
        }
      }
      if (!merged) acc.push_back({p.x, p.z, p.y, 1});
    }
  std::vector<ContactPoint> out;
  out.reserve(acc.size());
  for (const Acc& a : acc) out.push_back({a.x / a.n, a.z / a.n, a.y / a.n});
  return out;
}

}  // namespace

Heightmap rbf_refine(const Heightmap& hm, const ContactTrack& contacts, const MotionSequence& seq,
                     const RbfParams& params) {
  const auto pts = contact_points(contacts, seq, params.merge_radius);
  if (pts.empty()) throw std::invalid_argument("rbf_refine: no contact points");
  const int n = static_cast<int>(pts.size());
  Eigen::MatrixXd K(n, n);
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) {
    d(i) = pts[i].foot_y - hm.sample(pts[i].x, pts[i].z);
    for (int j = 0; j < n; ++j) {
      const double dx = pts[i].x - pts[j].x, dz = pts[i].z - pts[j].z;
      K(i, j) = logistic_kernel(std::sqrt(dx * dx + dz * dz), params.length_scale);
    }
  }
  K.diagonal().array() += params.ridge;
  Eigen::VectorXd w = K.ldlt().solve(d);

  Heightmap out = hm;
  for (int i = 0; i < hm.rows; ++i)
    for (int j = 0; j < hm.cols; ++j) {
      const double x = hm.origin_x + j * hm.cell;
      const double z = hm.origin_z + i * hm.cell;
      double corr = 0.0;
      for (int p = 0; p < n; ++p) {
        const double dx = x - pts[p].x, dz = z - pts[p].z;
        corr += w(p) * logistic_kernel(std::sqrt(dx * dx + dz * dz), params.length_scale);
      }
      out.at(i, j) += corr;
    }
  return out;
}

Heightmap gaussian_smooth_contacts(const Heightmap& hm, const ContactTrack& contacts,
                                   const MotionSequence& seq,
                                   const TerrainScoreParams& score_params) {
  constexpr int kSide = 33;
  constexpr int kHalf = 16;
  constexpr double kSigmaCells = 5.0;
  // isotropic 2D Gaussian, rescaled so the center equals 1
  static const std::vector<double> filter = [] {
    std::vector<double> f(kSide * kSide);
    for (int i = 0; i < kSide; ++i)
      for (int j = 0; j < kSide; ++j) {
        const double di = i - kHalf, dj = j - kHalf;
        f[i * kSide + j] = std::exp(-(di * di + dj * dj) / (2.0 * kSigmaCells * kSigmaCells));
      }
    return f;
  }();

  const auto pts = contact_points(contacts, seq, /*merge_radius=*/0.01);
  Heightmap out = hm;
  double score = terrain_score(seq, contacts, out, score_params);
  for (const auto& p : pts) {
    const double dy = p.foot_y - out.sample(p.x, p.z);
    Heightmap trial = out;
    const int cj = static_cast<int>(std::lround((p.x - hm.origin_x) / hm.cell));
    const int ci = static_cast<int>(std::lround((p.z - hm.origin_z) / hm.cell));
    for (int i = 0; i < kSide; ++i) {
      const int gi = ci + i - kHalf;
      if (gi < 0 || gi >= hm.rows) continue;  // clip at the border
      for (int j = 0; j < kSide; ++j) {
        const int gj = cj + j - kHalf;
        if (gj < 0 || gj >= hm.cols) continue;
        trial.at(gi, gj) += dy * filter[i * kSide + j];
      }
    }
    const double trial_score = terrain_score(seq, contacts, trial, score_params);
    if (trial_score <= score) {
      out = std::move(trial);
      score = trial_score;
    }
  }
  return out;
}

std::vector<Heightmap> fit_heightmaps(const MotionSequence& seq, const ContactTrack& contacts,
                                      const std::vector<Heightmap>& candidates, int keep) {
  if (candidates.empty()) throw std::invalid_argument("fit_heightmaps: no candidates");
  std::vector<std::pair<double, int>> scored;
  for (int i = 0; i < static_cast<int>(candidates.size()); ++i)
    scored.emplace_back(terrain_score(seq, contacts, candidates[i]), i);
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Heightmap> out;
  const int n = std::min<int>(keep, static_cast<int>(scored.size()));
  bool any_contact = false;
  for (const auto& row : contacts.contact)
    for (bool c : row) any_contact |= c;
  for (int i = 0; i < n; ++i) {
    Heightmap h = candidates[scored[i].second];
    if (any_contact) {
      h = rbf_refine(h, contacts, seq);
      h = gaussian_smooth_contacts(h, contacts, seq);
    }
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace rtn
