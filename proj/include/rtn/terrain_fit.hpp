#pragma once

#include <vector>

#include "rtn/heightmap.hpp"
#include "rtn/motion.hpp"

namespace rtn {

// Per-frame, per-foot boolean contact flags.
struct ContactTrack {
  std::vector<int> feet;                   // joint indices
  std::vector<std::vector<bool>> contact;  // [frame][foot]

  int frame_count() const { return static_cast<int>(contact.size()); }
  int foot_count() const { return static_cast<int>(feet.size()); }
};

struct ContactParams {
  double speed_threshold = 0.15;  // m/s
  double height_band = 0.05;      // m above the local height minimum
  int min_window = 31;            // frames for the rolling height minimum
};

// Contact at frame t iff foot speed < threshold and foot height lies within
// `height_band` of its rolling local minimum.
ContactTrack detect_contacts(const MotionSequence& seq, const std::vector<int>& feet,
                             const ContactParams& params = {});

// Simplified fitting cost: squared foot-to-terrain gap on contact frames plus
// lambda-weighted squared traversal depth on every frame. Lower is better.
struct TerrainScoreParams {
  double traversal_weight = 10.0;  // lambda
};

double terrain_score(const MotionSequence& seq, const ContactTrack& contacts, const Heightmap& hm,
                     const TerrainScoreParams& params = {});

// Logistic-kernel RBF interpolation of foot y-offsets at contact points,
// evaluated over the grid and added as a correction so contact feet end up on
// the surface. Near-duplicate contact points are merged; the solve is
// ridge-regularized.
struct RbfParams {
  double length_scale = 0.3;  // meters
  double merge_radius = 0.01;
  double ridge = 1e-10;
};

Heightmap rbf_refine(const Heightmap& hm, const ContactTrack& contacts, const MotionSequence& seq,
                     const RbfParams& params = {});

// 33x33 Gaussian filter spanning 1.3 m, sigma 5 cells, rescaled to max 1.
// Per contact, adds dy * F over the subgrid; each modification is kept only
// if the terrain score does not get worse. Subgrids clip at the border.
Heightmap gaussian_smooth_contacts(const Heightmap& hm, const ContactTrack& contacts,
                                   const MotionSequence& seq,
                                   const TerrainScoreParams& score_params = {});

// Fit pipeline: score every candidate, keep the best `keep` (default 5),
// refine each with the RBF correction and the guarded Gaussian smoothing.
std::vector<Heightmap> fit_heightmaps(const MotionSequence& seq, const ContactTrack& contacts,
                                      const std::vector<Heightmap>& candidates, int keep = 5);

double logistic_kernel(double r, double length_scale);

}  // namespace rtn
