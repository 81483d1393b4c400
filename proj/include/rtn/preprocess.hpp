#pragma once

#include <string>
#include <vector>

#include "rtn/motion.hpp"
#include "rtn/tensor.hpp"

namespace rtn {

constexpr int kPatchDim = 169;  // 13 x 13 local terrain grid, flattened

// Per-stream standardization statistics, computed on training data only.
// Streams: frame features x (3K), per-joint global velocities (3K), global
// offsets o (3K) and terrain patches p (169, optional).
struct StreamStats {
  std::vector<double> mu, sigma;
  int dim() const { return static_cast<int>(mu.size()); }
  bool empty() const { return mu.empty(); }
};

struct NormStats {
  StreamStats x, tvel, offset, patch;

  void validate(int K) const;
};

// Sigma entries below this floor are clamped; keeps constant dimensions from
// blowing up the division.
constexpr double kSigmaFloor = 1e-6;

StreamStats accumulate_stats(const std::vector<std::vector<double>>& samples);

void save_stats(const NormStats& s, const std::string& path);
NormStats load_stats(const std::string& path);

std::vector<double> normalize(const std::vector<double>& raw, const StreamStats& s);
std::vector<double> denormalize(const std::vector<double>& norm, const StreamStats& s);

// v_t = r_t - r_{t-1}; v_0 copies v_1.
std::vector<Vec3> compute_root_velocities(const MotionSequence& seq);

// Root-velocity + root-relative representation of one global frame, given the
// root velocity for that frame: [v, j^1, ..., j^{K-1}], dimension 3K.
std::vector<double> frame_features_raw(const std::vector<Vec3>& global_frame, const Vec3& v);

// Three steps: root velocities, root-relative joints with the root slot
// replaced by the velocity, standardization. One (3K) vector per frame.
std::vector<std::vector<double>> preprocess(const MotionSequence& seq, const NormStats& stats);

// Inverse of preprocess. `anchor` is the global root position of frame 0.
// Velocities are accumulated from the anchor, then the root is added back to
// the relative joints.
MotionSequence inverse_preprocess(const std::vector<std::vector<double>>& frames,
                                  const NormStats& stats, const Vec3& anchor,
                                  const Skeleton& skel, double fps);

// Single-frame inverse used inside rollouts: given the previous global root,
// reconstruct this frame's global positions. Returns the new root via out-param.
std::vector<Vec3> reconstruct_frame(const std::vector<double>& x_norm, const NormStats& stats,
                                    const Vec3& prev_root, Vec3* new_root);

// Target vector t (2*3K): processed target pose followed by the normalized
// per-joint global velocities at the target frame (y_{T+1} - y_T).
std::vector<double> build_target_vector(const std::vector<Vec3>& y_T,
                                        const std::vector<Vec3>& y_T1, const NormStats& stats);

// Normalized per-joint, per-axis signed offsets y_T - y_hat (3K entries).
std::vector<double> compute_global_offset(const std::vector<Vec3>& y_hat,
                                          const std::vector<Vec3>& y_T, const NormStats& stats);

}  // namespace rtn
