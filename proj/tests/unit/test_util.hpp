#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "rtn/model.hpp"
#include "rtn/synth.hpp"
#include "rtn/window.hpp"

namespace rtn::test {

inline Tensor2 random_tensor(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Tensor2 t(rows, cols);
  for (double& v : t.data) v = u(rng);
  return t;
}

// Scalar-loop MLP layer oracle: out = act(W x + b), one column at a time.
inline Tensor2 oracle_dense(const Tensor2& W, const Tensor2& b, const Tensor2& x,
                            double lrelu_slope = -1.0) {
  Tensor2 out(W.rows, x.cols);
  for (int c = 0; c < x.cols; ++c)
    for (int r = 0; r < W.rows; ++r) {
      double acc = b.at(r, 0);
      for (int k = 0; k < W.cols; ++k) acc += W.at(r, k) * x.at(k, c);
      if (lrelu_slope > 0 && acc < 0) acc *= lrelu_slope;
      out.at(r, c) = acc;
    }
  return out;
}

inline double max_abs_diff(const Tensor2& a, const Tensor2& b) {
  double m = 0;
  for (size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

// Tiny terrain-aware model used by gradient checks (K = 3, layer sizes 4..8).
inline ModelConfig tiny_config(bool terrain_aware = true, int P = 4) {
  ModelConfig cfg;
  cfg.joints = 3;
  cfg.transition = P;
  cfg.terrain_aware = terrain_aware;
  cfg.sizes.enc1 = 8;
  cfg.sizes.enc2 = 8;
  cfg.sizes.tgt = 6;
  cfg.sizes.off = 6;
  cfg.sizes.lstm = 8;
  cfg.sizes.dec1 = 7;
  cfg.sizes.dec2 = 5;
  cfg.sizes.hinit = 6;
  return cfg;
}

// Smooth random-walk window for a small skeleton; enough frames for P.
inline TransitionWindow tiny_window(int joints, int P, uint64_t seed, int past = 10) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  TransitionWindow w;
  w.past = past;
  w.transition = P;
  MotionSequence& seq = w.frames;
  seq.fps = 30.0;
  seq.actor_id = "tiny";
  for (int j = 0; j < joints; ++j) {
    seq.skeleton.joint_names.push_back("j" + std::to_string(j));
    seq.skeleton.parents.push_back(j - 1);
  }
  const int L = past + P + 2;
  std::vector<Vec3> pos(joints);
  for (int j = 0; j < joints; ++j) pos[j] = {0.3 * j, 0.8 + 0.1 * j, 0.1 * j};
  for (int t = 0; t < L; ++t) {
    for (int j = 0; j < joints; ++j) pos[j] = pos[j] + Vec3{u(rng) + 0.01, u(rng) * 0.4, u(rng)};
    seq.frames.push_back(pos);
  }
  return w;
}

inline NormStats stats_for(const TransitionWindow& w) { return compute_stats({w}); }

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("rtn_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace rtn::test
