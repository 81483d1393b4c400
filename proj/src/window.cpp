#include "rtn/window.hpp"

#include <stdexcept>

namespace rtn {

void TransitionWindow::validate() const {
  frames.validate();
  if (past < 1 || transition < 1) throw std::invalid_argument("window: bad past/transition");
  if (length() < past + transition + 2)
    throw std::invalid_argument("window: needs at least past + P + 2 frames");
}

WindowSpec window_spec_for(int transition_frames) {
  WindowSpec s;
  s.transition = transition_frames;
  if (transition_frames == 30) {
    s.width = 50;
    s.offset = 20;
  } else if (transition_frames == 60) {
    s.width = 80;
    s.offset = 20;
  } else {
    s.width = 10 + transition_frames + 10;
    s.offset = 20;
  }
  return s;
}

WindowSplit window_dataset(const std::vector<MotionSequence>& sequences, const WindowSpec& spec,
                           const std::string& holdout_actor) {
  if (spec.width < spec.past + spec.transition + 2)
    throw std::invalid_argument("window_dataset: width too small for transition length");
  if (spec.offset < 1) throw std::invalid_argument("window_dataset: offset must be positive");
  WindowSplit split;
  for (const MotionSequence& seq : sequences) {
    for (int start = 0; start + spec.width <= seq.frame_count(); start += spec.offset) {
      TransitionWindow w;
      w.past = spec.past;
      w.transition = spec.transition;
      w.frames.skeleton = seq.skeleton;
      w.frames.fps = seq.fps;
      w.frames.actor_id = seq.actor_id;
      w.frames.frames.assign(seq.frames.begin() + start, seq.frames.begin() + start + spec.width);
      if (seq.has_rotations())
        w.frames.local_rotations.assign(seq.local_rotations.begin() + start,
                                        seq.local_rotations.begin() + start + spec.width);
      (seq.actor_id == holdout_actor ? split.validation : split.train).push_back(std::move(w));
    }
  }
  return split;
}

TransitionWindow rotate_window(const TransitionWindow& w, double angle, const Vec3& center) {
  TransitionWindow out = w;
  out.frames = rotate_motion(w.frames, angle, center);
  return out;
}

NormStats compute_stats(const std::vector<TransitionWindow>& train_windows) {
  if (train_windows.empty()) throw std::invalid_argument("compute_stats: empty training set");
  std::vector<std::vector<double>> xs, vels, offs, patches;
  for (const TransitionWindow& w : train_windows) {
    const auto& seq = w.frames;
    const int k = seq.joint_count();
    const auto rv = compute_root_velocities(seq);
    const int T = w.target_index();
    for (int t = 0; t < seq.frame_count(); ++t)
      xs.push_back(frame_features_raw(seq.frames[t], rv[t]));
    for (int t = 1; t < seq.frame_count(); ++t) {
      std::vector<double> v(static_cast<size_t>(3) * k);
      for (int j = 0; j < k; ++j) {
        const Vec3 d = seq.frames[t][j] - seq.frames[t - 1][j];
        v[3 * j + 0] = d.x;
        v[3 * j + 1] = d.y;
        v[3 * j + 2] = d.z;
      }
      vels.push_back(std::move(v));
    }
    for (int t = 0; t < T; ++t) {
      std::vector<double> o(static_cast<size_t>(3) * k);
      for (int j = 0; j < k; ++j) {
        const Vec3 d = seq.frames[T][j] - seq.frames[t][j];
        o[3 * j + 0] = d.x;
        o[3 * j + 1] = d.y;
        o[3 * j + 2] = d.z;
      }
      offs.push_back(std::move(o));
    }
    if (!w.terrains.empty()) {
      TerrainView view{w.terrains[0].get(), 0.0, {}};
      for (int t = 0; t < seq.frame_count(); ++t)
        patches.push_back(extract_patch_raw(view, seq.root(t)));
    }
  }
  NormStats stats;
  stats.x = accumulate_stats(xs);
  stats.tvel = accumulate_stats(vels);
  stats.offset = accumulate_stats(offs);
  if (!patches.empty()) stats.patch = accumulate_stats(patches);
  return stats;
}

}  // namespace rtn
