#pragma once

#include <memory>
#include <vector>

#include "rtn/heightmap.hpp"
#include "rtn/motion.hpp"
#include "rtn/preprocess.hpp"

namespace rtn {

// One training/validation sample: 10 past-context frames, P ground-truth
// transition frames, the target pair (y_T, y_{T+1}) and an optional
// post-transition tail. Self-contained copy of the source frames.
struct TransitionWindow {
  MotionSequence frames;  // length >= past + transition + 2
  int past = 10;
  int transition = 30;
  std::vector<std::shared_ptr<const Heightmap>> terrains;  // fitted top-5, optional

  int target_index() const { return past + transition; }  // T
  int length() const { return frames.frame_count(); }
  Vec3 anchor() const { return frames.root(0); }

  void validate() const;
};

struct WindowSpec {
  int transition = 30;  // P
  int width = 50;
  int offset = 20;
  int past = 10;
};

// Appendix window table: P=30 -> (50, 20), P=60 -> (80, 20). Other lengths
// get width 10 + P + 10 with the same stride.
WindowSpec window_spec_for(int transition_frames);

struct WindowSplit {
  std::vector<TransitionWindow> train;
  std::vector<TransitionWindow> validation;
};

// Overlapping windows at the given stride; every window of `holdout_actor`
// goes to validation, the rest to training.
WindowSplit window_dataset(const std::vector<MotionSequence>& sequences, const WindowSpec& spec,
                           const std::string& holdout_actor);

// Rotation augmentation: all global positions rotate about the vertical axis
// through `center` (the terrain center when terrain is attached). Heightmaps
// are not materialized here; training samples them through a rotated
// TerrainView so patches stay consistent.
TransitionWindow rotate_window(const TransitionWindow& w, double angle, const Vec3& center);

// Streams gathered over training windows:
//   x     root-velocity + root-relative features, every frame
//   tvel  per-joint global velocities, every consecutive frame pair
//   o     global offsets y_T - y_t for t in [0, T)
//   p     terrain patches at ground-truth roots over the top-1 heightmap
//         (only when windows carry terrain)
NormStats compute_stats(const std::vector<TransitionWindow>& train_windows);

}  // namespace rtn
