#pragma once

#include "rtn/baseline.hpp"
#include "rtn/model.hpp"

namespace rtn {

struct BlendConfig {
  int duration = 10;  // d, frames; 1 <= d <= P
};

// Target blend (the only postprocess): e = y_T - y_hat_T spread over the last
// d generated frames with weight w = 1 - (T - t)/d. Frames at or before
// T - d are untouched; the frame at T is set to the target exactly.
// `generated` holds the P+1 emissions for frames s..T, global space.
std::vector<std::vector<Vec3>> target_blend(const std::vector<std::vector<Vec3>>& generated,
                                            const std::vector<Vec3>& target, int duration);

// Keyframe stream for temporal super-resolution: the initial context plus one
// stored target state (pose + next-frame pose) per segment.
struct KeyframeStream {
  double fps = 30.0;
  int segment = 30;  // frames per stored target ("per second" at 30 fps)
  Skeleton skeleton;
  std::string actor_id;
  std::vector<std::vector<Vec3>> context;  // 10 frames
  struct Target {
    int frame_index;              // T_k in the original clip
    std::vector<Vec3> pose;       // y_T
    std::vector<Vec3> next_pose;  // y_{T+1}, velocity reference
  };
  std::vector<Target> targets;

  int stored_frames() const { return static_cast<int>(context.size() + 2 * targets.size()); }
};

// Compress: keep frames 0..9 and the target pair every `segment` frames; a
// final partial segment is added when the clip does not divide evenly.
KeyframeStream compress_clip(const MotionSequence& clip, int segment = 30, int past = 10);

void save_keyframes(const KeyframeStream& s, const std::string& path);
KeyframeStream load_keyframes(const std::string& path);

// Decompress by chaining transitions: segment k uses the last 10 generated
// frames as past context; the target blend runs per segment before the frames
// are reused, so every stored target is reproduced exactly. The blend
// duration clamps to the length of a final partial segment.
MotionSequence superres_decompress(const KeyframeStream& stream, ParamStore& params,
                                   const ModelConfig& cfg, const NormStats& stats,
                                   const BlendConfig& blend);

// Naive decompression of the same stream: positional interpolation chained
// segment by segment (the stream stores no quaternion track).
MotionSequence superres_baseline(const KeyframeStream& stream);

}  // namespace rtn
