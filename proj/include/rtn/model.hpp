#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>

#include "rtn/graph.hpp"
#include "rtn/heightmap.hpp"
#include "rtn/window.hpp"

namespace rtn {

enum class Variant { Rtn, FErd, FResLstm };
enum class HiddenInitMode { LearnedFromX0, LearnedCommon, Zero };

Variant variant_from_string(const std::string& s);
std::string to_string(Variant v);
HiddenInitMode hidden_init_from_string(const std::string& s);
std::string to_string(HiddenInitMode m);

struct ModelSizes {
  int enc1 = 512, enc2 = 512;   // frame encoder layers
  int tgt = 128, off = 128;     // future-context encoders (both layers each)
  int lstm = 512;
  int dec1 = 256, dec2 = 128;   // frame decoder hidden layers
  int hinit = 512;              // hidden-state initializer hidden layer
};

// Desk-scale sizes used by the fast experiment presets and the test suite.
ModelSizes desk_sizes();

struct ModelConfig {
  int joints = 22;
  bool terrain_aware = false;
  bool residual_output = true;
  bool future_conditioning = true;
  HiddenInitMode hidden_init = HiddenInitMode::LearnedFromX0;
  Variant variant = Variant::Rtn;
  int transition = 30;  // P
  double lrelu_slope = 0.01;
  ModelSizes sizes;

  int dim() const { return 3 * joints; }
  int enc_input_dim() const { return dim() + (terrain_aware ? kPatchDim : 0); }
  int lstm_input_dim() const {
    return variant == Variant::FResLstm ? enc_input_dim() : sizes.enc2;
  }
  int cond_dim() const { return sizes.tgt + sizes.off; }

  // F-ERD: no learned hidden initializer, decodes absolute frames.
  // F-ResLSTM: single recurrent layer with a linear residual head.
  void validate() const;
};

// Registers every trainable tensor (uniform fan-in init, zero biases) in a
// fixed order so checkpoints serialize reproducibly.
void init_params(ParamStore& store, const ModelConfig& cfg, uint64_t seed);

// --- graph builders for the five sub-networks -------------------------------

NodeId frame_encode(Graph& g, const ModelConfig& cfg, NodeId x, std::optional<NodeId> patch);

struct FutureEncoding {
  NodeId target;  // h^F, constant per episode
  NodeId offset;  // h^O_t
};
FutureEncoding encode_future(Graph& g, const ModelConfig& cfg, NodeId target_vec, NodeId offset_vec);

struct LstmState {
  NodeId h;  // output state
  NodeId c;  // cell state
};
LstmState lstm_step(Graph& g, const ModelConfig& cfg, NodeId input, const LstmState& prev,
                    std::optional<NodeId> cond);

NodeId frame_decode(Graph& g, const ModelConfig& cfg, NodeId h, NodeId x_cur);

LstmState init_hidden(Graph& g, const ModelConfig& cfg, NodeId x0, int batch);

// --- episode rollout ---------------------------------------------------------

// Teacher-forcing selection policy. FixedP consumes one uniform draw per
// (step, sample) in rollout order; Windowed alternates fixed-length
// ground-truth / prediction windows (AcLSTM style) without randomness.
struct TeacherPolicy {
  enum class Mode { Never, Always, FixedP, Windowed };
  Mode mode = Mode::Never;
  double p = 0.2;
  int gt_window = 5, pred_window = 5;
  std::mt19937_64* rng = nullptr;

  bool use_ground_truth(int emit_index) const;
};

// Numeric episode data for a batch of windows (columns = samples).
struct EpisodeBatch {
  int B = 0, K = 0, D = 0;
  int past = 10, P = 30;
  std::vector<Tensor2> x;  // frames 0..T normalized, each D x B
  std::vector<std::vector<std::vector<Vec3>>> y;  // frames 0..T+1 global, [frame][sample][joint]
  Tensor2 target;          // 2D x B
  std::vector<TerrainView> terrain;  // size B when terrain-aware

  int target_index() const { return past + P; }
};

EpisodeBatch make_episode_batch(const std::vector<const TransitionWindow*>& windows,
                                const ModelConfig& cfg, const NormStats& stats,
                                const std::vector<TerrainView>& terrain = {});

struct RolloutResult {
  std::vector<NodeId> pred;                       // P+1 emissions, D x B nodes
  std::vector<Tensor2> pred_values;               // copies of the emitted values
  std::vector<std::vector<std::vector<Vec3>>> pred_globals;  // [emission][sample][joint]
  NodeId loss = -1;                               // 1x1 node when requested
};

// Consumes the 10 past frames (always ground truth), then emits P+1 frames
// autoregressively. The offset vector o_t and terrain patch are recomputed
// each step from the frame actually consumed; fed-back predictions, offsets
// and patches enter as fresh inputs (no gradient through them), while the
// recurrent state carries gradients across all steps.
RolloutResult run_episode(Graph& g, const ModelConfig& cfg, const NormStats& stats,
                          const EpisodeBatch& batch, const TeacherPolicy& teacher,
                          bool build_loss);

// Single-window convenience wrapper.
struct GeneratedTransition {
  std::vector<std::vector<double>> frames_norm;   // P+1 x D
  std::vector<std::vector<Vec3>> frames_global;   // P+1 x K
};
GeneratedTransition generate_transition(const TransitionWindow& w, ParamStore& params,
                                        const ModelConfig& cfg, const NormStats& stats,
                                        const TeacherPolicy& teacher = {},
                                        const TerrainView* terrain = nullptr);

}  // namespace rtn
