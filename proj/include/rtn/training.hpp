#pragma once

#include <random>
#include <string>
#include <vector>

#include "rtn/model.hpp"
#include "rtn/optimizer.hpp"
#include "rtn/window.hpp"

namespace rtn {

enum class TeacherMode { FixedP, ScheduledLinear, Always, Never, WindowedAc };

TeacherMode teacher_mode_from_string(const std::string& s);
std::string to_string(TeacherMode m);

struct TrainConfig {
  int batch_size = 32;
  double lr = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  TeacherMode teacher = TeacherMode::FixedP;
  double teacher_p = 0.2;
  int gt_window = 5, pred_window = 5;  // windowed-ac lengths
  int epochs = 200;
  uint64_t seed = 0;
  bool augment_rotation = true;

  void validate() const;
};

struct TrainReport {
  struct Row {
    int epoch;  // 0 = evaluation before any training
    double train_loss;  // NaN for epoch 0
    double val_mse;
    double val_aco;
  };
  std::vector<Row> rows;
  int best_epoch = 0;
  double best_val_mse = 0.0;
  int skipped_steps = 0;   // non-finite gradients
  double wall_seconds = 0; // not serialized; artifacts stay byte-reproducible
};

// Eq.-style MSE in normalized space: mean over frames of the squared vector
// norm of the per-frame error. Both sequences must have equal length.
double mse_loss(const std::vector<std::vector<double>>& predicted,
                const std::vector<std::vector<double>>& truth);

// Scheduled-sampling primitive: ground truth with probability p, otherwise
// the prediction. Consumes exactly one uniform draw.
const std::vector<double>& select_prev_frame(const std::vector<double>& ground_truth,
                                             const std::vector<double>& prediction, double p,
                                             std::mt19937_64& rng);

// Trained state plus everything needed to reproduce / resume the run.
struct TrainState {
  ModelConfig model;
  TrainConfig train;
  NormStats stats;
  ParamStore params;       // current (end of training)
  std::vector<Tensor2> best_values;  // best-epoch parameter values, store order
  int epochs_run = 0;
  TrainReport report;
  std::mt19937_64 rng_shuffle, rng_augment, rng_teacher;

  void adopt_best();  // copy best-epoch values into params
};

// Full training loop: shuffle, minibatch, rotation augmentation (plus a
// uniformly drawn top-5 heightmap per sample when terrain-aware), rollout
// with teacher forcing, backprop, AMSGrad. Validation runs teacher-off on
// unaugmented windows; the best epoch minimizes validation MSE.
TrainState train(const WindowSplit& data, const ModelConfig& model_cfg, const TrainConfig& cfg);

// Continue a loaded state for extra epochs (resume path).
void train_more(TrainState& st, const WindowSplit& data, int extra_epochs);

// Teacher-off validation pass; returns {mse, aco}.
struct ValScore {
  double mse = 0, aco = 0;
};
ValScore validate_model(const std::vector<TransitionWindow>& windows, ParamStore& params,
                        const ModelConfig& cfg, const NormStats& stats, int batch_size);

}  // namespace rtn
