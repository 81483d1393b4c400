#include "rtn/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "rtn/metrics.hpp"

namespace rtn {

TeacherMode teacher_mode_from_string(const std::string& s) {
  if (s == "fixed-p") return TeacherMode::FixedP;
  if (s == "scheduled-linear") return TeacherMode::ScheduledLinear;
  if (s == "always") return TeacherMode::Always;
  if (s == "never") return TeacherMode::Never;
  if (s == "windowed-ac") return TeacherMode::WindowedAc;
  throw std::invalid_argument("unknown teacher mode: " + s);
}

std::string to_string(TeacherMode m) {
  switch (m) {
    case TeacherMode::FixedP: return "fixed-p";
    case TeacherMode::ScheduledLinear: return "scheduled-linear";
    case TeacherMode::Always: return "always";
    case TeacherMode::Never: return "never";
    case TeacherMode::WindowedAc: return "windowed-ac";
  }
  return "?";
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("train: batch size must be >= 1");
  if (!(teacher_p >= 0.0 && teacher_p <= 1.0))
    throw std::invalid_argument("train: teacher probability must lie in [0, 1]");
  if (epochs < 0) throw std::invalid_argument("train: negative epoch count");
  if (!(lr > 0)) throw std::invalid_argument("train: learning rate must be positive");
}

double mse_loss(const std::vector<std::vector<double>>& predicted,
                const std::vector<std::vector<double>>& truth) {
  if (predicted.size() != truth.size() || predicted.empty())
    throw std::invalid_argument("mse_loss: sequences must have equal, nonzero length");
  double acc = 0.0;
  for (size_t t = 0; t < predicted.size(); ++t) {
    if (predicted[t].size() != truth[t].size())
      throw std::invalid_argument("mse_loss: frame dimensions differ");
    for (size_t d = 0; d < predicted[t].size(); ++d) {
      const double e = predicted[t][d] - truth[t][d];
      acc += e * e;
    }
  }
  return acc / static_cast<double>(predicted.size());
}

const std::vector<double>& select_prev_frame(const std::vector<double>& ground_truth,
                                             const std::vector<double>& prediction, double p,
                                             std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng) < p ? ground_truth : prediction;
}

void TrainState::adopt_best() {
  if (best_values.empty()) return;
  for (int i = 0; i < params.count(); ++i) params.entry(i).value = best_values[i];
}

namespace {

std::mt19937_64 seeded(uint64_t seed, uint64_t tag) {
  std::seed_seq seq{seed, tag};
  return std::mt19937_64(seq);
}

TeacherPolicy policy_for_epoch(const TrainConfig& cfg, int global_epoch, std::mt19937_64* rng) {
  TeacherPolicy pol;
  switch (cfg.teacher) {
    case TeacherMode::Always:
      pol.mode = TeacherPolicy::Mode::Always;
      break;
    case TeacherMode::Never:
      pol.mode = TeacherPolicy::Mode::Never;
      break;
    case TeacherMode::FixedP:
      pol.mode = TeacherPolicy::Mode::FixedP;
      pol.p = cfg.teacher_p;
      pol.rng = rng;
      break;
    case TeacherMode::ScheduledLinear: {
      pol.mode = TeacherPolicy::Mode::FixedP;
      const int horizon = std::max(1, cfg.epochs - 1);
      pol.p = std::max(0.0, 1.0 - static_cast<double>(global_epoch - 1) / horizon);
      pol.rng = rng;
      break;
    }
    case TeacherMode::WindowedAc:
      pol.mode = TeacherPolicy::Mode::Windowed;
      pol.gt_window = cfg.gt_window;
      pol.pred_window = cfg.pred_window;
      break;
  }
  return pol;
}

}  // namespace

ValScore validate_model(const std::vector<TransitionWindow>& windows, ParamStore& params,
                        const ModelConfig& cfg, const NormStats& stats, int batch_size) {
  if (windows.empty()) throw std::invalid_argument("validate_model: no windows");
  ValScore score;
  int done = 0;
  double mse_acc = 0, aco_acc = 0;
  while (done < static_cast<int>(windows.size())) {
    const int b = std::min<int>(batch_size, windows.size() - done);
    std::vector<const TransitionWindow*> ptrs;
    std::vector<TerrainView> views;
    for (int i = 0; i < b; ++i) {
      const TransitionWindow& w = windows[done + i];
      ptrs.push_back(&w);
      if (cfg.terrain_aware) {
        if (w.terrains.empty())
          throw std::invalid_argument("validate_model: terrain-aware model but window has no terrain");
        views.push_back({w.terrains[0].get(), 0.0, {}});
      }
    }
    const EpisodeBatch batch = make_episode_batch(ptrs, cfg, stats, views);
    Graph g(&params);
    const RolloutResult r = run_episode(g, cfg, stats, batch, TeacherPolicy{}, false);
    const int T = batch.target_index();
    for (int s = 0; s < b; ++s) {
      double acc = 0;
      for (int e = 0; e <= batch.P; ++e)
        for (int d = 0; d < batch.D; ++d) {
          const double err = r.pred_values[e].at(d, s) - batch.x[batch.past + e].at(d, s);
          acc += err * err;
        }
      mse_acc += acc / (batch.P + 1);
      // ACO over the P in-between frames, global space
      std::vector<std::vector<Vec3>> pred, truth;
      for (int e = 0; e < batch.P; ++e) {
        pred.push_back(r.pred_globals[e][s]);
        truth.push_back(batch.y[batch.past + e][s]);
      }
      aco_acc += aco(pred, truth);
    }
    (void)T;
    done += b;
  }
  score.mse = mse_acc / windows.size();
  score.aco = aco_acc / windows.size();
  return score;
}

void train_more(TrainState& st, const WindowSplit& data, int extra_epochs) {
  const auto t_start = std::chrono::steady_clock::now();
  const ModelConfig& mcfg = st.model;
  const TrainConfig& cfg = st.train;
  if (data.train.empty() || data.validation.empty())
    throw std::invalid_argument("train: empty training or validation set");
  if (mcfg.terrain_aware)
    for (const auto& w : data.train)
      if (w.terrains.empty())
        throw std::invalid_argument("train: terrain-aware model but window has no fitted terrain");

  std::vector<int> order(data.train.size());
  std::iota(order.begin(), order.end(), 0);

  for (int e = 0; e < extra_epochs; ++e) {
    const int global_epoch = st.epochs_run + 1;
    TeacherPolicy pol = policy_for_epoch(cfg, global_epoch, &st.rng_teacher);
    std::shuffle(order.begin(), order.end(), st.rng_shuffle);

    double loss_acc = 0;
    int samples = 0;
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const int b = std::min<size_t>(cfg.batch_size, order.size() - start);
      std::vector<TransitionWindow> rotated;
      std::vector<const TransitionWindow*> ptrs;
      std::vector<TerrainView> views;
      rotated.reserve(b);
      for (int i = 0; i < b; ++i) {
        const TransitionWindow& w = data.train[order[start + i]];
        double angle = 0.0;
        if (cfg.augment_rotation) {
          std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
          angle = u(st.rng_augment);
        }
        const Heightmap* hm = nullptr;
        if (mcfg.terrain_aware) {
          std::uniform_int_distribution<int> pick(0, static_cast<int>(w.terrains.size()) - 1);
          hm = w.terrains[pick(st.rng_augment)].get();
        }
        const Vec3 center = hm ? hm->center() : w.anchor();
        rotated.push_back(rotate_window(w, angle, center));
        if (hm) views.push_back({hm, angle, center});
      }
      for (int i = 0; i < b; ++i) ptrs.push_back(&rotated[i]);

      const EpisodeBatch batch = make_episode_batch(ptrs, mcfg, st.stats, views);
      Graph g(&st.params);
      const RolloutResult r = run_episode(g, mcfg, st.stats, batch, pol, true);
      const double loss = g.value(r.loss).data[0];
      if (!std::isfinite(loss))
        throw std::runtime_error("train: divergent (non-finite) loss at epoch " +
                                 std::to_string(global_epoch));
      g.backward(r.loss);
      if (!amsgrad_step(st.params, g.param_grads(),
                        {cfg.lr, cfg.beta1, cfg.beta2, cfg.eps}))
        ++st.report.skipped_steps;
      loss_acc += loss * b;
      samples += b;
    }

    const ValScore val = validate_model(data.validation, st.params, mcfg, st.stats, cfg.batch_size);
    TrainReport::Row row;
    row.epoch = global_epoch;
    row.train_loss = loss_acc / samples;
    row.val_mse = val.mse;
    row.val_aco = val.aco;
    st.report.rows.push_back(row);
    if (val.mse < st.report.best_val_mse) {
      st.report.best_val_mse = val.mse;
      st.report.best_epoch = global_epoch;
      st.best_values.clear();
      for (int i = 0; i < st.params.count(); ++i) st.best_values.push_back(st.params.entry(i).value);
    }
    ++st.epochs_run;
  }
  st.report.wall_seconds +=
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
}

TrainState train(const WindowSplit& data, const ModelConfig& model_cfg, const TrainConfig& cfg) {
  model_cfg.validate();
  cfg.validate();
  if (data.train.empty() || data.validation.empty())
    throw std::invalid_argument("train: empty training or validation set");

  TrainState st;
  st.model = model_cfg;
  st.train = cfg;
  st.stats = compute_stats(data.train);
  const uint64_t init_seed = seeded(cfg.seed, 1)();
  init_params(st.params, model_cfg, init_seed);
  st.rng_shuffle = seeded(cfg.seed, 2);
  st.rng_augment = seeded(cfg.seed, 3);
  st.rng_teacher = seeded(cfg.seed, 4);

  const ValScore val0 = validate_model(data.validation, st.params, model_cfg, st.stats, cfg.batch_size);
  TrainReport::Row row0;
  row0.epoch = 0;
  row0.train_loss = std::numeric_limits<double>::quiet_NaN();
  row0.val_mse = val0.mse;
  row0.val_aco = val0.aco;
  st.report.rows.push_back(row0);
  st.report.best_epoch = 0;
  st.report.best_val_mse = val0.mse;
  st.best_values.clear();
  for (int i = 0; i < st.params.count(); ++i) st.best_values.push_back(st.params.entry(i).value);

  train_more(st, data, cfg.epochs);
  return st;
}

}  // namespace rtn
