#include "rtn/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "rtn/text_io.hpp"

namespace rtn {

std::string EvalReport::to_table() const {
  std::ostringstream os;
  os << std::left << std::setw(14) << "method" << std::right << std::setw(10) << "mse"
     << std::setw(10) << "aco" << "\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(14) << r.method << std::right << std::setw(10) << std::fixed
       << std::setprecision(4) << r.mse << std::setw(10) << std::setprecision(3) << r.aco << "\n";
  }
  return os.str();
}

void EvalReport::save(const std::string& path) const {
  auto os = open_out(path);
  os << "RTN-EVAL 1\n";
  os << to_table();
  os << "rows\n";
  for (const auto& r : rows) {
    os << r.method << '\t' << fmt17(r.mse) << '\t' << fmt17(r.aco) << "\n";
    os << "profile " << r.method;
    for (double v : r.profile) os << '\t' << fmt17(v);
    os << "\n";
  }
}

namespace {

// Normalized-space frames of a window aligned with rollout emissions.
std::vector<std::vector<double>> gt_norm_frames(const TransitionWindow& w, const NormStats& stats,
                                                int from, int count) {
  const auto all = preprocess(w.frames, stats);
  return {all.begin() + from, all.begin() + from + count};
}

// Preprocess generated global frames into normalized space, using the last
// context frame as the velocity reference for the first generated frame.
std::vector<std::vector<double>> norm_from_globals(const TransitionWindow& w,
                                                   const std::vector<std::vector<Vec3>>& globals,
                                                   const NormStats& stats) {
  std::vector<std::vector<double>> out;
  out.reserve(globals.size());
  Vec3 prev_root = w.frames.frames[w.past - 1][0];
  for (const auto& frame : globals) {
    const Vec3 v = frame[0] - prev_root;
    out.push_back(normalize(frame_features_raw(frame, v), stats.x));
    prev_root = frame[0];
  }
  return out;
}

}  // namespace

EvalRow evaluate_model(const std::string& method_name,
                       const std::vector<TransitionWindow>& windows, ParamStore& params,
                       const ModelConfig& cfg, const NormStats& stats, int batch_size) {
  if (windows.empty()) throw std::invalid_argument("evaluate_model: no windows");
  EvalRow row;
  row.method = method_name;
  const int P = windows[0].transition;
  row.profile.assign(P, 0.0);
  double mse_acc = 0;
  int done = 0;
  while (done < static_cast<int>(windows.size())) {
    const int b = std::min<int>(batch_size, windows.size() - done);
    std::vector<const TransitionWindow*> ptrs;
    std::vector<TerrainView> views;
    for (int i = 0; i < b; ++i) {
      ptrs.push_back(&windows[done + i]);
      if (cfg.terrain_aware) {
        if (windows[done + i].terrains.empty())
          throw std::invalid_argument("evaluate_model: window has no fitted terrain");
        views.push_back({windows[done + i].terrains[0].get(), 0.0, {}});
      }
    }
    const EpisodeBatch batch = make_episode_batch(ptrs, cfg, stats, views);
    Graph g(&params);
    const RolloutResult r = run_episode(g, cfg, stats, batch, TeacherPolicy{}, false);
    for (int s = 0; s < b; ++s) {
      double acc = 0;
      for (int e = 0; e <= batch.P; ++e)
        for (int d = 0; d < batch.D; ++d) {
          const double err = r.pred_values[e].at(d, s) - batch.x[batch.past + e].at(d, s);
          acc += err * err;
        }
      mse_acc += acc / (batch.P + 1);
      std::vector<std::vector<Vec3>> pred, truth;
      for (int e = 0; e < batch.P; ++e) {
        pred.push_back(r.pred_globals[e][s]);
        truth.push_back(batch.y[batch.past + e][s]);
      }
      const auto curve = offset_profile(pred, truth);
      for (int e = 0; e < P; ++e) row.profile[e] += curve[e];
    }
    done += b;
  }
  const double n = static_cast<double>(windows.size());
  row.mse = mse_acc / n;
  for (double& v : row.profile) v /= n;
  double s = 0;
  for (double v : row.profile) s += v;
  row.aco = s / P;
  return row;
}

EvalRow evaluate_interpolation(const std::vector<TransitionWindow>& windows,
                               const NormStats& stats, IntMode mode) {
  if (windows.empty()) throw std::invalid_argument("evaluate_interpolation: no windows");
  EvalRow row;
  row.method = mode == IntMode::Slerp ? "int" : "int-lerp";
  const int P = windows[0].transition;
  row.profile.assign(P, 0.0);
  double mse_acc = 0;
  for (const TransitionWindow& w : windows) {
    const auto globals = interpolation_baseline(w, mode);  // P+1 frames, s..T
    const auto pred_norm = norm_from_globals(w, globals, stats);
    const auto truth_norm = gt_norm_frames(w, stats, w.past, w.transition + 1);
    mse_acc += mse_loss(pred_norm, truth_norm);
    std::vector<std::vector<Vec3>> pred(globals.begin(), globals.begin() + P);
    std::vector<std::vector<Vec3>> truth;
    for (int e = 0; e < P; ++e) truth.push_back(w.frames.frames[w.past + e]);
    const auto curve = offset_profile(pred, truth);
    for (int e = 0; e < P; ++e) row.profile[e] += curve[e];
  }
  const double n = static_cast<double>(windows.size());
  row.mse = mse_acc / n;
  for (double& v : row.profile) v /= n;
  double s = 0;
  for (double v : row.profile) s += v;
  row.aco = s / P;
  return row;
}

void apply_variant(const std::string& name, ModelConfig& mcfg, TrainConfig& tcfg) {
  if (name == "full" || name == "rtn") {
    mcfg.variant = Variant::Rtn;
  } else if (name == "no-future") {
    mcfg.future_conditioning = false;
  } else if (name == "ptf=sched") {
    tcfg.teacher = TeacherMode::ScheduledLinear;
  } else if (name == "ptf=1.0") {
    tcfg.teacher = TeacherMode::Always;
  } else if (name == "ptf=0.0") {
    tcfg.teacher = TeacherMode::Never;
  } else if (name == "no-resnet") {
    mcfg.residual_output = false;
  } else if (name == "h0") {
    mcfg.hidden_init = HiddenInitMode::Zero;
  } else if (name == "hcommon") {
    mcfg.hidden_init = HiddenInitMode::LearnedCommon;
  } else if (name == "f-erd") {
    mcfg.variant = Variant::FErd;
    mcfg.hidden_init = HiddenInitMode::Zero;
    mcfg.residual_output = false;
  } else if (name == "f-reslstm") {
    mcfg.variant = Variant::FResLstm;
    mcfg.hidden_init = HiddenInitMode::Zero;
    mcfg.residual_output = true;
  } else {
    throw std::invalid_argument("unknown variant: " + name);
  }
}

EvalReport run_comparison(const WindowSplit& data, const std::vector<std::string>& methods,
                          const ModelConfig& base_cfg, const TrainConfig& train_cfg) {
  EvalReport report;
  for (const std::string& m : methods) {
    if (m == "int") {
      const NormStats stats = compute_stats(data.train);
      const IntMode mode =
          data.validation.front().frames.has_rotations() ? IntMode::Slerp : IntMode::Lerp;
      EvalRow row = evaluate_interpolation(data.validation, stats, mode);
      row.method = "int";
      report.rows.push_back(std::move(row));
      continue;
    }
    ModelConfig mcfg = base_cfg;
    TrainConfig tcfg = train_cfg;
    apply_variant(m, mcfg, tcfg);
    TrainState st = train(data, mcfg, tcfg);
    st.adopt_best();
    report.rows.push_back(
        evaluate_model(m, data.validation, st.params, mcfg, st.stats, tcfg.batch_size));
  }
  return report;
}

EvalReport run_ablation(const WindowSplit& data, const std::vector<std::string>& variants,
                        const ModelConfig& base_cfg, const TrainConfig& train_cfg) {
  EvalReport report;
  for (const std::string& v : variants) {
    ModelConfig mcfg = base_cfg;
    TrainConfig tcfg = train_cfg;
    apply_variant(v, mcfg, tcfg);  // throws on unknown variants
    TrainState st = train(data, mcfg, tcfg);
    st.adopt_best();
    report.rows.push_back(
        evaluate_model(v, data.validation, st.params, mcfg, st.stats, tcfg.batch_size));
  }
  return report;
}

}  // namespace rtn
