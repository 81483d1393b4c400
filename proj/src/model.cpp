#include "rtn/model.hpp"

#include <cmath>
#include <stdexcept>

namespace rtn {

Variant variant_from_string(const std::string& s) {
  if (s == "rtn") return Variant::Rtn;
  if (s == "f-erd") return Variant::FErd;
  if (s == "f-reslstm") return Variant::FResLstm;
  throw std::invalid_argument("unknown architecture variant: " + s);
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Rtn: return "rtn";
    case Variant::FErd: return "f-erd";
    case Variant::FResLstm: return "f-reslstm";
  }
  return "?";
}

HiddenInitMode hidden_init_from_string(const std::string& s) {
  if (s == "learned-from-x0") return HiddenInitMode::LearnedFromX0;
  if (s == "learned-common") return HiddenInitMode::LearnedCommon;
  if (s == "zero") return HiddenInitMode::Zero;
  throw std::invalid_argument("unknown hidden-init mode: " + s);
}

std::string to_string(HiddenInitMode m) {
  switch (m) {
    case HiddenInitMode::LearnedFromX0: return "learned-from-x0";
    case HiddenInitMode::LearnedCommon: return "learned-common";
    case HiddenInitMode::Zero: return "zero";
  }
  return "?";
}

ModelSizes desk_sizes() {
  ModelSizes s;
  s.enc1 = 64;
  s.enc2 = 64;
  s.tgt = 32;
  s.off = 32;
  s.lstm = 64;
  s.dec1 = 48;
  s.dec2 = 32;
  s.hinit = 64;
  return s;
}

void ModelConfig::validate() const {
  if (joints < 2) throw std::invalid_argument("model: needs at least 2 joints");
  if (transition < 1) throw std::invalid_argument("model: transition length must be >= 1");
  if (!(lrelu_slope > 0 && lrelu_slope < 1))
    throw std::invalid_argument("model: lrelu slope must lie in (0, 1)");
  for (int v : {sizes.enc1, sizes.enc2, sizes.tgt, sizes.off, sizes.lstm, sizes.dec1, sizes.dec2,
                sizes.hinit})
    if (v < 1) throw std::invalid_argument("model: layer sizes must be positive");
  if (variant == Variant::FErd) {
    if (hidden_init != HiddenInitMode::Zero)
      throw std::invalid_argument("model: f-erd has no learned hidden initializer");
    if (residual_output)
      throw std::invalid_argument("model: f-erd decodes absolute frames (residual off)");
  }
  if (variant == Variant::FResLstm) {
    if (hidden_init != HiddenInitMode::Zero)
      throw std::invalid_argument("model: f-reslstm has no learned hidden initializer");
    if (!residual_output) throw std::invalid_argument("model: f-reslstm is residual by definition");
  }
}

void init_params(ParamStore& store, const ModelConfig& cfg, uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  const int D = cfg.dim();
  auto weight = [&](const std::string& name, int rows, int cols) {
    store.add(name, uniform_fan_in(rows, cols, rng));
  };
  auto bias = [&](const std::string& name, int rows) { store.add(name, Tensor2(rows, 1, 0.0)); };

  if (cfg.variant != Variant::FResLstm) {
    weight("E.W1", cfg.sizes.enc1, cfg.enc_input_dim());
    bias("E.b1", cfg.sizes.enc1);
    weight("E.W2", cfg.sizes.enc2, cfg.sizes.enc1);
    bias("E.b2", cfg.sizes.enc2);
  }
  if (cfg.future_conditioning) {
    weight("F.W1", cfg.sizes.tgt, 2 * D);
    bias("F.b1", cfg.sizes.tgt);
    weight("F.W2", cfg.sizes.tgt, cfg.sizes.tgt);
    bias("F.b2", cfg.sizes.tgt);
    weight("O.W1", cfg.sizes.off, D);
    bias("O.b1", cfg.sizes.off);
    weight("O.W2", cfg.sizes.off, cfg.sizes.off);
    bias("O.b2", cfg.sizes.off);
  }
  for (const char* gate : {"i", "o", "f", "c"}) {
    const std::string g(gate);
    weight("R.W" + g, cfg.sizes.lstm, cfg.lstm_input_dim());
    weight("R.U" + g, cfg.sizes.lstm, cfg.sizes.lstm);
    if (cfg.future_conditioning) weight("R.C" + g, cfg.sizes.lstm, cfg.cond_dim());
    bias("R.b" + g, cfg.sizes.lstm);
  }
  if (cfg.variant == Variant::FResLstm) {
    weight("D.W1", D, cfg.sizes.lstm);
    bias("D.b1", D);
  } else {
    weight("D.W1", cfg.sizes.dec1, cfg.sizes.lstm);
    bias("D.b1", cfg.sizes.dec1);
    weight("D.W2", cfg.sizes.dec2, cfg.sizes.dec1);
    bias("D.b2", cfg.sizes.dec2);
    weight("D.W3", D, cfg.sizes.dec2);
    bias("D.b3", D);
  }
  if (cfg.hidden_init == HiddenInitMode::LearnedFromX0) {
    weight("H.W1", cfg.sizes.hinit, D);
    bias("H.b1", cfg.sizes.hinit);
    weight("H.W2", 2 * cfg.sizes.lstm, cfg.sizes.hinit);
    bias("H.b2", 2 * cfg.sizes.lstm);
  } else if (cfg.hidden_init == HiddenInitMode::LearnedCommon) {
    bias("H.h0", cfg.sizes.lstm);
    bias("H.c0", cfg.sizes.lstm);
  }
}

namespace {

// x -> lrelu(W2 lrelu(W1 x + b1) + b2)
NodeId mlp2(Graph& g, const ModelConfig& cfg, const std::string& prefix, NodeId x) {
  NodeId h = g.lrelu(g.add(g.matmul(g.param(prefix + ".W1"), x), g.param(prefix + ".b1")),
                     cfg.lrelu_slope);
  return g.lrelu(g.add(g.matmul(g.param(prefix + ".W2"), h), g.param(prefix + ".b2")),
                 cfg.lrelu_slope);
}

}  // namespace

NodeId frame_encode(Graph& g, const ModelConfig& cfg, NodeId x, std::optional<NodeId> patch) {
  if (cfg.variant == Variant::FResLstm)
    throw std::invalid_argument("frame_encode: f-reslstm has no frame encoder");
  if (cfg.terrain_aware != patch.has_value())
    throw std::invalid_argument(cfg.terrain_aware
                                    ? "frame_encode: terrain-aware model needs a patch"
                                    : "frame_encode: patch supplied to a terrain-unaware model");
  const NodeId input = patch ? g.concat({x, *patch}) : x;
  return mlp2(g, cfg, "E", input);
}

FutureEncoding encode_future(Graph& g, const ModelConfig& cfg, NodeId target_vec,
                             NodeId offset_vec) {
  if (!cfg.future_conditioning)
    throw std::invalid_argument("encode_future: future conditioning is disabled");
  return {mlp2(g, cfg, "F", target_vec), mlp2(g, cfg, "O", offset_vec)};
}

LstmState lstm_step(Graph& g, const ModelConfig& cfg, NodeId input, const LstmState& prev,
                    std::optional<NodeId> cond) {
  if (cfg.future_conditioning != cond.has_value())
    throw std::invalid_argument("lstm_step: conditioning input does not match the config");
  auto gate_pre = [&](const std::string& gate) {
    NodeId s = g.add(g.matmul(g.param("R.W" + gate), input),
                     g.matmul(g.param("R.U" + gate), prev.h));
    if (cond) s = g.add(s, g.matmul(g.param("R.C" + gate), *cond));
    return g.add(s, g.param("R.b" + gate));
  };
  const NodeId gi = g.sigmoid(gate_pre("i"));
  const NodeId go = g.sigmoid(gate_pre("o"));
  const NodeId gf = g.sigmoid(gate_pre("f"));
  const NodeId cand = gate_pre("c");  // linear pre-activation; tanh applied in the cell update
  LstmState next;
  next.c = g.add(g.cmul(gf, prev.c), g.cmul(gi, g.tanh(cand)));
  next.h = g.cmul(go, g.tanh(next.c));
  if (!g.value(next.c).all_finite() || !g.value(next.h).all_finite())
    throw std::runtime_error("lstm_step: non-finite recurrent state (divergence)");
  return next;
}

NodeId frame_decode(Graph& g, const ModelConfig& cfg, NodeId h, NodeId x_cur) {
  NodeId out;
  if (cfg.variant == Variant::FResLstm) {
    out = g.add(g.matmul(g.param("D.W1"), h), g.param("D.b1"));
  } else {
    NodeId d1 = g.lrelu(g.add(g.matmul(g.param("D.W1"), h), g.param("D.b1")), cfg.lrelu_slope);
    NodeId d2 = g.lrelu(g.add(g.matmul(g.param("D.W2"), d1), g.param("D.b2")), cfg.lrelu_slope);
    out = g.add(g.matmul(g.param("D.W3"), d2), g.param("D.b3"));
  }
  return cfg.residual_output ? g.add(out, x_cur) : out;
}

LstmState init_hidden(Graph& g, const ModelConfig& cfg, NodeId x0, int batch) {
  const int n = cfg.sizes.lstm;
  switch (cfg.hidden_init) {
    case HiddenInitMode::Zero: {
      const NodeId z = g.input(Tensor2(n, batch, 0.0), "");
      return {z, z};
    }
    case HiddenInitMode::LearnedCommon: {
      const NodeId ones = g.input(Tensor2(1, batch, 1.0));
      return {g.matmul(g.param("H.h0"), ones), g.matmul(g.param("H.c0"), ones)};
    }
    case HiddenInitMode::LearnedFromX0: {
      const NodeId hid = g.lrelu(
          g.add(g.matmul(g.param("H.W1"), x0), g.param("H.b1")), cfg.lrelu_slope);
      const NodeId both = g.add(g.matmul(g.param("H.W2"), hid), g.param("H.b2"));
      return {g.slice(both, 0, n), g.slice(both, n, n)};
    }
  }
  throw std::invalid_argument("init_hidden: unknown mode");
}

bool TeacherPolicy::use_ground_truth(int emit_index) const {
  switch (mode) {
    case Mode::Never: return false;
    case Mode::Always: return true;
    case Mode::FixedP: {
      if (!rng) throw std::invalid_argument("teacher policy: FixedP needs an rng");
      std::uniform_real_distribution<double> u(0.0, 1.0);
      return u(*rng) < p;
    }
    case Mode::Windowed:
      return emit_index % (gt_window + pred_window) < gt_window;
  }
  return false;
}

EpisodeBatch make_episode_batch(const std::vector<const TransitionWindow*>& windows,
                                const ModelConfig& cfg, const NormStats& stats,
                                const std::vector<TerrainView>& terrain) {
  if (windows.empty()) throw std::invalid_argument("episode batch: no windows");
  EpisodeBatch b;
  b.B = static_cast<int>(windows.size());
  b.K = cfg.joints;
  b.D = cfg.dim();
  b.past = windows[0]->past;
  b.P = windows[0]->transition;
  if (cfg.terrain_aware && static_cast<int>(terrain.size()) != b.B)
    throw std::invalid_argument("episode batch: terrain-aware model needs one terrain per sample");
  b.terrain = terrain;
  const int T = b.target_index();

  b.x.assign(T + 1, Tensor2(b.D, b.B));
  b.y.assign(T + 2, std::vector<std::vector<Vec3>>(b.B));
  b.target = Tensor2(2 * b.D, b.B);
  for (int s = 0; s < b.B; ++s) {
    const TransitionWindow& w = *windows[s];
    if (w.past != b.past || w.transition != b.P)
      throw std::invalid_argument("episode batch: mixed window specs");
    if (w.frames.joint_count() != b.K)
      throw std::invalid_argument("episode batch: joint count does not match the model");
    w.validate();
    const auto frames = preprocess(w.frames, stats);
    for (int t = 0; t <= T; ++t)
      for (int d = 0; d < b.D; ++d) b.x[t].at(d, s) = frames[t][d];
    for (int t = 0; t <= T + 1; ++t) b.y[t][s] = w.frames.frames[t];
    const auto tv = build_target_vector(w.frames.frames[T], w.frames.frames[T + 1], stats);
    for (int d = 0; d < 2 * b.D; ++d) b.target.at(d, s) = tv[d];
  }
  return b;
}

namespace {

Tensor2 offsets_input(const EpisodeBatch& batch, const NormStats& stats,
                      const std::vector<std::vector<Vec3>>& consumed) {
  Tensor2 o(batch.D, batch.B);
  const int T = batch.target_index();
  for (int s = 0; s < batch.B; ++s) {
    const auto v = compute_global_offset(consumed[s], batch.y[T][s], stats);
    for (int d = 0; d < batch.D; ++d) o.at(d, s) = v[d];
  }
  return o;
}

Tensor2 patches_input(const EpisodeBatch& batch, const NormStats& stats,
                      const std::vector<std::vector<Vec3>>& consumed) {
  Tensor2 p(kPatchDim, batch.B);
  for (int s = 0; s < batch.B; ++s) {
    const auto v = extract_patch(batch.terrain[s], consumed[s][0], stats);
    for (int d = 0; d < kPatchDim; ++d) p.at(d, s) = v[d];
  }
  return p;
}

}  // namespace

RolloutResult run_episode(Graph& g, const ModelConfig& cfg, const NormStats& stats,
                          const EpisodeBatch& batch, const TeacherPolicy& teacher,
                          bool build_loss) {
  cfg.validate();
  const int T = batch.target_index();
  const int B = batch.B;
  if (static_cast<int>(batch.x.size()) != T + 1 || static_cast<int>(batch.y.size()) != T + 2)
    throw std::invalid_argument("run_episode: batch frame counts do not match past + P");
  if (cfg.terrain_aware && static_cast<int>(batch.terrain.size()) != B)
    throw std::invalid_argument("run_episode: missing terrain views");

  RolloutResult out;
  const NodeId x0 = g.input(batch.x[0], "x0");
  LstmState state = init_hidden(g, cfg, x0, B);

  NodeId h_target = -1;
  if (cfg.future_conditioning) {
    const NodeId tv = g.input(batch.target, "target");
    h_target = mlp2(g, cfg, "F", tv);
  }

  // Globals of the frame consumed at the current step, per sample.
  std::vector<std::vector<Vec3>> consumed(B);
  std::vector<std::vector<Vec3>> last_emission(B);
  Tensor2 last_pred_value;

  for (int t = 0; t < T; ++t) {
    Tensor2 x_in(batch.D, B);
    if (t < batch.past) {
      x_in = batch.x[t];
      for (int s = 0; s < B; ++s) consumed[s] = batch.y[t][s];
    } else {
      for (int s = 0; s < B; ++s) {
        if (teacher.use_ground_truth(t - batch.past)) {
          for (int d = 0; d < batch.D; ++d) x_in.at(d, s) = batch.x[t].at(d, s);
          consumed[s] = batch.y[t][s];
        } else {
          for (int d = 0; d < batch.D; ++d) x_in.at(d, s) = last_pred_value.at(d, s);
          consumed[s] = last_emission[s];
        }
      }
    }
    const NodeId x_node = g.input(std::move(x_in));

    std::optional<NodeId> cond;
    if (cfg.future_conditioning) {
      const NodeId o_node = g.input(offsets_input(batch, stats, consumed));
      const NodeId h_off = mlp2(g, cfg, "O", o_node);
      cond = g.concat({h_target, h_off});
    }

    std::optional<NodeId> patch_node;
    if (cfg.terrain_aware) patch_node = g.input(patches_input(batch, stats, consumed));

    NodeId lstm_in;
    if (cfg.variant == Variant::FResLstm) {
      lstm_in = patch_node ? g.concat({x_node, *patch_node}) : x_node;
    } else {
      lstm_in = frame_encode(g, cfg, x_node, patch_node);
    }
    state = lstm_step(g, cfg, lstm_in, state, cond);

    if (t >= batch.past - 1) {
      const NodeId pred = frame_decode(g, cfg, state.h, x_node);
      const Tensor2& pv = g.value(pred);
      if (!pv.all_finite())
        throw std::runtime_error("run_episode: non-finite emission at step " +
                                 std::to_string(t + 1 - batch.past));
      // reconstruct the emitted frame in global space from the consumed roots
      std::vector<std::vector<Vec3>> glob(B);
      std::vector<double> col(batch.D);
      for (int s = 0; s < B; ++s) {
        for (int d = 0; d < batch.D; ++d) col[d] = pv.at(d, s);
        glob[s] = reconstruct_frame(col, stats, consumed[s][0], nullptr);
      }
      out.pred.push_back(pred);
      out.pred_values.push_back(pv);
      out.pred_globals.push_back(glob);
      last_emission = std::move(glob);
      last_pred_value = pv;
    }
  }

  if (build_loss) {
    NodeId acc = -1;
    for (int e = 0; e <= batch.P; ++e) {
      const NodeId ref = g.input(batch.x[batch.past + e]);
      const NodeId term = g.sum_squares(g.sub(out.pred[e], ref));
      acc = (acc < 0) ? term : g.add(acc, term);
    }
    out.loss = g.scale(acc, 1.0 / (static_cast<double>(batch.P + 1) * B));
  }
  return out;
}

GeneratedTransition generate_transition(const TransitionWindow& w, ParamStore& params,
                                        const ModelConfig& cfg, const NormStats& stats,
                                        const TeacherPolicy& teacher, const TerrainView* terrain) {
  std::vector<TerrainView> views;
  if (cfg.terrain_aware) {
    if (!terrain) throw std::invalid_argument("generate_transition: terrain view required");
    views.push_back(*terrain);
  }
  const EpisodeBatch batch = make_episode_batch({&w}, cfg, stats, views);
  Graph g(&params);
  const RolloutResult r = run_episode(g, cfg, stats, batch, teacher, false);
  GeneratedTransition out;
  for (size_t e = 0; e < r.pred_values.size(); ++e) {
    std::vector<double> col(batch.D);
    for (int d = 0; d < batch.D; ++d) col[d] = r.pred_values[e].at(d, 0);
    out.frames_norm.push_back(std::move(col));
    out.frames_global.push_back(r.pred_globals[e][0]);
  }
  return out;
}

}  // namespace rtn
