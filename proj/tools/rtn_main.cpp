// rtn: command-line front end wiring the library into reproducible pipelines.
//
// Exit codes: 0 success, 2 usage / unknown flag (CLI11), 3 missing input
// file, 4 malformed input or runtime failure.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <iostream>
#include <random>

#include "rtn/checkpoint.hpp"
#include "rtn/evaluation.hpp"
#include "rtn/generation.hpp"
#include "rtn/synth.hpp"
#include "rtn/text_io.hpp"

namespace fs = std::filesystem;
using namespace rtn;

namespace {

std::vector<fs::path> motion_files(const std::string& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("corpus directory not found: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".motion") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no .motion files in " + dir);
  return files;
}

// Windows per clip so fitted heightmaps can be attached to their source clip.
WindowSplit load_windows(const std::string& corpus_dir, const WindowSpec& spec,
                         const std::string& holdout, const std::string& terrain_dir) {
  WindowSplit all;
  for (const fs::path& f : motion_files(corpus_dir)) {
    MotionSequence seq = load_motion(f.string());
    std::vector<std::shared_ptr<const Heightmap>> maps;
    if (!terrain_dir.empty()) {
      for (int k = 0;; ++k) {
        const fs::path hm = fs::path(terrain_dir) / (f.stem().string() + "_hm" + std::to_string(k) + ".hm");
        if (!fs::exists(hm)) break;
        maps.push_back(std::make_shared<Heightmap>(load_heightmap(hm.string())));
      }
      if (maps.empty())
        throw std::runtime_error("no fitted heightmaps for " + f.stem().string() + " in " + terrain_dir);
    }
    WindowSplit split = window_dataset({seq}, spec, holdout);
    for (auto* bucket : {&split.train, &split.validation})
      for (TransitionWindow& w : *bucket) w.terrains = maps;
    std::move(split.train.begin(), split.train.end(), std::back_inserter(all.train));
    std::move(split.validation.begin(), split.validation.end(), std::back_inserter(all.validation));
  }
  return all;
}

void write_manifest(const std::string& path, const std::vector<std::string>& lines) {
  auto os = open_out(path);
  for (const auto& l : lines) os << l << "\n";
}

struct CommonModelFlags {
  std::string preset = "paper";
  std::string variant = "rtn";
  std::string hidden_init = "learned-from-x0";
  bool terrain_aware = false;
  bool no_future = false;
  bool no_resnet = false;
  int transition = 30;
  int joints = 22;

  void attach(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "model size preset: paper | desk")
        ->check(CLI::IsMember({"paper", "desk"}));
    cmd->add_option("--variant", variant, "architecture: rtn | f-erd | f-reslstm");
    cmd->add_option("--hidden-init", hidden_init, "learned-from-x0 | learned-common | zero");
    cmd->add_flag("--terrain-aware", terrain_aware, "condition on local terrain patches");
    cmd->add_flag("--no-future", no_future, "ablation: drop future-context conditioning");
    cmd->add_flag("--no-resnet", no_resnet, "ablation: decode absolute frames");
    cmd->add_option("--transition,-P", transition, "transition length P in frames");
  }

  ModelConfig build() const {
    ModelConfig m;
    m.joints = joints;
    m.transition = transition;
    m.terrain_aware = terrain_aware;
    m.variant = variant_from_string(variant);
    m.hidden_init = hidden_init_from_string(hidden_init);
    if (m.variant != Variant::Rtn) m.hidden_init = HiddenInitMode::Zero;
    if (m.variant == Variant::FErd) m.residual_output = false;
    if (no_future) m.future_conditioning = false;
    if (no_resnet) m.residual_output = false;
    if (preset == "desk") m.sizes = desk_sizes();
    m.validate();
    return m;
  }
};

struct CommonTrainFlags {
  int batch = 32;
  double lr = 0.0005;
  std::string teacher = "fixed-p";
  double teacher_p = 0.2;
  int epochs = 200;
  uint64_t seed = 0;
  bool no_augment = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--batch", batch, "minibatch size");
    cmd->add_option("--lr", lr, "learning rate");
    cmd->add_option("--teacher", teacher, "fixed-p | scheduled-linear | always | never | windowed-ac");
    cmd->add_option("--teacher-p", teacher_p, "ground-truth probability p")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--epochs", epochs, "training epochs");
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_flag("--no-augment", no_augment, "disable random-rotation augmentation");
  }

  TrainConfig build() const {
    TrainConfig c;
    c.batch_size = batch;
    c.lr = lr;
    c.teacher = teacher_mode_from_string(teacher);
    c.teacher_p = teacher_p;
    c.epochs = epochs;
    c.seed = seed;
    c.augment_rotation = !no_augment;
    c.validate();
    return c;
  }
};

int cmd_synth(const std::string& out_dir, uint64_t seed, int actors, int clips, int frames) {
  fs::create_directories(out_dir);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uh(-3.14159, 3.14159);
  std::uniform_real_distribution<double> uj(-1.0, 1.0);
  std::vector<std::string> manifest = {"rtn synth corpus", "seed " + std::to_string(seed),
                                       "actors " + std::to_string(actors),
                                       "clips-per-actor " + std::to_string(clips),
                                       "frames " + std::to_string(frames)};
  for (int a = 0; a < actors; ++a) {
    for (int c = 0; c < clips; ++c) {
      GaitSpec spec;
      spec.actor_id = "actor" + std::string(a < 10 ? "0" : "") + std::to_string(a);
      spec.seed = seed;
      spec.heading = uh(rng);
      const int kind = c % 4;
      switch (kind) {
        case 0:
          spec.kind = GaitKind::Walk;
          spec.speed = 0.9 + 0.15 * uj(rng);
          spec.wiggle_amp = 0.12;
          break;
        case 1:
          spec.kind = GaitKind::Turn;
          spec.speed = 1.0 + 0.15 * uj(rng);
          spec.turn_rate = (uj(rng) > 0 ? 1.0 : -1.0) * (0.3 + 0.1 * std::abs(uj(rng)));
          break;
        case 2:
          spec.kind = GaitKind::Run;
          spec.speed = 1.5 + 0.2 * uj(rng);
          spec.stride_period = 24;
          spec.wiggle_amp = 0.08;
          break;
        default:
          spec.kind = GaitKind::Leap;
          spec.speed = 1.2 + 0.15 * uj(rng);
          spec.stride_period = 26;
          spec.turn_rate = 0.15 * uj(rng);
          break;
      }
      const GaitClip clip = gen_gait(spec, frames);
      const std::string name = spec.actor_id + "_clip" + std::to_string(c) + ".motion";
      save_motion(clip.motion, (fs::path(out_dir) / name).string());
      manifest.push_back("clip " + name);
    }
  }
  write_manifest((fs::path(out_dir) / "corpus.manifest").string(), manifest);
  std::cout << "wrote " << actors * clips << " clips to " << out_dir << "\n";
  return 0;
}

int cmd_terrain_fit(const std::string& corpus, const std::string& out_dir, uint64_t seed,
                    int candidates, int keep, double roughness) {
  fs::create_directories(out_dir);
  std::vector<std::string> manifest = {"rtn terrain-fit", "seed " + std::to_string(seed),
                                       "candidates " + std::to_string(candidates),
                                       "keep " + std::to_string(keep)};
  for (const fs::path& f : motion_files(corpus)) {
    const MotionSequence seq = load_motion(f.string());
    const ContactTrack contacts = detect_contacts(seq, reference_feet());
    // candidate maps sized to the motion bounds plus patch + filter margins
    double min_x = 1e18, max_x = -1e18, min_z = 1e18, max_z = -1e18;
    for (const auto& frame : seq.frames)
      for (const Vec3& p : frame) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_z = std::min(min_z, p.z);
        max_z = std::max(max_z, p.z);
      }
    const double margin = 2.2;
    TerrainSpec ts;
    ts.cell = 1.3 / 32.0;
    ts.origin_x = min_x - margin;
    ts.origin_z = min_z - margin;
    ts.cols = static_cast<int>((max_x - min_x + 2 * margin) / ts.cell) + 2;
    ts.rows = static_cast<int>((max_z - min_z + 2 * margin) / ts.cell) + 2;
    std::vector<Heightmap> cands;
    for (int i = 0; i < candidates; ++i) {
      ts.seed = seed * 1000003 + std::hash<std::string>{}(f.stem().string()) % 999983 + i;
      ts.roughness = i == 0 ? 0.0 : roughness;
      cands.push_back(gen_terrain(ts));
    }
    const auto fitted = fit_heightmaps(seq, contacts, cands, keep);
    for (size_t k = 0; k < fitted.size(); ++k) {
      const std::string name = f.stem().string() + "_hm" + std::to_string(k) + ".hm";
      save_heightmap(fitted[k], (fs::path(out_dir) / name).string());
      manifest.push_back("map " + name);
    }
  }
  write_manifest((fs::path(out_dir) / "terrain.manifest").string(), manifest);
  std::cout << "fitted terrain for corpus " << corpus << " -> " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recurrent transition network for character locomotion"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value config file");

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "generate the synthetic locomotion corpus");
  std::string synth_out = "corpus";
  uint64_t synth_seed = 0;
  int synth_actors = 5, synth_clips = 6, synth_frames = 460;
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--seed", synth_seed, "master seed");
  synth->add_option("--actors", synth_actors, "number of actors");
  synth->add_option("--clips", synth_clips, "clips per actor");
  synth->add_option("--frames", synth_frames, "frames per clip");

  // ---- terrain-fit ----
  auto* tfit = app.add_subcommand("terrain-fit", "fit and refine top-k heightmaps per clip");
  std::string tf_corpus, tf_out = "terrain";
  uint64_t tf_seed = 0;
  int tf_candidates = 8, tf_keep = 5;
  double tf_rough = 0.12;
  tfit->add_option("--corpus", tf_corpus, "corpus directory")->required();
  tfit->add_option("--out", tf_out, "output directory");
  tfit->add_option("--seed", tf_seed, "master seed");
  tfit->add_option("--candidates", tf_candidates, "candidate heightmaps per clip");
  tfit->add_option("--keep", tf_keep, "heightmaps kept per clip");
  tfit->add_option("--roughness", tf_rough, "candidate terrain roughness (m)");

  // ---- train ----
  auto* tr = app.add_subcommand("train", "train a model and write checkpoint + report");
  std::string tr_corpus, tr_out = "run", tr_terrain, tr_holdout = "actor04", tr_resume;
  int tr_width = 0, tr_offset = 0, tr_extra = 0;
  CommonModelFlags tr_model;
  CommonTrainFlags tr_train;
  tr->add_option("--corpus", tr_corpus, "corpus directory");
  tr->add_option("--out", tr_out, "output directory");
  tr->add_option("--terrain", tr_terrain, "fitted terrain directory (enables patches)");
  tr->add_option("--holdout", tr_holdout, "validation actor id");
  tr->add_option("--width", tr_width, "window width (default: from P)");
  tr->add_option("--offset", tr_offset, "window stride (default: from P)");
  tr->add_option("--resume", tr_resume, "checkpoint to resume from");
  tr->add_option("--extra-epochs", tr_extra, "epochs to add when resuming");
  tr_model.attach(tr);
  tr_train.attach(tr);

  // ---- generate ----
  auto* gen = app.add_subcommand("generate", "generate transitions for corpus windows");
  std::string g_ckpt, g_corpus, g_out = "generated", g_actor;
  int g_blend = 10, g_limit = 8;
  bool g_noblend = false;
  gen->add_option("--checkpoint", g_ckpt, "trained checkpoint")->required();
  gen->add_option("--corpus", g_corpus, "corpus directory")->required();
  gen->add_option("--out", g_out, "output directory");
  gen->add_option("--actor", g_actor, "only windows of this actor");
  gen->add_option("--blend-duration", g_blend, "target blend duration d (frames)");
  gen->add_flag("--no-blend", g_noblend, "skip the target blend postprocess");
  gen->add_option("--limit", g_limit, "max windows to generate");

  // ---- superres ----
  auto* sr = app.add_subcommand("superres", "temporal super-resolution round trip");
  std::string sr_ckpt, sr_input, sr_out = "superres";
  int sr_segment = 30, sr_blend = 10;
  sr->add_option("--checkpoint", sr_ckpt, "trained checkpoint")->required();
  sr->add_option("--input", sr_input, "motion clip to compress")->required();
  sr->add_option("--out", sr_out, "output directory");
  sr->add_option("--segment", sr_segment, "frames per stored target");
  sr->add_option("--blend-duration", sr_blend, "target blend duration");

  // ---- eval ----
  auto* ev = app.add_subcommand("eval", "method comparison on the held-out actor");
  std::string ev_corpus, ev_out = "eval_report.txt", ev_holdout = "actor04";
  std::vector<std::string> ev_methods = {"int", "rtn"};
  CommonModelFlags ev_model;
  CommonTrainFlags ev_train;
  ev->add_option("--corpus", ev_corpus, "corpus directory")->required();
  ev->add_option("--out", ev_out, "report path");
  ev->add_option("--holdout", ev_holdout, "validation actor id");
  ev->add_option("--methods", ev_methods, "subset of: int rtn f-erd f-reslstm")->delimiter(',');
  ev_model.attach(ev);
  ev_train.attach(ev);

  // ---- ablate ----
  auto* ab = app.add_subcommand("ablate", "ablation study over RTN variants");
  std::string ab_corpus, ab_out = "ablation_report.txt", ab_holdout = "actor04";
  std::vector<std::string> ab_variants = {"full", "h0", "no-future"};
  CommonModelFlags ab_model;
  CommonTrainFlags ab_train;
  ab->add_option("--corpus", ab_corpus, "corpus directory")->required();
  ab->add_option("--out", ab_out, "report path");
  ab->add_option("--holdout", ab_holdout, "validation actor id");
  ab->add_option("--variants", ab_variants,
                 "subset of: full h0 hcommon no-future no-resnet ptf=sched ptf=1.0 ptf=0.0")
      ->delimiter(',');
  ab_model.attach(ab);
  ab_train.attach(ab);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return cmd_synth(synth_out, synth_seed, synth_actors, synth_clips, synth_frames);

    if (*tfit) return cmd_terrain_fit(tf_corpus, tf_out, tf_seed, tf_candidates, tf_keep, tf_rough);

    if (*tr) {
      fs::create_directories(tr_out);
      if (!tr_resume.empty()) {
        TrainState st = load_checkpoint(tr_resume);
        WindowSpec spec = window_spec_for(st.model.transition);
        if (tr_width > 0) spec.width = tr_width;
        if (tr_offset > 0) spec.offset = tr_offset;
        const WindowSplit data = load_windows(tr_corpus, spec, tr_holdout,
                                              st.model.terrain_aware ? tr_terrain : "");
        train_more(st, data, tr_extra);
        save_checkpoint(st, (fs::path(tr_out) / "checkpoint.ckpt").string());
        save_report(st.report, (fs::path(tr_out) / "report.txt").string(), st.train.seed);
        std::cout << "resumed " << tr_extra << " epochs; best epoch " << st.report.best_epoch
                  << " val-mse " << st.report.best_val_mse << "\n";
        return 0;
      }
      const ModelConfig mcfg = [&] {
        CommonModelFlags m = tr_model;
        m.terrain_aware = m.terrain_aware || !tr_terrain.empty();
        return m.build();
      }();
      const TrainConfig tcfg = tr_train.build();
      WindowSpec spec = window_spec_for(mcfg.transition);
      if (tr_width > 0) spec.width = tr_width;
      if (tr_offset > 0) spec.offset = tr_offset;
      const WindowSplit data =
          load_windows(tr_corpus, spec, tr_holdout, mcfg.terrain_aware ? tr_terrain : "");
      TrainState st = train(data, mcfg, tcfg);
      save_checkpoint(st, (fs::path(tr_out) / "checkpoint.ckpt").string());
      save_report(st.report, (fs::path(tr_out) / "report.txt").string(), tcfg.seed);
      std::cout << "trained " << tcfg.epochs << " epochs on " << data.train.size() << "/"
                << data.validation.size() << " windows; best epoch " << st.report.best_epoch
                << " val-mse " << st.report.best_val_mse << " (" << st.report.wall_seconds
                << " s)\n";
      return 0;
    }

    if (*gen) {
      if (g_noblend) g_blend = 0;
      if (!g_noblend && g_blend < 1)
        throw std::invalid_argument("generate: --blend-duration must be >= 1");
      TrainState st = load_checkpoint(g_ckpt);
      st.adopt_best();
      const WindowSpec spec = window_spec_for(st.model.transition);
      const WindowSplit data = load_windows(g_corpus, spec, /*holdout=*/g_actor, "");
      const auto& windows = g_actor.empty() ? data.train : data.validation;
      if (windows.empty()) throw std::runtime_error("generate: no matching windows");
      fs::create_directories(g_out);
      const int n = std::min<int>(g_limit, windows.size());
      double mse_acc = 0, aco_acc = 0;
      for (int i = 0; i < n; ++i) {
        const TransitionWindow& w = windows[i];
        GeneratedTransition t = generate_transition(w, st.params, st.model, st.stats);
        auto globals = t.frames_global;
        if (!g_noblend)
          globals = target_blend(globals, w.frames.frames[w.target_index()],
                                 std::min(g_blend, w.transition));
        MotionSequence outm;
        outm.skeleton = w.frames.skeleton;
        outm.fps = w.frames.fps;
        outm.actor_id = w.frames.actor_id;
        for (int f = 0; f < w.past; ++f) outm.frames.push_back(w.frames.frames[f]);
        for (const auto& f : globals) outm.frames.push_back(f);
        outm.frames.push_back(w.frames.frames[w.target_index() + 1]);
        save_motion(outm, (fs::path(g_out) / ("transition" + std::to_string(i) + ".motion")).string());
        std::vector<std::vector<Vec3>> truth;
        for (int e = 0; e < w.transition; ++e) truth.push_back(w.frames.frames[w.past + e]);
        std::vector<std::vector<Vec3>> pred(globals.begin(), globals.begin() + w.transition);
        aco_acc += aco(pred, truth);
        std::vector<std::vector<double>> gt;
        const auto all = preprocess(w.frames, st.stats);
        for (int e = 0; e <= w.transition; ++e) gt.push_back(all[w.past + e]);
        mse_acc += mse_loss(t.frames_norm, gt);
      }
      write_manifest((fs::path(g_out) / "generate.manifest").string(),
                     {"rtn generate", "checkpoint " + g_ckpt, "blend " + std::to_string(g_blend),
                      "windows " + std::to_string(n)});
      std::cout << "generated " << n << " transitions; mean mse " << mse_acc / n << " mean aco "
                << aco_acc / n << " cm\n";
      return 0;
    }

    if (*sr) {
      TrainState st = load_checkpoint(sr_ckpt);
      st.adopt_best();
      const MotionSequence clip = load_motion(sr_input);
      fs::create_directories(sr_out);
      const KeyframeStream keys = compress_clip(clip, sr_segment);
      save_keyframes(keys, (fs::path(sr_out) / "clip.keys").string());
      const MotionSequence dec =
          superres_decompress(keys, st.params, st.model, st.stats, {sr_blend});
      save_motion(dec, (fs::path(sr_out) / "decompressed.motion").string());
      const MotionSequence base = superres_baseline(keys);
      std::vector<std::vector<Vec3>> truth, rtn_pred, int_pred;
      for (int t = static_cast<int>(keys.context.size()); t < dec.frame_count(); ++t) {
        truth.push_back(clip.frames[t]);
        rtn_pred.push_back(dec.frames[t]);
        int_pred.push_back(base.frames[t]);
      }
      const double rtn_aco = aco(rtn_pred, truth);
      const double int_aco = aco(int_pred, truth);
      write_manifest((fs::path(sr_out) / "superres.manifest").string(),
                     {"rtn superres", "input " + sr_input, "segment " + std::to_string(sr_segment),
                      "stored-frames " + std::to_string(keys.stored_frames()),
                      "raw-frames " + std::to_string(clip.frame_count()),
                      "rtn-aco " + fmt17(rtn_aco), "int-aco " + fmt17(int_aco)});
      std::cout << "stored " << keys.stored_frames() << " of " << clip.frame_count()
                << " frames; rtn aco " << rtn_aco << " cm, int aco " << int_aco << " cm\n";
      return 0;
    }

    if (*ev) {
      const ModelConfig mcfg = ev_model.build();
      const TrainConfig tcfg = ev_train.build();
      const WindowSpec spec = window_spec_for(mcfg.transition);
      const WindowSplit data = load_windows(ev_corpus, spec, ev_holdout, "");
      const EvalReport report = run_comparison(data, ev_methods, mcfg, tcfg);
      report.save(ev_out);
      std::cout << report.to_table();
      return 0;
    }

    if (*ab) {
      const ModelConfig mcfg = ab_model.build();
      const TrainConfig tcfg = ab_train.build();
      const WindowSpec spec = window_spec_for(mcfg.transition);
      const WindowSplit data = load_windows(ab_corpus, spec, ab_holdout, "");
      const EvalReport report = run_ablation(data, ab_variants, mcfg, tcfg);
      report.save(ab_out);
      std::cout << report.to_table();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "rtn: " << e.what() << "\n";
    const std::string msg = e.what();
    if (msg.find("not found") != std::string::npos || msg.find("cannot open") != std::string::npos)
      return 3;
    return 4;
  }
  return 2;
}
