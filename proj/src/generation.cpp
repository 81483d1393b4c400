#include "rtn/generation.hpp"

#include <stdexcept>

#include "rtn/text_io.hpp"

namespace rtn {

std::vector<std::vector<Vec3>> target_blend(const std::vector<std::vector<Vec3>>& generated,
                                            const std::vector<Vec3>& target, int duration) {
  const int n = static_cast<int>(generated.size());  // P+1 frames, indices s..T
  if (n < 1) throw std::invalid_argument("target_blend: empty generation");
  const int P = n - 1;
  if (duration < 1 || duration > std::max(P, 1))
    throw std::invalid_argument("target_blend: duration must lie in [1, P]");
  const int k = static_cast<int>(target.size());
  if (static_cast<int>(generated.back().size()) != k)
    throw std::invalid_argument("target_blend: joint counts differ");

  std::vector<Vec3> e(k);
  for (int j = 0; j < k; ++j) e[j] = target[j] - generated.back()[j];

  std::vector<std::vector<Vec3>> out = generated;
  for (int i = 0; i < n; ++i) {
    const int dist = (n - 1) - i;  // T - t
    if (dist >= duration) continue;
    if (dist == 0) {
      out[i] = target;  // omega = 1: exact, bit-for-bit
      continue;
    }
    const double w = 1.0 - static_cast<double>(dist) / duration;
    for (int j = 0; j < k; ++j) out[i][j] = out[i][j] + e[j] * w;
  }
  return out;
}

KeyframeStream compress_clip(const MotionSequence& clip, int segment, int past) {
  clip.validate();
  if (segment < 3) throw std::invalid_argument("compress_clip: segment too short");
  const int L = clip.frame_count();
  if (L < past + segment + 1) throw std::invalid_argument("compress_clip: clip too short");
  KeyframeStream s;
  s.fps = clip.fps;
  s.segment = segment;
  s.skeleton = clip.skeleton;
  s.actor_id = clip.actor_id;
  for (int t = 0; t < past; ++t) s.context.push_back(clip.frames[t]);
  int last = past - 1;
  for (int T = past - 1 + segment; T + 1 <= L - 1; T += segment) {
    s.targets.push_back({T, clip.frames[T], clip.frames[T + 1]});
    last = T;
  }
  if (last + 3 <= L - 1) {
    // final partial segment up to the last representable target
    s.targets.push_back({L - 2, clip.frames[L - 2], clip.frames[L - 1]});
  }
  return s;
}

void save_keyframes(const KeyframeStream& s, const std::string& path) {
  auto os = open_out(path);
  const int k = s.skeleton.joint_count();
  os << "RTN-KEYS 1\n";
  os << "fps " << fmt17(s.fps) << "\n";
  os << "actor " << s.actor_id << "\n";
  os << "segment " << s.segment << "\n";
  os << "joints " << k << "\n";
  os << "names";
  for (const auto& n : s.skeleton.joint_names) os << ' ' << n;
  os << "\nparents";
  for (int p : s.skeleton.parents) os << ' ' << p;
  os << "\ncontext " << s.context.size() << "\n";
  auto put = [&](const std::vector<Vec3>& frame) {
    std::vector<double> row;
    row.reserve(static_cast<size_t>(k) * 3);
    for (const Vec3& p : frame) {
      row.push_back(p.x);
      row.push_back(p.y);
      row.push_back(p.z);
    }
    write_row(os, row);
  };
  for (const auto& f : s.context) put(f);
  os << "targets " << s.targets.size() << "\n";
  for (const auto& t : s.targets) {
    os << "target " << t.frame_index << "\n";
    put(t.pose);
    put(t.next_pose);
  }
}

KeyframeStream load_keyframes(const std::string& path) {
  auto is = open_in(path);
  TextReader r(is, path);
  r.expect("RTN-KEYS 1");
  KeyframeStream s;
  auto t = r.tokens();
  if (t.size() != 2 || t[0] != "fps") r.fail("expected fps");
  s.fps = std::stod(t[1]);
  t = r.tokens();
  if (t.empty() || t[0] != "actor") r.fail("expected actor");
  s.actor_id = t.size() > 1 ? t[1] : "";
  t = r.tokens();
  if (t.size() != 2 || t[0] != "segment") r.fail("expected segment");
  s.segment = std::stoi(t[1]);
  t = r.tokens();
  if (t.size() != 2 || t[0] != "joints") r.fail("expected joints");
  const int k = std::stoi(t[1]);
  t = r.tokens();
  if (t.size() != static_cast<size_t>(k) + 1 || t[0] != "names") r.fail("expected names");
  s.skeleton.joint_names.assign(t.begin() + 1, t.end());
  t = r.tokens();
  if (t.size() != static_cast<size_t>(k) + 1 || t[0] != "parents") r.fail("expected parents");
  for (int j = 0; j < k; ++j) s.skeleton.parents.push_back(std::stoi(t[j + 1]));
  auto get = [&]() {
    auto row = r.reals(static_cast<size_t>(k) * 3);
    std::vector<Vec3> frame(k);
    for (int j = 0; j < k; ++j) frame[j] = {row[3 * j], row[3 * j + 1], row[3 * j + 2]};
    return frame;
  };
  t = r.tokens();
  if (t.size() != 2 || t[0] != "context") r.fail("expected context");
  const int nc = std::stoi(t[1]);
  for (int i = 0; i < nc; ++i) s.context.push_back(get());
  t = r.tokens();
  if (t.size() != 2 || t[0] != "targets") r.fail("expected targets");
  const int nt = std::stoi(t[1]);
  for (int i = 0; i < nt; ++i) {
    t = r.tokens();
    if (t.size() != 2 || t[0] != "target") r.fail("expected target");
    KeyframeStream::Target tgt;
    tgt.frame_index = std::stoi(t[1]);
    tgt.pose = get();
    tgt.next_pose = get();
    s.targets.push_back(std::move(tgt));
  }
  s.skeleton.validate();
  return s;
}

namespace {

// Self-contained window for one segment: real context, placeholder transition
// frames (never consumed: generation is fully autoregressive), stored target
// pair at the end.
TransitionWindow segment_window(const KeyframeStream& s,
                                const std::vector<std::vector<Vec3>>& context, int P,
                                const KeyframeStream::Target& tgt) {
  TransitionWindow w;
  w.past = static_cast<int>(context.size());
  w.transition = P;
  w.frames.skeleton = s.skeleton;
  w.frames.fps = s.fps;
  w.frames.actor_id = s.actor_id;
  w.frames.frames = context;
  for (int i = 0; i < P; ++i) w.frames.frames.push_back(context.back());
  w.frames.frames.push_back(tgt.pose);       // frame T
  w.frames.frames.push_back(tgt.next_pose);  // frame T+1
  return w;
}

}  // namespace

MotionSequence superres_decompress(const KeyframeStream& stream, ParamStore& params,
                                   const ModelConfig& cfg, const NormStats& stats,
                                   const BlendConfig& blend) {
  if (stream.targets.empty()) throw std::invalid_argument("superres: stream has no targets");
  if (static_cast<int>(stream.context.size()) < 2)
    throw std::invalid_argument("superres: stream context too short");
  MotionSequence out;
  out.skeleton = stream.skeleton;
  out.fps = stream.fps;
  out.actor_id = stream.actor_id;
  out.frames = stream.context;

  int prev_index = static_cast<int>(stream.context.size()) - 1;
  const int past = static_cast<int>(stream.context.size());
  for (size_t seg = 0; seg < stream.targets.size(); ++seg) {
    const auto& tgt = stream.targets[seg];
    const int P = tgt.frame_index - prev_index - 1;
    if (P < 1)
      throw std::invalid_argument("superres: targets too close together at segment " +
                                  std::to_string(seg));
    std::vector<std::vector<Vec3>> context(out.frames.end() - past, out.frames.end());
    const TransitionWindow w = segment_window(stream, context, P, tgt);
    GeneratedTransition gen;
    try {
      gen = generate_transition(w, params, cfg, stats);
    } catch (const std::exception& e) {
      throw std::runtime_error("superres: generation failed in segment " + std::to_string(seg) +
                               ": " + e.what());
    }
    const int d = std::min(blend.duration, P);
    const auto blended = target_blend(gen.frames_global, tgt.pose, std::max(1, d));
    for (const auto& f : blended) out.frames.push_back(f);
    prev_index = tgt.frame_index;
  }
  return out;
}

MotionSequence superres_baseline(const KeyframeStream& stream) {
  if (stream.targets.empty()) throw std::invalid_argument("superres: stream has no targets");
  MotionSequence out;
  out.skeleton = stream.skeleton;
  out.fps = stream.fps;
  out.actor_id = stream.actor_id;
  out.frames = stream.context;
  const int k = stream.skeleton.joint_count();
  int prev_index = static_cast<int>(stream.context.size()) - 1;
  for (const auto& tgt : stream.targets) {
    const int P = tgt.frame_index - prev_index - 1;
    const std::vector<Vec3> a = out.frames.back();
    for (int i = 0; i <= P; ++i) {
      const double u = static_cast<double>(i + 1) / (P + 1);
      std::vector<Vec3> f(k);
      for (int j = 0; j < k; ++j) f[j] = a[j] + (tgt.pose[j] - a[j]) * u;
      out.frames.push_back(std::move(f));
    }
    prev_index = tgt.frame_index;
  }
  return out;
}

}  // namespace rtn
