#include "rtn/preprocess.hpp"

#include <cmath>
#include <stdexcept>

#include "rtn/text_io.hpp"

namespace rtn {

void NormStats::validate(int K) const {
  const int d = 3 * K;
  if (x.dim() != d) throw std::invalid_argument("stats: x stream dimension != 3K");
  if (tvel.dim() != d) throw std::invalid_argument("stats: velocity stream dimension != 3K");
  if (offset.dim() != d) throw std::invalid_argument("stats: offset stream dimension != 3K");
  if (!patch.empty() && patch.dim() != kPatchDim)
    throw std::invalid_argument("stats: patch stream dimension != 169");
  for (const StreamStats* s : {&x, &tvel, &offset, &patch})
    for (double v : s->sigma)
      if (!(v > 0.0)) throw std::invalid_argument("stats: sigma must be positive");
}

StreamStats accumulate_stats(const std::vector<std::vector<double>>& samples) {
  if (samples.empty()) throw std::invalid_argument("stats: empty sample set");
  const size_t d = samples[0].size();
  StreamStats s;
  s.mu.assign(d, 0.0);
  s.sigma.assign(d, 0.0);
  for (const auto& row : samples) {
    if (row.size() != d) throw std::invalid_argument("stats: ragged sample set");
    for (size_t i = 0; i < d; ++i) s.mu[i] += row[i];
  }
  const double n = static_cast<double>(samples.size());
  for (size_t i = 0; i < d; ++i) s.mu[i] /= n;
  for (const auto& row : samples)
    for (size_t i = 0; i < d; ++i) {
      const double c = row[i] - s.mu[i];
      s.sigma[i] += c * c;
    }
  for (size_t i = 0; i < d; ++i) {
    s.sigma[i] = std::sqrt(s.sigma[i] / n);
    if (s.sigma[i] < kSigmaFloor) s.sigma[i] = kSigmaFloor;
  }
  return s;
}

namespace {

void write_stream(std::ostream& os, const char* name, const StreamStats& s) {
  os << "stream " << name << ' ' << s.dim() << '\n';
  write_row(os, s.mu);
  write_row(os, s.sigma);
}

StreamStats read_stream(TextReader& r, const std::string& name) {
  auto t = r.tokens();
  if (t.size() != 3 || t[0] != "stream" || t[1] != name) r.fail("expected stream " + name);
  const size_t d = std::stoul(t[2]);
  StreamStats s;
  s.mu = r.reals(d);
  s.sigma = r.reals(d);
  return s;
}

}  // namespace

void save_stats(const NormStats& s, const std::string& path) {
  auto os = open_out(path);
  os << "RTN-STATS 1\n";
  write_stream(os, "x", s.x);
  write_stream(os, "tvel", s.tvel);
  write_stream(os, "offset", s.offset);
  os << "patch " << (s.patch.empty() ? 0 : 1) << '\n';
  if (!s.patch.empty()) write_stream(os, "patch", s.patch);
}

NormStats load_stats(const std::string& path) {
  auto is = open_in(path);
  TextReader r(is, path);
  r.expect("RTN-STATS 1");
  NormStats s;
  s.x = read_stream(r, "x");
  s.tvel = read_stream(r, "tvel");
  s.offset = read_stream(r, "offset");
  auto t = r.tokens();
  if (t.size() != 2 || t[0] != "patch") r.fail("expected patch flag");
  if (std::stoi(t[1]) == 1) s.patch = read_stream(r, "patch");
  return s;
}

std::vector<double> normalize(const std::vector<double>& raw, const StreamStats& s) {
  if (raw.size() != s.mu.size()) throw std::invalid_argument("normalize: dimension mismatch");
  std::vector<double> out(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - s.mu[i]) / s.sigma[i];
  return out;
}

std::vector<double> denormalize(const std::vector<double>& norm, const StreamStats& s) {
  if (norm.size() != s.mu.size()) throw std::invalid_argument("denormalize: dimension mismatch");
  std::vector<double> out(norm.size());
  for (size_t i = 0; i < norm.size(); ++i) out[i] = norm[i] * s.sigma[i] + s.mu[i];
  return out;
}

std::vector<Vec3> compute_root_velocities(const MotionSequence& seq) {
  if (seq.frame_count() < 2)
    throw std::invalid_argument("compute_root_velocities: needs at least 2 frames");
  std::vector<Vec3> v(seq.frame_count());
  for (int t = 1; t < seq.frame_count(); ++t) v[t] = seq.root(t) - seq.root(t - 1);
  v[0] = v[1];
  return v;
}

std::vector<double> frame_features_raw(const std::vector<Vec3>& global_frame, const Vec3& v) {
  const int k = static_cast<int>(global_frame.size());
  std::vector<double> out(static_cast<size_t>(3) * k);
  out[0] = v.x;
  out[1] = v.y;
  out[2] = v.z;
  const Vec3& r = global_frame[0];
  for (int j = 1; j < k; ++j) {
    const Vec3 rel = global_frame[j] - r;
    out[3 * j + 0] = rel.x;
    out[3 * j + 1] = rel.y;
    out[3 * j + 2] = rel.z;
  }
  return out;
}

std::vector<std::vector<double>> preprocess(const MotionSequence& seq, const NormStats& stats) {
  if (stats.x.dim() != 3 * seq.joint_count())
    throw std::invalid_argument("preprocess: stats dimension does not match 3K");
  const auto vel = compute_root_velocities(seq);
  std::vector<std::vector<double>> out;
  out.reserve(seq.frames.size());
  for (int t = 0; t < seq.frame_count(); ++t)
    out.push_back(normalize(frame_features_raw(seq.frames[t], vel[t]), stats.x));
  return out;
}

std::vector<Vec3> reconstruct_frame(const std::vector<double>& x_norm, const NormStats& stats,
                                    const Vec3& prev_root, Vec3* new_root) {
  const auto raw = denormalize(x_norm, stats.x);
  const int k = static_cast<int>(raw.size()) / 3;
  const Vec3 v{raw[0], raw[1], raw[2]};
  const Vec3 r = prev_root + v;
  std::vector<Vec3> frame(k);
  frame[0] = r;
  for (int j = 1; j < k; ++j)
    frame[j] = Vec3{raw[3 * j], raw[3 * j + 1], raw[3 * j + 2]} + r;
  if (new_root) *new_root = r;
  return frame;
}

MotionSequence inverse_preprocess(const std::vector<std::vector<double>>& frames,
                                  const NormStats& stats, const Vec3& anchor,
                                  const Skeleton& skel, double fps) {
  if (frames.empty()) throw std::invalid_argument("inverse_preprocess: no frames");
  if (!std::isfinite(anchor.x) || !std::isfinite(anchor.y) || !std::isfinite(anchor.z))
    throw std::invalid_argument("inverse_preprocess: anchor must be finite");
  MotionSequence seq;
  seq.skeleton = skel;
  seq.fps = fps;
  // Frame 0 sits at the anchor itself (its velocity slot is the v_0 = v_1
  // convention and is not consumed); later roots accumulate velocities.
  Vec3 root = anchor;
  for (size_t t = 0; t < frames.size(); ++t) {
    const auto raw = denormalize(frames[t], stats.x);
    const int k = static_cast<int>(raw.size()) / 3;
    if (t > 0) root = root + Vec3{raw[0], raw[1], raw[2]};
    std::vector<Vec3> frame(k);
    frame[0] = root;
    for (int j = 1; j < k; ++j)
      frame[j] = Vec3{raw[3 * j], raw[3 * j + 1], raw[3 * j + 2]} + root;
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

std::vector<double> build_target_vector(const std::vector<Vec3>& y_T,
                                        const std::vector<Vec3>& y_T1, const NormStats& stats) {
  if (y_T.size() != y_T1.size()) throw std::invalid_argument("build_target_vector: frame shapes differ");
  const int k = static_cast<int>(y_T.size());
  // The target state is derived from exactly these two frames, so the root
  // velocity slot of the processed pose is the forward difference.
  const Vec3 v = y_T1[0] - y_T[0];
  const auto pose = normalize(frame_features_raw(y_T, v), stats.x);
  std::vector<double> vel_raw(static_cast<size_t>(3) * k);
  for (int j = 0; j < k; ++j) {
    const Vec3 d = y_T1[j] - y_T[j];
    vel_raw[3 * j + 0] = d.x;
    vel_raw[3 * j + 1] = d.y;
    vel_raw[3 * j + 2] = d.z;
  }
  const auto vel = normalize(vel_raw, stats.tvel);
  std::vector<double> out;
  out.reserve(pose.size() + vel.size());
  out.insert(out.end(), pose.begin(), pose.end());
  out.insert(out.end(), vel.begin(), vel.end());
  return out;
}

std::vector<double> compute_global_offset(const std::vector<Vec3>& y_hat,
                                          const std::vector<Vec3>& y_T, const NormStats& stats) {
  if (y_hat.size() != y_T.size())
    throw std::invalid_argument("compute_global_offset: frame shapes differ");
  const int k = static_cast<int>(y_hat.size());
  std::vector<double> raw(static_cast<size_t>(3) * k);
  for (int j = 0; j < k; ++j) {
    const Vec3 d = y_T[j] - y_hat[j];
    raw[3 * j + 0] = d.x;
    raw[3 * j + 1] = d.y;
    raw[3 * j + 2] = d.z;
  }
  return normalize(raw, stats.offset);
}

}  // namespace rtn
