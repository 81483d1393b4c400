#include "rtn/motion.hpp"

#include <stdexcept>

#include "rtn/text_io.hpp"

namespace rtn {

void Skeleton::validate() const {
  if (parents.empty()) throw std::invalid_argument("skeleton: empty");
  if (parents[0] != -1) throw std::invalid_argument("skeleton: joint 0 must be the root");
  for (size_t j = 1; j < parents.size(); ++j) {
    if (parents[j] < 0 || parents[j] >= static_cast<int>(j))
      throw std::invalid_argument("skeleton: parents must be topologically ordered");
  }
  if (joint_names.size() != parents.size())
    throw std::invalid_argument("skeleton: name/parent count mismatch");
  if (!rest_offsets.empty() && rest_offsets.size() != parents.size())
    throw std::invalid_argument("skeleton: rest offset count mismatch");
}

std::vector<double> MotionSequence::flat_frame(int frame) const {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(joint_count()) * 3);
  for (const Vec3& p : frames[frame]) {
    out.push_back(p.x);
    out.push_back(p.y);
    out.push_back(p.z);
  }
  return out;
}

void MotionSequence::validate() const {
  skeleton.validate();
  if (frames.size() < 2) throw std::invalid_argument("motion: needs at least 2 frames");
  if (fps <= 0) throw std::invalid_argument("motion: frame rate must be positive");
  const size_t k = static_cast<size_t>(joint_count());
  for (const auto& f : frames) {
    if (f.size() != k) throw std::invalid_argument("motion: frame joint count mismatch");
    for (const Vec3& p : f)
      if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
        throw std::invalid_argument("motion: non-finite position");
  }
  if (!local_rotations.empty() && local_rotations.size() != frames.size())
    throw std::invalid_argument("motion: rotation track frame count mismatch");
}

std::vector<Vec3> forward_kinematics(const Skeleton& skel, const Vec3& root_pos,
                                     const std::vector<Quat>& local_rot) {
  const int k = skel.joint_count();
  if (static_cast<int>(local_rot.size()) != k)
    throw std::invalid_argument("forward_kinematics: rotation count mismatch");
  if (skel.rest_offsets.empty())
    throw std::invalid_argument("forward_kinematics: skeleton has no rest offsets");
  std::vector<Vec3> pos(k);
  std::vector<Quat> glob(k);
  pos[0] = root_pos;
  glob[0] = local_rot[0];
  for (int j = 1; j < k; ++j) {
    const int p = skel.parents[j];
    pos[j] = pos[p] + glob[p].rotate(skel.rest_offsets[j]);
    glob[j] = glob[p] * local_rot[j];
  }
  return pos;
}

void save_motion(const MotionSequence& seq, const std::string& path) {
  seq.validate();
  auto os = open_out(path);
  const int k = seq.joint_count();
  os << "RTN-MOTION 1\n";
  os << "fps " << fmt17(seq.fps) << "\n";
  os << "actor " << seq.actor_id << "\n";
  os << "joints " << k << "\n";
  os << "names";
  for (const auto& n : seq.skeleton.joint_names) os << ' ' << n;
  os << "\nparents";
  for (int p : seq.skeleton.parents) os << ' ' << p;
  os << "\n";
  os << "offsets " << (seq.skeleton.rest_offsets.empty() ? 0 : 1) << "\n";
  if (!seq.skeleton.rest_offsets.empty()) {
    std::vector<double> row;
    for (const Vec3& o : seq.skeleton.rest_offsets) {
      row.push_back(o.x);
      row.push_back(o.y);
      row.push_back(o.z);
    }
    write_row(os, row);
  }
  os << "frames " << seq.frame_count() << "\n";
  os << "quats " << (seq.has_rotations() ? 1 : 0) << "\n";
  for (int f = 0; f < seq.frame_count(); ++f) write_row(os, seq.flat_frame(f));
  if (seq.has_rotations()) {
    std::vector<double> row(static_cast<size_t>(k) * 4);
    for (int f = 0; f < seq.frame_count(); ++f) {
      for (int j = 0; j < k; ++j) {
        const Quat& q = seq.local_rotations[f][j];
        row[4 * j + 0] = q.w;
        row[4 * j + 1] = q.x;
        row[4 * j + 2] = q.y;
        row[4 * j + 3] = q.z;
      }
      write_row(os, row);
    }
  }
}

MotionSequence load_motion(const std::string& path) {
  auto is = open_in(path);
  TextReader r(is, path);
  r.expect("RTN-MOTION 1");
  MotionSequence seq;
  auto t = r.tokens();
  if (t.size() != 2 || t[0] != "fps") r.fail("expected fps line");
  seq.fps = std::stod(t[1]);
  t = r.tokens();
  if (t.size() < 1 || t[0] != "actor") r.fail("expected actor line");
  seq.actor_id = t.size() > 1 ? t[1] : "";
  t = r.tokens();
  if (t.size() != 2 || t[0] != "joints") r.fail("expected joints line");
  const int k = std::stoi(t[1]);
  t = r.tokens();
  if (t.size() != static_cast<size_t>(k) + 1 || t[0] != "names") r.fail("expected names line");
  seq.skeleton.joint_names.assign(t.begin() + 1, t.end());
  t = r.tokens();
  if (t.size() != static_cast<size_t>(k) + 1 || t[0] != "parents") r.fail("expected parents line");
  for (int j = 0; j < k; ++j) seq.skeleton.parents.push_back(std::stoi(t[j + 1]));
  t = r.tokens();
  if (t.size() != 2 || t[0] != "offsets") r.fail("expected offsets line");
  if (std::stoi(t[1]) == 1) {
    auto row = r.reals(static_cast<size_t>(k) * 3);
    for (int j = 0; j < k; ++j)
      seq.skeleton.rest_offsets.push_back({row[3 * j], row[3 * j + 1], row[3 * j + 2]});
  }
  t = r.tokens();
  if (t.size() != 2 || t[0] != "frames") r.fail("expected frames line");
  const int nf = std::stoi(t[1]);
  t = r.tokens();
  if (t.size() != 2 || t[0] != "quats") r.fail("expected quats line");
  const bool has_q = std::stoi(t[1]) == 1;
  seq.frames.reserve(nf);
  for (int f = 0; f < nf; ++f) {
    auto row = r.reals(static_cast<size_t>(k) * 3);
    std::vector<Vec3> frame(k);
    for (int j = 0; j < k; ++j) frame[j] = {row[3 * j], row[3 * j + 1], row[3 * j + 2]};
    seq.frames.push_back(std::move(frame));
  }
  if (has_q) {
    seq.local_rotations.reserve(nf);
    for (int f = 0; f < nf; ++f) {
      auto row = r.reals(static_cast<size_t>(k) * 4);
      std::vector<Quat> frame(k);
      for (int j = 0; j < k; ++j)
        frame[j] = {row[4 * j], row[4 * j + 1], row[4 * j + 2], row[4 * j + 3]};
      seq.local_rotations.push_back(std::move(frame));
    }
  }
  seq.validate();
  return seq;
}

MotionSequence rotate_motion(const MotionSequence& seq, double angle, const Vec3& center) {
  MotionSequence out = seq;
  for (auto& frame : out.frames)
    for (Vec3& p : frame) p = rotate_y(p, angle, center);
  if (out.has_rotations()) {
    const Quat qrot = Quat::axis_angle({0, 1, 0}, angle);
    for (auto& frame : out.local_rotations) frame[0] = qrot * frame[0];
  }
  return out;
}

}  // namespace rtn
