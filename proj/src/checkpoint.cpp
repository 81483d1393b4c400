#include "rtn/checkpoint.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rtn/text_io.hpp"

namespace rtn {

namespace {

void write_tensor(std::ostream& os, const Tensor2& t) {
  for (int r = 0; r < t.rows; ++r) write_row(os, &t.data[static_cast<size_t>(r) * t.cols], t.cols);
}

Tensor2 read_tensor(TextReader& r, int rows, int cols) {
  Tensor2 t(rows, cols);
  for (int i = 0; i < rows; ++i) {
    auto row = r.reals(cols);
    std::copy(row.begin(), row.end(), t.data.begin() + static_cast<size_t>(i) * cols);
  }
  return t;
}

void write_model_config(std::ostream& os, const ModelConfig& m) {
  os << "model-config\n";
  os << "joints " << m.joints << "\n";
  os << "terrain-aware " << (m.terrain_aware ? 1 : 0) << "\n";
  os << "residual-output " << (m.residual_output ? 1 : 0) << "\n";
  os << "future-conditioning " << (m.future_conditioning ? 1 : 0) << "\n";
  os << "hidden-init " << to_string(m.hidden_init) << "\n";
  os << "variant " << to_string(m.variant) << "\n";
  os << "transition " << m.transition << "\n";
  os << "lrelu-slope " << fmt17(m.lrelu_slope) << "\n";
  os << "sizes " << m.sizes.enc1 << ' ' << m.sizes.enc2 << ' ' << m.sizes.tgt << ' ' << m.sizes.off
     << ' ' << m.sizes.lstm << ' ' << m.sizes.dec1 << ' ' << m.sizes.dec2 << ' ' << m.sizes.hinit
     << "\n";
}

ModelConfig read_model_config(TextReader& r) {
  r.expect("model-config");
  ModelConfig m;
  auto kv = [&](const char* key) {
    auto t = r.tokens();
    if (t.size() < 2 || t[0] != key) r.fail(std::string("expected ") + key);
    return t;
  };
  m.joints = std::stoi(kv("joints")[1]);
  m.terrain_aware = std::stoi(kv("terrain-aware")[1]) != 0;
  m.residual_output = std::stoi(kv("residual-output")[1]) != 0;
  m.future_conditioning = std::stoi(kv("future-conditioning")[1]) != 0;
  m.hidden_init = hidden_init_from_string(kv("hidden-init")[1]);
  m.variant = variant_from_string(kv("variant")[1]);
  m.transition = std::stoi(kv("transition")[1]);
  m.lrelu_slope = std::stod(kv("lrelu-slope")[1]);
  auto t = kv("sizes");
  if (t.size() != 9) r.fail("sizes needs 8 entries");
  m.sizes.enc1 = std::stoi(t[1]);
  m.sizes.enc2 = std::stoi(t[2]);
  m.sizes.tgt = std::stoi(t[3]);
  m.sizes.off = std::stoi(t[4]);
  m.sizes.lstm = std::stoi(t[5]);
  m.sizes.dec1 = std::stoi(t[6]);
  m.sizes.dec2 = std::stoi(t[7]);
  m.sizes.hinit = std::stoi(t[8]);
  return m;
}

void write_train_config(std::ostream& os, const TrainConfig& c) {
  os << "train-config\n";
  os << "batch-size " << c.batch_size << "\n";
  os << "lr " << fmt17(c.lr) << "\n";
  os << "beta1 " << fmt17(c.beta1) << "\n";
  os << "beta2 " << fmt17(c.beta2) << "\n";
  os << "eps " << fmt17(c.eps) << "\n";
  os << "teacher " << to_string(c.teacher) << "\n";
  os << "teacher-p " << fmt17(c.teacher_p) << "\n";
  os << "ac-windows " << c.gt_window << ' ' << c.pred_window << "\n";
  os << "epochs " << c.epochs << "\n";
  os << "seed " << c.seed << "\n";
  os << "augment-rotation " << (c.augment_rotation ? 1 : 0) << "\n";
}

TrainConfig read_train_config(TextReader& r) {
  r.expect("train-config");
  TrainConfig c;
  auto kv = [&](const char* key) {
    auto t = r.tokens();
    if (t.size() < 2 || t[0] != key) r.fail(std::string("expected ") + key);
    return t;
  };
  c.batch_size = std::stoi(kv("batch-size")[1]);
  c.lr = std::stod(kv("lr")[1]);
  c.beta1 = std::stod(kv("beta1")[1]);
  c.beta2 = std::stod(kv("beta2")[1]);
  c.eps = std::stod(kv("eps")[1]);
  c.teacher = teacher_mode_from_string(kv("teacher")[1]);
  c.teacher_p = std::stod(kv("teacher-p")[1]);
  auto t = kv("ac-windows");
  if (t.size() != 3) r.fail("ac-windows needs 2 entries");
  c.gt_window = std::stoi(t[1]);
  c.pred_window = std::stoi(t[2]);
  c.epochs = std::stoi(kv("epochs")[1]);
  c.seed = std::stoull(kv("seed")[1]);
  c.augment_rotation = std::stoi(kv("augment-rotation")[1]) != 0;
  return c;
}

void write_stream_stats(std::ostream& os, const char* name, const StreamStats& s) {
  os << "stream " << name << ' ' << s.dim() << "\n";
  write_row(os, s.mu);
  write_row(os, s.sigma);
}

StreamStats read_stream_stats(TextReader& r, const std::string& name) {
  auto t = r.tokens();
  if (t.size() != 3 || t[0] != "stream" || t[1] != name) r.fail("expected stream " + name);
  StreamStats s;
  const size_t d = std::stoul(t[2]);
  s.mu = r.reals(d);
  s.sigma = r.reals(d);
  return s;
}

}  // namespace

void save_checkpoint(const TrainState& st, const std::string& path) {
  auto os = open_out(path);
  os << "RTN-CHECKPOINT 1\n";
  os << "epochs-run " << st.epochs_run << "\n";
  os << "best-epoch " << st.report.best_epoch << "\n";
  os << "best-val-mse " << fmt17(st.report.best_val_mse) << "\n";
  os << "skipped-steps " << st.report.skipped_steps << "\n";
  write_model_config(os, st.model);
  write_train_config(os, st.train);
  os << "stats\n";
  write_stream_stats(os, "x", st.stats.x);
  write_stream_stats(os, "tvel", st.stats.tvel);
  write_stream_stats(os, "offset", st.stats.offset);
  os << "patch " << (st.stats.patch.empty() ? 0 : 1) << "\n";
  if (!st.stats.patch.empty()) write_stream_stats(os, "patch", st.stats.patch);
  os << "rng-shuffle " << st.rng_shuffle << "\n";
  os << "rng-augment " << st.rng_augment << "\n";
  os << "rng-teacher " << st.rng_teacher << "\n";
  os << "report-rows " << st.report.rows.size() << "\n";
  for (const auto& row : st.report.rows)
    os << row.epoch << ' ' << (std::isnan(row.train_loss) ? "-" : fmt17(row.train_loss)) << ' '
       << fmt17(row.val_mse) << ' ' << fmt17(row.val_aco) << "\n";
  os << "params " << st.params.count() << "\n";
  for (int i = 0; i < st.params.count(); ++i) {
    const auto& e = st.params.entry(i);
    os << "param " << e.name << ' ' << e.value.rows << ' ' << e.value.cols << "\n";
    write_tensor(os, e.value);
    write_tensor(os, e.m);
    write_tensor(os, e.v);
    write_tensor(os, e.vhat);
  }
  os << "best-params " << st.best_values.size() << "\n";
  for (const auto& t : st.best_values) write_tensor(os, t);
}

TrainState load_checkpoint(const std::string& path) {
  auto is = open_in(path);
  TextReader r(is, path);
  r.expect("RTN-CHECKPOINT 1");
  TrainState st;
  auto kv = [&](const char* key) {
    auto t = r.tokens();
    if (t.size() < 2 || t[0] != key) r.fail(std::string("expected ") + key);
    return t;
  };
  st.epochs_run = std::stoi(kv("epochs-run")[1]);
  st.report.best_epoch = std::stoi(kv("best-epoch")[1]);
  st.report.best_val_mse = std::stod(kv("best-val-mse")[1]);
  st.report.skipped_steps = std::stoi(kv("skipped-steps")[1]);
  st.model = read_model_config(r);
  st.train = read_train_config(r);
  r.expect("stats");
  st.stats.x = read_stream_stats(r, "x");
  st.stats.tvel = read_stream_stats(r, "tvel");
  st.stats.offset = read_stream_stats(r, "offset");
  auto t = r.tokens();
  if (t.size() != 2 || t[0] != "patch") r.fail("expected patch flag");
  if (std::stoi(t[1]) == 1) st.stats.patch = read_stream_stats(r, "patch");
  auto rng_line = [&](const char* key, std::mt19937_64& engine) {
    std::string line = r.line();
    const std::string prefix = std::string(key) + " ";
    if (line.rfind(prefix, 0) != 0) r.fail(std::string("expected ") + key);
    std::istringstream ss(line.substr(prefix.size()));
    ss >> engine;
    if (!ss) r.fail(std::string("bad rng state for ") + key);
  };
  rng_line("rng-shuffle", st.rng_shuffle);
  rng_line("rng-augment", st.rng_augment);
  rng_line("rng-teacher", st.rng_teacher);
  t = kv("report-rows");
  const int nrows = std::stoi(t[1]);
  for (int i = 0; i < nrows; ++i) {
    auto row_t = r.tokens();
    if (row_t.size() != 4) r.fail("bad report row");
    TrainReport::Row row;
    row.epoch = std::stoi(row_t[0]);
    row.train_loss =
        row_t[1] == "-" ? std::numeric_limits<double>::quiet_NaN() : std::stod(row_t[1]);
    row.val_mse = std::stod(row_t[2]);
    row.val_aco = std::stod(row_t[3]);
    st.report.rows.push_back(row);
  }
  t = kv("params");
  const int np = std::stoi(t[1]);
  for (int i = 0; i < np; ++i) {
    auto pt = r.tokens();
    if (pt.size() != 4 || pt[0] != "param") r.fail("expected param header");
    const int rows = std::stoi(pt[2]), cols = std::stoi(pt[3]);
    const int idx = st.params.add(pt[1], read_tensor(r, rows, cols));
    auto& e = st.params.entry(idx);
    e.m = read_tensor(r, rows, cols);
    e.v = read_tensor(r, rows, cols);
    e.vhat = read_tensor(r, rows, cols);
  }
  t = kv("best-params");
  const int nb = std::stoi(t[1]);
  if (nb != 0 && nb != st.params.count()) r.fail("best-params count mismatch");
  for (int i = 0; i < nb; ++i) {
    const auto& shape = st.params.entry(i).value;
    st.best_values.push_back(read_tensor(r, shape.rows, shape.cols));
  }
  st.model.validate();
  st.train.validate();
  st.stats.validate(st.model.joints);
  return st;
}

void save_report(const TrainReport& report, const std::string& path, uint64_t seed) {
  auto os = open_out(path);
  os << "RTN-REPORT 1\n";
  os << "seed " << seed << "\n";
  os << "best-epoch " << report.best_epoch << "\n";
  os << "best-val-mse " << fmt17(report.best_val_mse) << "\n";
  os << "skipped-steps " << report.skipped_steps << "\n";
  os << "columns epoch train-loss val-mse val-aco\n";
  for (const auto& row : report.rows)
    os << row.epoch << '\t' << (std::isnan(row.train_loss) ? "-" : fmt17(row.train_loss)) << '\t'
       << fmt17(row.val_mse) << '\t' << fmt17(row.val_aco) << "\n";
}

}  // namespace rtn
