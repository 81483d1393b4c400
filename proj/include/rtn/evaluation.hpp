#pragma once

#include <map>
#include <string>
#include <vector>

#include "rtn/baseline.hpp"
#include "rtn/metrics.hpp"
#include "rtn/training.hpp"

namespace rtn {

// Published reference numbers, embedded for documentation and report-format
// regression only; they come from a proprietary corpus and are never used as
// oracles for synthetic-data runs.
namespace paper_reference {
struct MethodRow {
  const char* name;
  double mse, aco;
};
inline constexpr MethodRow kComparison[] = {
    {"int", 0.210, 6.726},
    {"f-reslstm", 0.144, 7.709},
    {"f-erd", 0.092, 4.770},
    {"rtn", 0.087, 4.751},
};
struct AblationRow {
  const char* name;
  double mse;
};
inline constexpr AblationRow kAblation[] = {
    {"no-future", 0.298}, {"ptf=sched", 0.151}, {"ptf=1.0", 0.147}, {"ptf=0.0", 0.109},
    {"no-resnet", 0.114}, {"h0", 0.095},        {"hcommon", 0.092}, {"full", 0.087},
};
inline constexpr double kTerrainMse[2][2] = {{0.086, 0.274},   // unaware: 30 / 60 frames
                                             {0.087, 0.268}};  // aware
}  // namespace paper_reference

struct EvalRow {
  std::string method;
  double mse = 0;                // normalized space, transition + target frame
  double aco = 0;                // centimeters, transition frames
  std::vector<double> profile;   // per-frame-index ACO curve, P entries
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::string to_table() const;                       // aligned text
  void save(const std::string& path) const;           // table + tsv rows
};

// Validation metrics of a trained model over windows (teacher off).
EvalRow evaluate_model(const std::string& method_name,
                       const std::vector<TransitionWindow>& windows, ParamStore& params,
                       const ModelConfig& cfg, const NormStats& stats, int batch_size = 32);

// INT requires no training; slerp when the windows carry rotations.
EvalRow evaluate_interpolation(const std::vector<TransitionWindow>& windows,
                               const NormStats& stats, IntMode mode);

// Table-2-style comparison: INT plus any subset of {rtn, f-erd, f-reslstm},
// each trained with the shared seed and split.
EvalReport run_comparison(const WindowSplit& data, const std::vector<std::string>& methods,
                          const ModelConfig& base_cfg, const TrainConfig& train_cfg);

// Table-4-style ablation: variants from {no-future, ptf=sched, ptf=1.0,
// ptf=0.0, no-resnet, h0, hcommon, full}, shared seed/splits.
EvalReport run_ablation(const WindowSplit& data, const std::vector<std::string>& variants,
                        const ModelConfig& base_cfg, const TrainConfig& train_cfg);

// Applies one named ablation/baseline wiring to the pair of configs.
void apply_variant(const std::string& name, ModelConfig& mcfg, TrainConfig& tcfg);

}  // namespace rtn
