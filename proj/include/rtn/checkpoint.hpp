#pragma once

#include <string>

#include "rtn/training.hpp"

namespace rtn {

// Versioned text container: model + train config, normalization stats, rng
// states, current parameters with optimizer slots, and the best-epoch values.
// Identical runs write byte-identical files; a loaded state resumes training
// bit-compatibly.
void save_checkpoint(const TrainState& st, const std::string& path);
TrainState load_checkpoint(const std::string& path);

void save_report(const TrainReport& report, const std::string& path, uint64_t seed);

}  // namespace rtn
