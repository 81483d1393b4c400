#include "rtn/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace rtn {

bool amsgrad_step(ParamStore& params, const GradMap& grads, const AmsgradConfig& cfg) {
  for (int i = 0; i < params.count(); ++i) {
    auto it = grads.find(params.entry(i).name);
    if (it == grads.end())
      throw std::invalid_argument("amsgrad_step: missing gradient for " + params.entry(i).name);
    if (!it->second.same_shape(params.entry(i).value))
      throw std::invalid_argument("amsgrad_step: gradient shape mismatch for " + params.entry(i).name);
    if (!it->second.all_finite()) return false;
  }
  for (int i = 0; i < params.count(); ++i) {
    auto& e = params.entry(i);
    const Tensor2& g = grads.at(e.name);
    for (size_t k = 0; k < g.data.size(); ++k) {
      const double gv = g.data[k];
      e.m.data[k] = cfg.beta1 * e.m.data[k] + (1.0 - cfg.beta1) * gv;
      e.v.data[k] = cfg.beta2 * e.v.data[k] + (1.0 - cfg.beta2) * gv * gv;
      if (e.v.data[k] > e.vhat.data[k]) e.vhat.data[k] = e.v.data[k];
      e.value.data[k] -= cfg.lr * e.m.data[k] / (std::sqrt(e.vhat.data[k]) + cfg.eps);
    }
  }
  return true;
}

}  // namespace rtn
