#pragma once

#include "rtn/param_store.hpp"

namespace rtn {

struct AmsgradConfig {
  double lr = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One AMSGrad update over every parameter:
//   m <- b1*m + (1-b1)*g,  v <- b2*v + (1-b2)*g^2,  vhat <- max(vhat, v),
//   theta <- theta - lr * m / (sqrt(vhat) + eps).
// Returns false (and applies nothing) when any gradient entry is non-finite.
bool amsgrad_step(ParamStore& params, const GradMap& grads, const AmsgradConfig& cfg);

}  // namespace rtn
