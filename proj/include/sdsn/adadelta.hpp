// AdaDelta (Zeiler 2012) over the model's tensor views:
//   E[g2]  <- rho E[g2] + (1-rho) g2
//   delta  = -sqrt(E[dx2] + eps) / sqrt(E[g2] + eps) * g
//   E[dx2] <- rho E[dx2] + (1-rho) delta2
//   theta  <- theta + lr * delta
#pragma once

#include <cmath>

#include "sdsn/model.hpp"

namespace sdsn {

struct AdaDeltaState {
  ModelParams sq_grad;    // E[g^2]
  ModelParams sq_update;  // E[dx^2]

  explicit AdaDeltaState(const ModelParams& shape)
      : sq_grad(zeros_like(shape)), sq_update(zeros_like(shape)) {}
};

inline void adadelta_step(ModelParams& params, ModelParams& grads,
                          AdaDeltaState& state, double lr, double rho,
                          double eps) {
  auto pv = tensor_views(params);
  auto gv = tensor_views(grads);
  auto egv = tensor_views(state.sq_grad);
  auto exv = tensor_views(state.sq_update);
  for (std::size_t k = 0; k < pv.size(); ++k) {
    double* theta = pv[k].data;
    const double* g = gv[k].data;
    double* eg = egv[k].data;
    double* ex = exv[k].data;
    for (std::size_t i = 0; i < pv[k].size; ++i) {
      eg[i] = rho * eg[i] + (1.0 - rho) * g[i] * g[i];
      const double dx = -std::sqrt(ex[i] + eps) / std::sqrt(eg[i] + eps) * g[i];
      ex[i] = rho * ex[i] + (1.0 - rho) * dx * dx;
      theta[i] += lr * dx;
    }
  }
}

}  // namespace sdsn
