// Per-example losses with their derivative w.r.t. the predicted score.
// Batch losses are sums over examples.
#pragma once

namespace sdsn {

struct LossGrad {
  double loss = 0.0;
  double dldy = 0.0;
};

inline LossGrad mse_loss(double predicted, double gold) {
  const double d = predicted - gold;
  return {d * d, 2.0 * d};
}

// Margin loss for binary pre-training pairs whose target is 0 or S. The
// loss is zero (with zero gradient) whenever |y - target| <= S/2 - R, so
// examples already on the correct side of the decision boundary leave the
// model untouched.
inline LossGrad hinge_loss(double predicted, double target, double max_score,
                           double margin) {
  const double d = predicted - target;
  const double band = max_score / 2.0 - margin;
  const double v = d * d - band * band;
  if (v > 0.0) return {v, 2.0 * d};
  return {0.0, 0.0};
}

}  // namespace sdsn
