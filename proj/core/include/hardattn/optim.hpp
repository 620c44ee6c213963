#pragma once

#include <cstdint>
#include <vector>

#include "hardattn/backward.hpp"
#include "hardattn/model.hpp"

namespace hardattn {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Moment accumulators, flattened in for_each_tensor order.
struct OptimizerState {
  AdamConfig config;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step = 0;

  static OptimizerState for_model(const ModelParams& params, AdamConfig config = {});
};

/// One bias-corrected Adam update of `params` in place. Throws NumericError,
/// naming the tensor, if any gradient entry is not finite; params and state are
/// left untouched in that case.
void adam_step(OptimizerState& state, ModelParams& params, const Gradients& grads);

}  // namespace hardattn
