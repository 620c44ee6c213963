#include "hardattn/optim.hpp"

#include <cmath>
#include <string>

#include "hardattn/error.hpp"

namespace hardattn {

namespace {

std::size_t parameter_count(const ModelParams& params) {
  std::size_t count = 0;
  for_each_tensor(params, [&](const std::string&, std::span<const double> v) { count += v.size(); });
  return count;
}

}  // namespace

OptimizerState OptimizerState::for_model(const ModelParams& params, AdamConfig config) {
  const std::size_t count = parameter_count(params);
  return {config, std::vector<double>(count, 0.0), std::vector<double>(count, 0.0), 0};
}

void adam_step(OptimizerState& state, ModelParams& params, const Gradients& grads) {
  std::vector<std::span<const double>> g;
  std::vector<std::string> names;
  for_each_tensor(grads.tensors, [&](const std::string& name, std::span<const double> v) {
    names.push_back(name);
    g.push_back(v);
  });
  std::vector<std::span<double>> p;
  for_each_tensor(params, [&](const std::string&, std::span<double> v) { p.push_back(v); });

  if (p.size() != g.size()) throw DimensionError("adam_step: gradient tree does not match model");
  std::size_t total = 0;
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (p[t].size() != g[t].size()) {
      throw DimensionError("adam_step: tensor " + names[t] + " has mismatched size");
    }
    for (std::size_t e = 0; e < g[t].size(); ++e) {
      if (!std::isfinite(g[t][e])) {
        throw NumericError("adam_step: non-finite gradient in " + names[t] + "[" +
                           std::to_string(e) + "] at step " + std::to_string(state.step + 1));
      }
    }
    total += p[t].size();
  }
  if (total != state.first_moment.size() || total != state.second_moment.size()) {
    throw DimensionError("adam_step: optimizer state does not match model");
  }

  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t e = 0; e < p[i].size(); ++e, ++k) {
      const double gk = g[i][e];
      double& m = state.first_moment[k];
      double& v = state.second_moment[k];
      m = c.beta1 * m + (1.0 - c.beta1) * gk;
      v = c.beta2 * v + (1.0 - c.beta2) * gk * gk;
      const double m_hat = m / correction1;
      const double v_hat = v / correction2;
      p[i][e] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }
  }
}

}  // namespace hardattn
