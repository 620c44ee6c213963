#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hardattn/model.hpp"

namespace hardattn {

/// Gradients share the shape tree of the model they were computed for: word
/// embeddings, every head's Q/K/V, FFNN weights and biases, and the read-out.
/// Flags (norm mode, scaling, positional family) are copied but carry no meaning.
struct Gradients {
  ModelParams tensors;

  static Gradients zeros_like(const ModelParams& params);
};

/// Visits every trainable tensor of a model in a fixed order, passing a stable
/// name ("layer1.head2.query", "output.bias", ...) and a view of its values.
/// The positional encoding is fixed and not visited.
template <typename Params, typename Fn>
void for_each_tensor(Params& params, Fn&& fn) {
  static constexpr const char* kTokenNames[] = {"zero", "one", "cls"};
  for (std::size_t t = 0; t < kAlphabetSize; ++t) {
    fn(std::string("embedding.") + kTokenNames[t], std::span(params.word_embeddings[t]));
  }
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto& layer = params.layers[l];
    const std::string prefix = "layer" + std::to_string(l + 1) + ".";
    for (std::size_t h = 0; h < layer.heads.size(); ++h) {
      const std::string hp = prefix + "head" + std::to_string(h + 1) + ".";
      fn(hp + "query", layer.heads[h].query.data());
      fn(hp + "key", layer.heads[h].key.data());
      fn(hp + "value", layer.heads[h].value.data());
    }
    fn(prefix + "ffn_in", layer.ffn_in.data());
    fn(prefix + "ffn_in_bias", std::span(layer.ffn_in_bias));
    fn(prefix + "ffn_out", layer.ffn_out.data());
    fn(prefix + "ffn_out_bias", std::span(layer.ffn_out_bias));
  }
  fn(std::string("output.weights"), std::span(params.output_weights));
  fn(std::string("output.bias"), std::span(&params.output_bias, 1));
}

struct BackwardResult {
  double loss;  // binary cross-entropy in nats
  double logit;
  Gradients grads;
};

/// Exact reverse-mode gradients of the binary cross-entropy of one labeled
/// sequence through the whole encoder (attention softmax, layer normalization,
/// ReLU FFNNs, sigmoid read-out).
///
/// Exact normalization (eps = 0) is not differentiable everywhere and is
/// rejected, as are models with sublayer_scales.
BackwardResult backward(const ModelParams& params, const TokenSeq& seq, bool label);

/// Binary cross-entropy in nats from a plain forward pass.
double loss_nats(const ModelParams& params, const TokenSeq& seq, bool label);

struct TensorCheck {
  std::string name;
  std::size_t entries = 0;
  double max_rel_error = 0.0;
  double max_abs_grad = 0.0;
  std::size_t kinks = 0;  // entries left out: the probe crossed a ReLU boundary
  bool passed = true;
};

struct GradCheckReport {
  std::vector<TensorCheck> tensors;
  bool passed = true;
  double max_rel_error = 0.0;
  std::size_t kinks = 0;
};

/// Compares `analytic` against central differences of loss_nats with step h.
/// An entry passes when its relative error is below rel_tol, or below
/// small_grad_rel_tol when both gradients are smaller than small_grad.
/// Entries whose +h or -h probe changes which FFN units are active are not
/// differentiable on that interval; they are counted in `kinks` and skipped.
GradCheckReport check_gradients(const ModelParams& params, const TokenSeq& seq, bool label,
                                const Gradients& analytic, double h = 1e-5,
                                double rel_tol = 1e-4, double small_grad = 1e-8,
                                double small_grad_rel_tol = 1e-3);

}  // namespace hardattn
