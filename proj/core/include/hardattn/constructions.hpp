#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "hardattn/linalg.hpp"
#include "hardattn/model.hpp"

namespace hardattn {

/// Which hand-built network to emit, and its sharpness constant c > 0.
struct ConstructionSpec {
  enum class Kind { Parity, First, FlawedFirst, RumelhartFfnn };

  Kind kind = Kind::Parity;
  double c = 1.0;
  /// String length; required for RumelhartFfnn and forbidden otherwise.
  std::optional<std::size_t> n_fixed;

  void validate() const;
};

/// Exact PARITY recognizer: d = 9, two layers, two heads per layer, no layer norm.
///
/// Dimensions (0-based): 0..2 one-hot of {0, 1, CLS}; 3 = i/n; 4 = cos(i pi);
/// 5 = k/n and 6 = 1/n (uniform average in layer 1); 7 = 1[i = k]/n from the
/// first FFNN's triangular bump; 8 = the logit s, written by layer 2's two heads
/// which attend with weights exp(-/+ c cos(i pi)) from CLS.
ModelParams build_parity(double c = 1.0);

/// Exact FIRST recognizer: d = 6, two layers, one head per layer. The CLS
/// logit is exp(c)/(exp(c)+n-1) * (1[w_1 = 1] - 1/2).
ModelParams build_first(double c = 1.0);

/// Single-layer FIRST variant that does not zero out the values of positions
/// other than 1: d = 5, L = 1, H = 1. Fails for c <= ln(n-1) under standard
/// attention; log-length attention with c = 1 repairs it.
ModelParams build_flawed_first(double c = 1.0);

ModelParams build_transformer(const ConstructionSpec& spec);

/// Doubles the width so every vector x is carried as (x, -x). All pre-norm
/// vectors then have zero mean and layer normalization only rescales. The
/// input must have no normalization; the result uses `norm`.
ModelParams negation_wrap(const ModelParams& params, const NormMode& norm);

/// Output scale whose +/- sqrt(d/2) logits give cross-entropy eta nats.
double amplifier_output_scale(double eta, std::size_t width);

/// Appends a layer whose FFNN cancels the residual stream except for (s, -s)
/// in dims 0 and 1, where s is the original logit, then reads dim 0 with
/// weight `scale`. Under exact normalization (eps = 0) the new logit is
/// +/- scale * sqrt(d/2) regardless of |s|.
ModelParams amplifier_append_scaled(const ModelParams& params, double scale);

/// amplifier_append_scaled with the scale chosen so that the per-string
/// cross-entropy is exactly eta nats (requires eps = 0 for exactness).
ModelParams amplifier_append(const ModelParams& params, double eta);

/// Replaces each normalization step by multiplication with a positive constant,
/// ordered (C_1, A_1, C_2, A_2, ...). The input must have no normalization.
ModelParams scale_activations(const ModelParams& params, std::span<const double> scales);

/// Two-layer step-activation FFNN computing PARITY of strings of one fixed length.
class RumelhartNetwork {
 public:
  explicit RumelhartNetwork(std::size_t length);

  std::size_t length() const noexcept { return length_; }
  const Matrix& hidden_weights() const noexcept { return w1_; }
  const Vector& hidden_bias() const noexcept { return b1_; }
  const Matrix& output_weights() const noexcept { return w2_; }
  double output_bias() const noexcept { return b2_; }

  /// Returns 1 iff w has an odd number of ones. Throws unless |w| == length().
  int operator()(std::span<const std::uint8_t> w) const;

 private:
  std::size_t length_;
  Matrix w1_;
  Vector b1_;
  Matrix w2_;
  double b2_;
};

/// Builds the network for n = |w| and evaluates it. Throws on empty input.
int rumelhart_forward(std::span<const std::uint8_t> w);

}  // namespace hardattn
