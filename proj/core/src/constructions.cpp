#include "hardattn/constructions.hpp"

#include <cmath>
#include <string>

#include "hardattn/error.hpp"

namespace hardattn {

namespace {

void require_positive_c(double c, const char* who) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InvalidArgument(std::string(who) + ": c must be a positive finite constant");
  }
}

Vector unit(std::size_t d, std::size_t k) {
  Vector v(d, 0.0);
  v[k] = 1.0;
  return v;
}

ModelParams blank_model(std::size_t d, PositionalEncoding::Family pe) {
  ModelParams p;
  p.width = d;
  p.word_embeddings = {unit(d, 0), unit(d, 1), unit(d, 2)};
  p.positional.family = pe;
  p.output_weights.assign(d, 0.0);
  return p;
}

}  // namespace

void ConstructionSpec::validate() const {
  require_positive_c(c, "ConstructionSpec");
  const bool wants_n = kind == Kind::RumelhartFfnn;
  if (wants_n != n_fixed.has_value()) {
    throw InvalidArgument("ConstructionSpec: n_fixed is required iff kind is RumelhartFfnn");
  }
  if (wants_n && *n_fixed == 0) throw InvalidArgument("ConstructionSpec: n_fixed must be >= 1");
}

ModelParams build_parity(double c) {
  require_positive_c(c, "build_parity");
  constexpr std::size_t d = 9;
  ModelParams p = blank_model(d, PositionalEncoding::Family::Parity);
  const double q = c * std::sqrt(static_cast<double>(d));

  // Layer 1: head 1 averages to k/n (dim 5) and 1/n (dim 6); head 2 is inert.
  LayerParams l1 = LayerParams::zeros(d, 2, 3);
  l1.heads[0].value(5, 1) = 1.0;
  l1.heads[0].value(6, 2) = 1.0;
  // (k - i - 1)/n, (k - i)/n, (k - i + 1)/n before ReLU.
  for (std::size_t r = 0; r < 3; ++r) {
    l1.ffn_in(r, 3) = -1.0;
    l1.ffn_in(r, 5) = 1.0;
  }
  l1.ffn_in(0, 6) = -1.0;
  l1.ffn_in(2, 6) = 1.0;
  l1.ffn_out(7, 0) = 1.0;
  l1.ffn_out(7, 1) = -2.0;
  l1.ffn_out(7, 2) = 1.0;

  // Layer 2: CLS attends to odd (head 1) or even (head 2) positions; both read dim 7.
  LayerParams l2 = LayerParams::zeros(d, 2, 1);
  l2.heads[0].query(0, 2) = q;
  l2.heads[0].key(0, 4) = -1.0;
  l2.heads[0].value(8, 7) = 1.0;
  l2.heads[1].query(0, 2) = q;
  l2.heads[1].key(0, 4) = 1.0;
  l2.heads[1].value(8, 7) = -1.0;

  p.layers = {std::move(l1), std::move(l2)};
  p.output_weights[8] = 1.0;
  return p;
}

ModelParams build_first(double c) {
  require_positive_c(c, "build_first");
  constexpr std::size_t d = 6;
  ModelParams p = blank_model(d, PositionalEncoding::Family::First);

  LayerParams l1 = LayerParams::zeros(d, 1, 1);
  // relu(-1[w=0] - 1[CLS] + 1[i=1]) = 1[w_1 = 1 and i = 1], without a bias term.
  l1.ffn_in(0, 0) = -1.0;
  l1.ffn_in(0, 2) = -1.0;
  l1.ffn_in(0, 3) = 1.0;
  l1.ffn_out(4, 0) = 1.0;

  LayerParams l2 = LayerParams::zeros(d, 1, 1);
  l2.heads[0].query(0, 2) = c * std::sqrt(static_cast<double>(d));
  l2.heads[0].key(0, 3) = 1.0;
  l2.heads[0].value(5, 3) = -0.5;
  l2.heads[0].value(5, 4) = 1.0;

  p.layers = {std::move(l1), std::move(l2)};
  p.output_weights[5] = 1.0;
  return p;
}

ModelParams build_flawed_first(double c) {
  require_positive_c(c, "build_flawed_first");
  constexpr std::size_t d = 5;
  ModelParams p = blank_model(d, PositionalEncoding::Family::First);

  LayerParams l1 = LayerParams::zeros(d, 1, 1);
  l1.heads[0].query(0, 2) = c * std::sqrt(static_cast<double>(d));
  l1.heads[0].key(0, 3) = 1.0;
  l1.heads[0].value(4, 0) = -0.5;
  l1.heads[0].value(4, 1) = 0.5;
  l1.heads[0].value(4, 2) = -0.5;

  p.layers = {std::move(l1)};
  p.output_weights[4] = 1.0;
  return p;
}

ModelParams build_transformer(const ConstructionSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case ConstructionSpec::Kind::Parity:
      return build_parity(spec.c);
    case ConstructionSpec::Kind::First:
      return build_first(spec.c);
    case ConstructionSpec::Kind::FlawedFirst:
      return build_flawed_first(spec.c);
    case ConstructionSpec::Kind::RumelhartFfnn:
      break;
  }
  throw InvalidArgument("build_transformer: the Rumelhart FFNN is not a transformer");
}

ModelParams negation_wrap(const ModelParams& params, const NormMode& norm) {
  params.validate();
  if (!params.norm.is_none()) {
    throw InvalidArgument("negation_wrap: input model must not use layer normalization");
  }
  if (params.positional.mirror_offset != 0) {
    throw InvalidArgument("negation_wrap: model is already wrapped");
  }
  const std::size_t d = params.width;
  const std::size_t w = 2 * d;

  ModelParams out;
  out.width = w;
  for (std::size_t t = 0; t < kAlphabetSize; ++t) {
    Vector e(w, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      e[k] = params.word_embeddings[t][k];
      e[d + k] = -params.word_embeddings[t][k];
    }
    out.word_embeddings[t] = std::move(e);
  }
  out.positional = {params.positional.family, d};

  for (const LayerParams& layer : params.layers) {
    const std::size_t ff = layer.ffn_width();
    LayerParams wl = LayerParams::zeros(w, layer.heads.size(), ff);
    for (std::size_t h = 0; h < layer.heads.size(); ++h) {
      const HeadParams& src = layer.heads[h];
      HeadParams& dst = wl.heads[h];
      // [Q 0], [K 0] padded with zero rows; V becomes [[V 0], [-V 0]].
      for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
          dst.query(r, c) = src.query(r, c);
          dst.key(r, c) = src.key(r, c);
          dst.value(r, c) = src.value(r, c);
          dst.value(d + r, c) = -src.value(r, c);
        }
      }
    }
    for (std::size_t r = 0; r < ff; ++r) {
      for (std::size_t c = 0; c < d; ++c) wl.ffn_in(r, c) = layer.ffn_in(r, c);
      wl.ffn_in_bias[r] = layer.ffn_in_bias[r];
    }
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < ff; ++c) {
        wl.ffn_out(r, c) = layer.ffn_out(r, c);
        wl.ffn_out(d + r, c) = -layer.ffn_out(r, c);
      }
      wl.ffn_out_bias[r] = layer.ffn_out_bias[r];
      wl.ffn_out_bias[d + r] = -layer.ffn_out_bias[r];
    }
    out.layers.push_back(std::move(wl));
  }

  out.output_weights.assign(w, 0.0);
  for (std::size_t k = 0; k < d; ++k) out.output_weights[k] = params.output_weights[k];
  out.output_bias = params.output_bias;
  out.norm = norm;
  out.scaling = params.scaling;
  out.sublayer_scales = params.sublayer_scales;
  return out;
}

double amplifier_output_scale(double eta, std::size_t width) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw InvalidArgument("amplifier: eta must be a positive finite number of nats");
  }
  return -std::log(std::expm1(eta)) / std::sqrt(static_cast<double>(width) / 2.0);
}

ModelParams amplifier_append_scaled(const ModelParams& params, double scale) {
  params.validate();
  if (params.norm.is_none()) {
    throw InvalidArgument("amplifier_append: input model must use layer normalization");
  }
  const std::size_t d = params.width;
  if (d < 2) throw InvalidArgument("amplifier_append: width must be at least 2");

  LayerParams amp = LayerParams::zeros(d, 1, 2 * d);
  // Hidden layer carries relu(x) and relu(-x).
  for (std::size_t k = 0; k < d; ++k) {
    amp.ffn_in(k, k) = 1.0;
    amp.ffn_in(d + k, k) = -1.0;
  }
  // -relu(x) + relu(-x) = -x cancels the residual; rows 0 and 1 add back +/- W x.
  for (std::size_t k = 0; k < d; ++k) {
    amp.ffn_out(k, k) = -1.0;
    amp.ffn_out(k, d + k) = 1.0;
  }
  for (std::size_t k = 0; k < d; ++k) {
    const double wk = params.output_weights[k];
    amp.ffn_out(0, k) += wk;
    amp.ffn_out(0, d + k) -= wk;
    amp.ffn_out(1, k) -= wk;
    amp.ffn_out(1, d + k) += wk;
  }
  amp.ffn_out_bias[0] = params.output_bias;
  amp.ffn_out_bias[1] = -params.output_bias;

  ModelParams out = params;
  out.layers.push_back(std::move(amp));
  if (!out.sublayer_scales.empty()) {
    out.sublayer_scales.push_back(1.0);
    out.sublayer_scales.push_back(1.0);
  }
  out.output_weights.assign(d, 0.0);
  out.output_weights[0] = scale;
  out.output_bias = 0.0;
  return out;
}

ModelParams amplifier_append(const ModelParams& params, double eta) {
  const double scale = amplifier_output_scale(eta, params.width);
  return amplifier_append_scaled(params, scale);
}

ModelParams scale_activations(const ModelParams& params, std::span<const double> scales) {
  params.validate();
  if (!params.norm.is_none()) {
    throw InvalidArgument("scale_activations: input model must not use layer normalization");
  }
  if (scales.size() != 2 * params.layers.size()) {
    throw DimensionError("scale_activations: need one scale per sublayer (2L values)");
  }
  for (double s : scales) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw InvalidArgument("scale_activations: scales must be positive and finite");
    }
  }
  ModelParams out = params;
  out.sublayer_scales.assign(scales.begin(), scales.end());
  return out;
}

RumelhartNetwork::RumelhartNetwork(std::size_t length)
    : length_(length), w1_(length == 0 ? 1 : length, length == 0 ? 1 : length, 1.0),
      b1_(length), w2_(1, length == 0 ? 1 : length), b2_(-0.5) {
  if (length == 0) throw InvalidArgument("RumelhartNetwork: length must be at least 1");
  for (std::size_t j = 0; j < length; ++j) {
    b1_[j] = -(static_cast<double>(j) + 0.5);
    w2_(0, j) = j % 2 == 0 ? 1.0 : -1.0;
  }
}

int RumelhartNetwork::operator()(std::span<const std::uint8_t> w) const {
  if (w.size() != length_) {
    throw DimensionError("RumelhartNetwork: expected a string of length " +
                         std::to_string(length_));
  }
  auto step = [](double x) { return x > 0.0 ? 1.0 : 0.0; };
  Vector x(w.begin(), w.end());
  Vector h = matvec(w1_, x);
  for (std::size_t j = 0; j < h.size(); ++j) h[j] = step(h[j] + b1_[j]);
  return static_cast<int>(step(matvec(w2_, h)[0] + b2_));
}

int rumelhart_forward(std::span<const std::uint8_t> w) {
  if (w.empty()) throw InvalidArgument("rumelhart_forward: empty input");
  return RumelhartNetwork(w.size())(w);
}

}  // namespace hardattn
