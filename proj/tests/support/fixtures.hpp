#pragma once

#include <cstdint>
#include <vector>

#include "hardattn/data.hpp"
#include "hardattn/model.hpp"
#include "hardattn/rng.hpp"

namespace fixtures {

/// Every bit string of length len, in lexicographic order.
inline std::vector<hardattn::Bits> all_strings(std::size_t len) {
  std::vector<hardattn::Bits> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << len); ++m) {
    hardattn::Bits b(len);
    for (std::size_t i = 0; i < len; ++i) b[i] = (m >> (len - 1 - i)) & 1u;
    out.push_back(std::move(b));
  }
  return out;
}

/// Dense random model with every weight uniform in [-scale, scale].
inline hardattn::ModelParams random_model(std::uint64_t seed, std::size_t d, std::size_t layers,
                                          std::size_t heads, std::size_t ff,
                                          hardattn::NormMode norm, hardattn::AttnScaling scaling,
                                          double scale = 0.5) {
  hardattn::RngStream rng(seed);
  auto fill = [&](std::span<double> v) {
    for (double& x : v) x = rng.uniform(-scale, scale);
  };
  hardattn::ModelParams p;
  p.width = d;
  p.norm = norm;
  p.scaling = scaling;
  p.positional.family = d >= 5 ? hardattn::PositionalEncoding::Family::Parity
                               : hardattn::PositionalEncoding::Family::Zero;
  for (auto& e : p.word_embeddings) {
    e.assign(d, 0.0);
    fill(e);
  }
  for (std::size_t l = 0; l < layers; ++l) {
    auto layer = hardattn::LayerParams::zeros(d, heads, ff);
    for (auto& h : layer.heads) {
      fill(h.query.data());
      fill(h.key.data());
      fill(h.value.data());
    }
    fill(layer.ffn_in.data());
    fill(layer.ffn_in_bias);
    fill(layer.ffn_out.data());
    fill(layer.ffn_out_bias);
    p.layers.push_back(std::move(layer));
  }
  p.output_weights.assign(d, 0.0);
  fill(p.output_weights);
  p.output_bias = rng.uniform(-scale, scale);
  return p;
}

}  // namespace fixtures
