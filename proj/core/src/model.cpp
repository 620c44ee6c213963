#include "hardattn/model.hpp"

#include <algorithm>
#include <cmath>

#include "hardattn/error.hpp"

namespace hardattn {

TokenSeq::TokenSeq(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_[0] != Token::Cls) {
    throw InvalidArgument("TokenSeq: position 0 must hold CLS");
  }
  for (std::size_t i = 1; i < tokens_.size(); ++i) {
    const auto t = static_cast<std::uint8_t>(tokens_[i]);
    if (t > 1) throw InvalidArgument("TokenSeq: only position 0 may hold CLS");
  }
}

TokenSeq TokenSeq::from_bits(std::span<const std::uint8_t> bits) {
  std::vector<Token> tokens;
  tokens.reserve(bits.size() + 1);
  tokens.push_back(Token::Cls);
  for (auto b : bits) {
    if (b > 1) throw InvalidArgument("TokenSeq::from_bits: symbol outside {0,1}");
    tokens.push_back(b ? Token::One : Token::Zero);
  }
  return TokenSeq(std::move(tokens));
}

TokenSeq TokenSeq::parse(std::string_view bits) {
  std::vector<Token> tokens;
  tokens.reserve(bits.size() + 1);
  tokens.push_back(Token::Cls);
  for (char ch : bits) {
    if (ch == '0') {
      tokens.push_back(Token::Zero);
    } else if (ch == '1') {
      tokens.push_back(Token::One);
    } else {
      throw InvalidArgument(std::string("TokenSeq::parse: unexpected character '") + ch + "'");
    }
  }
  return TokenSeq(std::move(tokens));
}

std::size_t TokenSeq::count_ones() const noexcept {
  return static_cast<std::size_t>(std::count(tokens_.begin(), tokens_.end(), Token::One));
}

Bits TokenSeq::bits() const {
  Bits out;
  out.reserve(tokens_.size() - 1);
  for (std::size_t i = 1; i < tokens_.size(); ++i) out.push_back(tokens_[i] == Token::One);
  return out;
}

std::string TokenSeq::to_string() const {
  std::string s;
  s.reserve(tokens_.size() - 1);
  for (std::size_t i = 1; i < tokens_.size(); ++i) s.push_back(tokens_[i] == Token::One ? '1' : '0');
  return s;
}

NormMode NormMode::layer_norm(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw InvalidArgument("NormMode: epsilon must be finite and nonnegative");
  }
  return {Kind::LayerNorm, eps};
}

HeadParams HeadParams::zeros(std::size_t width) {
  return {Matrix(width, width), Matrix(width, width), Matrix(width, width)};
}

LayerParams LayerParams::zeros(std::size_t width, std::size_t heads, std::size_t ffn_width) {
  LayerParams layer;
  layer.heads.assign(heads, HeadParams::zeros(width));
  layer.ffn_in = Matrix(ffn_width, width);
  layer.ffn_in_bias.assign(ffn_width, 0.0);
  layer.ffn_out = Matrix(width, ffn_width);
  layer.ffn_out_bias.assign(width, 0.0);
  return layer;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DimensionError("ModelParams: " + what);
}

void require_square(const Matrix& m, std::size_t d, const std::string& what) {
  require(m.rows() == d && m.cols() == d, what + " must be " + std::to_string(d) + "x" +
                                              std::to_string(d));
}

}  // namespace

void ModelParams::validate() const {
  const std::size_t d = width;
  require(d > 0, "width must be positive");
  for (const auto& e : word_embeddings) require(e.size() == d, "word embedding size != width");
  const std::size_t pe_dims = positional.family == PositionalEncoding::Family::Parity ? 5
                              : positional.family == PositionalEncoding::Family::First ? 4
                                                                                       : 0;
  require(pe_dims <= d, "positional encoding needs more dimensions than width");
  if (positional.mirror_offset != 0) {
    require(positional.mirror_offset >= pe_dims && positional.mirror_offset + pe_dims <= d,
            "positional mirror offset out of range");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    const std::string where = "layer " + std::to_string(l + 1) + ": ";
    if (layer.heads.empty()) throw InvalidArgument("ModelParams: " + where + "needs at least one head");
    for (const auto& head : layer.heads) {
      require_square(head.query, d, where + "query");
      require_square(head.key, d, where + "key");
      require_square(head.value, d, where + "value");
    }
    const std::size_t ff = layer.ffn_in.rows();
    require(ff > 0 && layer.ffn_in.cols() == d, where + "ffn_in must be d_ff x d");
    require(layer.ffn_in_bias.size() == ff, where + "ffn_in_bias must have d_ff entries");
    require(layer.ffn_out.rows() == d && layer.ffn_out.cols() == ff,
            where + "ffn_out must be d x d_ff");
    require(layer.ffn_out_bias.size() == d, where + "ffn_out_bias must have d entries");
  }
  require(output_weights.size() == d, "output weights size != width");
  if (!sublayer_scales.empty()) {
    require(sublayer_scales.size() == 2 * layers.size(), "sublayer_scales must have 2L entries");
    for (double s : sublayer_scales) {
      if (!(s > 0.0) || !std::isfinite(s)) {
        throw InvalidArgument("ModelParams: sublayer scales must be positive and finite");
      }
    }
  }
  if (!norm.is_none() && !(norm.eps >= 0.0)) {
    throw InvalidArgument("ModelParams: layer-norm epsilon must be nonnegative");
  }
}

std::string_view to_string(AttnScaling s) {
  return s == AttnScaling::LogLength ? "log_length" : "standard";
}

std::string describe(const NormMode& mode) {
  if (mode.is_none()) return "none";
  return "ln(eps=" + std::to_string(mode.eps) + ")";
}

}  // namespace hardattn
