#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hardattn/linalg.hpp"

namespace hardattn {

enum class Token : std::uint8_t { Zero = 0, One = 1, Cls = 2 };

inline constexpr std::size_t kAlphabetSize = 3;

using Bits = std::vector<std::uint8_t>;

/// Input sequence with CLS at position 0. size() counts CLS, so a string w
/// gives size() == |w| + 1 and positions 0..size()-1.
class TokenSeq {
 public:
  explicit TokenSeq(std::vector<Token> tokens);

  static TokenSeq from_bits(std::span<const std::uint8_t> bits);
  /// Parses a string over {'0','1'}; CLS is prepended.
  static TokenSeq parse(std::string_view bits);

  std::size_t size() const noexcept { return tokens_.size(); }
  Token operator[](std::size_t i) const noexcept { return tokens_[i]; }
  std::span<const Token> tokens() const noexcept { return tokens_; }

  std::size_t count_ones() const noexcept;
  Bits bits() const;
  std::string to_string() const;

  bool operator==(const TokenSeq&) const = default;

 private:
  std::vector<Token> tokens_;
};

struct NormMode {
  enum class Kind : std::uint8_t { None = 0, LayerNorm = 1 };

  Kind kind = Kind::None;
  double eps = 0.0;

  static NormMode none() { return {}; }
  /// (x - mean) / sqrt(var + eps) with gamma = 1, beta = 0. eps = 0 is exact normalization.
  static NormMode layer_norm(double eps);

  bool is_none() const noexcept { return kind == Kind::None; }
  bool operator==(const NormMode&) const = default;
};

enum class AttnScaling : std::uint8_t {
  Standard = 0,
  /// Attention logits multiplied by ln n, n = number of positions including CLS.
  LogLength = 1,
};

/// Fixed positional encoding families. Parity: dims 3,4 carry i/n and cos(i*pi).
/// First: dim 3 carries 1[i = 1]. When mirror_offset > 0 the negated encoding
/// is also written starting at that dimension (see negation_wrap).
struct PositionalEncoding {
  enum class Family : std::uint8_t { Zero = 0, Parity = 1, First = 2 };

  Family family = Family::Zero;
  std::size_t mirror_offset = 0;

  bool operator==(const PositionalEncoding&) const = default;
};

struct HeadParams {
  Matrix query;
  Matrix key;
  Matrix value;

  static HeadParams zeros(std::size_t width);
  bool operator==(const HeadParams&) const = default;
};

struct LayerParams {
  std::vector<HeadParams> heads;
  Matrix ffn_in;      // d_ff x d
  Vector ffn_in_bias;  // d_ff
  Matrix ffn_out;      // d x d_ff
  Vector ffn_out_bias; // d

  static LayerParams zeros(std::size_t width, std::size_t heads, std::size_t ffn_width);
  std::size_t ffn_width() const noexcept { return ffn_in.rows(); }
  bool operator==(const LayerParams&) const = default;
};

/// Complete weight set of a post-norm encoder with a sigmoid read-out on CLS.
struct ModelParams {
  std::size_t width = 0;
  std::array<Vector, kAlphabetSize> word_embeddings;
  PositionalEncoding positional;
  std::vector<LayerParams> layers;
  Vector output_weights;
  double output_bias = 0.0;
  NormMode norm;
  AttnScaling scaling = AttnScaling::Standard;
  /// Optional constant multipliers applied after each normalization step,
  /// ordered (attention, ffn) per layer. Empty means all ones.
  std::vector<double> sublayer_scales;

  /// Throws DimensionError / InvalidArgument when shapes or flags are inconsistent.
  void validate() const;

  std::size_t layer_count() const noexcept { return layers.size(); }
  bool operator==(const ModelParams&) const = default;
};

std::string_view to_string(AttnScaling s);
std::string describe(const NormMode& mode);

}  // namespace hardattn
