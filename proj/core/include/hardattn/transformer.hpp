#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hardattn/linalg.hpp"
#include "hardattn/model.hpp"

namespace hardattn {

/// Attention weights of one head: one row per query position, one column per
/// key position. Queries with bit-identical query vectors share one stored row;
/// when all keys are equal every query shares a single row.
class AttentionMap {
 public:
  AttentionMap() = default;
  /// rows.size() must be 1 or `queries`, unless `index` maps each query to a row.
  AttentionMap(std::size_t queries, std::vector<Vector> rows, std::vector<std::size_t> index = {});

  std::size_t query_count() const noexcept { return queries_; }
  std::size_t key_count() const noexcept { return rows_.empty() ? 0 : rows_.front().size(); }
  bool shared() const noexcept { return rows_.size() == 1 && queries_ > 1; }
  std::size_t stored_rows() const noexcept { return rows_.size(); }
  std::span<const double> row(std::size_t query) const noexcept {
    if (!index_.empty()) return rows_[index_[query]];
    return rows_.size() == 1 ? rows_.front() : rows_[query];
  }

 private:
  std::size_t queries_ = 0;
  std::vector<Vector> rows_;
  std::vector<std::size_t> index_;
};

/// Intermediates of one encoder layer. Entry p of each vector list belongs to
/// query position p. The last layer is evaluated at CLS only, because the
/// read-out never looks at other positions there; its lists have one entry.
struct LayerTrace {
  std::vector<Vector> attention_sum;  // sum of heads + residual, before normalization
  std::vector<Vector> attended;       // c
  std::vector<Vector> hidden;         // h
  std::vector<Vector> ffn_sum;        // W2 h + b2 + c, before normalization
  std::vector<Vector> output;         // a
  std::vector<AttentionMap> heads;
};

struct ActivationTrace {
  std::vector<Vector> input;  // a^0 for every position
  std::vector<LayerTrace> layers;
  double logit = 0.0;
  double probability = 0.5;

  std::size_t positions() const noexcept { return input.size(); }
  /// Final CLS encoding a^{L,0}.
  std::span<const double> cls_encoding() const noexcept {
    return layers.empty() ? std::span<const double>(input.front())
                          : std::span<const double>(layers.back().output.front());
  }
};

struct Prediction {
  double logit;
  double probability;
  bool accepted;  // probability > 1/2, strictly
};

Vector positional_encoding(const PositionalEncoding& pe, std::size_t width, std::size_t i,
                           std::size_t n);

/// a^{0,i} = WE(w_i) + PE(i, n) for every position.
std::vector<Vector> embed_input(const ModelParams& params, const TokenSeq& seq);

/// NONE: identity. LN(eps): (x - mean) / sqrt(var + eps). With eps = 0 a
/// constant x throws DegenerateInputError.
Vector layer_norm(std::span<const double> x, const NormMode& mode);

/// Multiplier applied to K q: 1/sqrt(d), times ln n under LogLength scaling.
double attention_logit_scale(AttnScaling scaling, std::size_t n, std::size_t d);

struct HeadOutput {
  Vector output;
  Vector weights;
};

/// Scaled dot-product attention of one query against n keys/values (n x d each).
HeadOutput attention_head(std::span<const double> query, const Matrix& keys, const Matrix& values,
                          AttnScaling scaling, std::size_t n, std::size_t d);

ActivationTrace encoder_forward(const ModelParams& params, const TokenSeq& seq);

Prediction classify(const ModelParams& params, const TokenSeq& seq);

/// -log2 P(label). Throws InvalidArgument unless prob is in (0, 1).
double cross_entropy_bits(double prob, bool label);

/// Same quantity computed from the logit; stable for any finite logit.
double cross_entropy_bits_from_logit(double logit, bool label) noexcept;
double cross_entropy_nats_from_logit(double logit, bool label) noexcept;

}  // namespace hardattn
