#include "hardattn/transformer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hardattn/error.hpp"

namespace hardattn {

AttentionMap::AttentionMap(std::size_t queries, std::vector<Vector> rows,
                           std::vector<std::size_t> index)
    : queries_(queries), rows_(std::move(rows)), index_(std::move(index)) {
  if (!index_.empty()) {
    if (index_.size() != queries_) throw DimensionError("AttentionMap: index needs one entry per query");
    for (auto r : index_) {
      if (r >= rows_.size()) throw DimensionError("AttentionMap: row index out of range");
    }
  } else if (rows_.size() != 1 && rows_.size() != queries_) {
    throw DimensionError("AttentionMap: need one shared row or one row per query");
  }
}

Vector positional_encoding(const PositionalEncoding& pe, std::size_t width, std::size_t i,
                           std::size_t n) {
  Vector v(width, 0.0);
  auto put = [&](std::size_t dim, double value) {
    v[dim] = value;
    if (pe.mirror_offset != 0) v[pe.mirror_offset + dim] = -value;
  };
  switch (pe.family) {
    case PositionalEncoding::Family::Zero:
      break;
    case PositionalEncoding::Family::Parity:
      put(3, static_cast<double>(i) / static_cast<double>(n));
      put(4, i % 2 == 0 ? 1.0 : -1.0);  // cos(i pi), exact
      break;
    case PositionalEncoding::Family::First:
      put(3, i == 1 ? 1.0 : 0.0);
      break;
  }
  return v;
}

std::vector<Vector> embed_input(const ModelParams& params, const TokenSeq& seq) {
  const std::size_t n = seq.size();
  std::vector<Vector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = static_cast<std::size_t>(seq[i]);
    if (t >= kAlphabetSize) {
      throw InvalidArgument("embed_input: token outside alphabet at position " + std::to_string(i));
    }
    Vector a = positional_encoding(params.positional, params.width, i, n);
    const Vector& we = params.word_embeddings[t];
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += we[k];
    out.push_back(std::move(a));
  }
  return out;
}

namespace {

void normalize_in_place(std::span<double> x, const NormMode& mode) {
  if (mode.is_none()) return;
  const auto [mean, var] = mean_var(x);
  if (mode.eps == 0.0 && var == 0.0) {
    throw DegenerateInputError("layer_norm: exact normalization of a constant vector");
  }
  const double inv = 1.0 / std::sqrt(var + mode.eps);
  for (double& v : x) v = (v - mean) * inv;
}

}  // namespace

Vector layer_norm(std::span<const double> x, const NormMode& mode) {
  Vector out(x.begin(), x.end());
  normalize_in_place(out, mode);
  return out;
}

double attention_logit_scale(AttnScaling scaling, std::size_t n, std::size_t d) {
  double scale = 1.0 / std::sqrt(static_cast<double>(d));
  if (scaling == AttnScaling::LogLength) scale *= std::log(static_cast<double>(n));
  return scale;
}

namespace {

void attention_weights_into(std::span<const double> query, const Matrix& keys, double scale,
                            std::span<double> weights) {
  for (std::size_t j = 0; j < keys.rows(); ++j) weights[j] = scale * dot(keys.row(j), query);
  softmax_in_place(weights);
}

void weighted_sum_into(std::span<const double> weights, const Matrix& values,
                       std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j < values.rows(); ++j) {
    const double w = weights[j];
    const auto v = values.row(j);
    for (std::size_t k = 0; k < v.size(); ++k) out[k] += w * v[k];
  }
}

bool rows_identical(const Matrix& m) {
  for (std::size_t r = 1; r < m.rows(); ++r) {
    if (!std::equal(m.row(r).begin(), m.row(r).end(), m.row(0).begin())) return false;
  }
  return true;
}

// Beyond this many distinct query vectors, grouping stops paying off.
constexpr std::size_t kMaxQueryGroups = 8;

/// Groups bit-identical query rows. Returns false when there are too many groups.
bool group_queries(const Matrix& qs, std::vector<std::size_t>& leaders,
                   std::vector<std::size_t>& index) {
  leaders.clear();
  index.assign(qs.rows(), 0);
  for (std::size_t i = 0; i < qs.rows(); ++i) {
    const auto qi = qs.row(i);
    std::size_t g = 0;
    while (g < leaders.size() && !std::equal(qi.begin(), qi.end(), qs.row(leaders[g]).begin())) ++g;
    if (g == leaders.size()) {
      if (leaders.size() == kMaxQueryGroups) return false;
      leaders.push_back(i);
    }
    index[i] = g;
  }
  return true;
}

Matrix project_rows(const Matrix& w, const std::vector<Vector>& xs, std::size_t count) {
  Matrix out(count, w.rows());
  for (std::size_t i = 0; i < count; ++i) matvec_into(w, xs[i], out.row(i));
  return out;
}

}  // namespace

HeadOutput attention_head(std::span<const double> query, const Matrix& keys, const Matrix& values,
                          AttnScaling scaling, std::size_t n, std::size_t d) {
  if (n == 0) throw InvalidArgument("attention_head: no positions to attend to");
  if (keys.rows() != n || values.rows() != n || keys.cols() != d || values.cols() != d ||
      query.size() != d) {
    throw DimensionError("attention_head: expected q in R^d and n x d keys/values");
  }
  HeadOutput out{Vector(d), Vector(n)};
  attention_weights_into(query, keys, attention_logit_scale(scaling, n, d), out.weights);
  weighted_sum_into(out.weights, values, out.output);
  return out;
}

ActivationTrace encoder_forward(const ModelParams& params, const TokenSeq& seq) {
  params.validate();
  const std::size_t n = seq.size();
  const std::size_t d = params.width;
  const double scale = attention_logit_scale(params.scaling, n, d);
  const bool scaled_sublayers = !params.sublayer_scales.empty();

  ActivationTrace trace;
  trace.input = embed_input(params, seq);
  trace.layers.resize(params.layers.size());

  const std::vector<Vector>* prev = &trace.input;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const LayerParams& layer = params.layers[l];
    LayerTrace& lt = trace.layers[l];
    const bool last = l + 1 == params.layers.size();
    const std::size_t queries = last ? 1 : n;

    lt.attention_sum.assign(queries, Vector(d, 0.0));
    Vector scratch(d);
    for (const HeadParams& head : layer.heads) {
      const Matrix keys = project_rows(head.key, *prev, n);
      const Matrix values = project_rows(head.value, *prev, n);
      const Matrix qs = project_rows(head.query, *prev, queries);

      std::vector<Vector> rows;
      std::vector<std::size_t> leaders, index;
      if (queries == 1 || rows_identical(keys)) {
        leaders.assign(1, 0);
        index.clear();
      } else if (!group_queries(qs, leaders, index)) {
        leaders.clear();
        index.clear();
      }
      if (!leaders.empty()) {
        std::vector<Vector> outputs;
        for (std::size_t leader : leaders) {
          Vector w(n);
          attention_weights_into(qs.row(leader), keys, scale, w);
          weighted_sum_into(w, values, scratch);
          outputs.push_back(scratch);
          rows.push_back(std::move(w));
        }
        for (std::size_t i = 0; i < queries; ++i) {
          const Vector& o = outputs[index.empty() ? 0 : index[i]];
          auto& acc = lt.attention_sum[i];
          for (std::size_t k = 0; k < d; ++k) acc[k] += o[k];
        }
        if (rows.size() == 1) index.clear();
      } else {
        rows.reserve(queries);
        for (std::size_t i = 0; i < queries; ++i) {
          Vector w(n);
          attention_weights_into(qs.row(i), keys, scale, w);
          weighted_sum_into(w, values, scratch);
          auto& acc = lt.attention_sum[i];
          for (std::size_t k = 0; k < d; ++k) acc[k] += scratch[k];
          rows.push_back(std::move(w));
        }
      }
      lt.heads.emplace_back(queries, std::move(rows), std::move(index));
    }

    lt.attended.resize(queries);
    lt.hidden.resize(queries);
    lt.ffn_sum.resize(queries);
    lt.output.resize(queries);
    const std::size_t ff = layer.ffn_width();
    for (std::size_t i = 0; i < queries; ++i) {
      Vector& pre_c = lt.attention_sum[i];
      for (std::size_t k = 0; k < d; ++k) pre_c[k] += (*prev)[i][k];

      Vector c = pre_c;
      normalize_in_place(c, params.norm);
      if (scaled_sublayers) {
        for (double& v : c) v *= params.sublayer_scales[2 * l];
      }

      Vector h(ff);
      matvec_into(layer.ffn_in, c, h);
      for (std::size_t k = 0; k < ff; ++k) h[k] = std::max(0.0, h[k] + layer.ffn_in_bias[k]);

      Vector pre_a(d);
      matvec_into(layer.ffn_out, h, pre_a);
      for (std::size_t k = 0; k < d; ++k) pre_a[k] += layer.ffn_out_bias[k] + c[k];

      Vector a = pre_a;
      normalize_in_place(a, params.norm);
      if (scaled_sublayers) {
        for (double& v : a) v *= params.sublayer_scales[2 * l + 1];
      }

      lt.attended[i] = std::move(c);
      lt.hidden[i] = std::move(h);
      lt.ffn_sum[i] = std::move(pre_a);
      lt.output[i] = std::move(a);
    }
    prev = &lt.output;
  }

  trace.logit = dot(params.output_weights, trace.cls_encoding()) + params.output_bias;
  trace.probability = sigmoid(trace.logit);
  return trace;
}

Prediction classify(const ModelParams& params, const TokenSeq& seq) {
  const ActivationTrace trace = encoder_forward(params, seq);
  // sigmoid(s) > 1/2 iff s > 0; testing the logit avoids rounding tiny logits to exactly 1/2.
  return {trace.logit, trace.probability, trace.logit > 0.0};
}

double cross_entropy_nats_from_logit(double logit, bool label) noexcept {
  return softplus(label ? -logit : logit);
}

double cross_entropy_bits_from_logit(double logit, bool label) noexcept {
  return cross_entropy_nats_from_logit(logit, label) / std::numbers::ln2;
}

double cross_entropy_bits(double prob, bool label) {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw InvalidArgument("cross_entropy_bits: probability must lie in (0, 1)");
  }
  return -std::log2(label ? prob : 1.0 - prob);
}

}  // namespace hardattn
