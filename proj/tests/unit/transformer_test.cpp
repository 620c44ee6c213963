#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "hardattn/constructions.hpp"
#include "hardattn/error.hpp"
#include "hardattn/transformer.hpp"
#include "reference.hpp"

using namespace hardattn;

namespace {

void expect_close(double a, double b) {
  EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(b)));
}

}  // namespace

TEST(Forward, MatchesReferenceOnRandomModels) {
  RngStream strings(11);
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto norm = seed % 3 == 0 ? NormMode::none() : NormMode::layer_norm(seed % 3 == 1 ? 1e-5 : 0.3);
    const auto scaling = seed % 2 ? AttnScaling::LogLength : AttnScaling::Standard;
    const ModelParams p = fixtures::random_model(seed, 6, 1 + seed % 3, 1 + seed % 2, 5, norm, scaling);
    for (std::size_t len : {0u, 1u, 4u, 9u}) {
      const TokenSeq seq = TokenSeq::from_bits(sample_string(len, strings));
      expect_close(encoder_forward(p, seq).logit, reference::logit(p, seq));
    }
  }
}

TEST(Forward, MatchesReferenceOnConstructions) {
  for (const auto& p : {build_parity(1.0), build_first(2.0), build_flawed_first(0.5),
                        amplifier_append(negation_wrap(build_parity(1.0), NormMode::layer_norm(0.0)), 0.1),
                        negation_wrap(build_first(1.0), NormMode::layer_norm(1e-5))}) {
    for (const char* w : {"0", "1", "0110", "1011101", "000000001"}) {
      const TokenSeq seq = TokenSeq::parse(w);
      expect_close(encoder_forward(p, seq).logit, reference::logit(p, seq));
    }
  }
}

TEST(Forward, LastLayerIsEvaluatedAtClsOnly) {
  const ModelParams p = build_parity();
  const auto trace = encoder_forward(p, TokenSeq::parse("0101"));
  ASSERT_EQ(trace.layers.size(), 2u);
  EXPECT_EQ(trace.layers[0].output.size(), 5u);
  EXPECT_EQ(trace.layers[1].output.size(), 1u);
  EXPECT_NEAR(trace.probability, sigmoid(trace.logit), 0.0);
}

TEST(Forward, SharedAttentionRowsAreExact) {
  // Zero query matrix: every query row is identical, attention is uniform.
  ModelParams p = fixtures::random_model(3, 5, 2, 1, 4, NormMode::layer_norm(1e-5), AttnScaling::Standard);
  p.layers[0].heads[0].query = Matrix(5, 5);
  const TokenSeq seq = TokenSeq::parse("011010");
  const auto trace = encoder_forward(p, seq);
  EXPECT_TRUE(trace.layers[0].heads[0].shared());
  for (std::size_t j = 0; j < seq.size(); ++j) {
    EXPECT_DOUBLE_EQ(trace.layers[0].heads[0].row(4)[j], 1.0 / 7.0);
  }
  expect_close(trace.logit, reference::logit(p, seq));
}

TEST(LayerNorm, ExactAndRegularized) {
  const Vector y = layer_norm(Vector{1, 2, 3, 4}, NormMode::layer_norm(0.0));
  const auto [mean, var] = mean_var(y);
  EXPECT_NEAR(mean, 0.0, 1e-15);
  EXPECT_NEAR(var, 1.0, 1e-15);
  const Vector z = layer_norm(Vector{0, 2}, NormMode::layer_norm(1.0));
  EXPECT_NEAR(z[1], 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(layer_norm(Vector{5, 5}, NormMode::layer_norm(1e-5)), (Vector{0, 0}));
  EXPECT_THROW(layer_norm(Vector{5, 5}, NormMode::layer_norm(0.0)), DegenerateInputError);
  EXPECT_EQ(layer_norm(Vector{5, 5}, NormMode::none()), (Vector{5, 5}));
}

TEST(Attention, ZeroQueryGivesUniformWeights) {
  const Matrix keys = Matrix::from_rows({{1, 2}, {3, 4}, {5, 6}});
  const Matrix values = Matrix::from_rows({{3, 0}, {0, 3}, {3, 3}});
  const auto out = attention_head(Vector{0, 0}, keys, values, AttnScaling::Standard, 3, 2);
  for (double w : out.weights) EXPECT_DOUBLE_EQ(w, 1.0 / 3.0);
  EXPECT_NEAR(out.output[0], 2.0, 1e-15);
  EXPECT_NEAR(out.output[1], 2.0, 1e-15);
}

TEST(Attention, LogLengthScalesLogits) {
  EXPECT_DOUBLE_EQ(attention_logit_scale(AttnScaling::Standard, 10, 4), 0.5);
  EXPECT_DOUBLE_EQ(attention_logit_scale(AttnScaling::LogLength, 10, 4), 0.5 * std::log(10.0));
  const Matrix keys = Matrix::from_rows({{1}, {0}});
  const Matrix values = Matrix::from_rows({{1}, {0}});
  const auto out = attention_head(Vector{1}, keys, values, AttnScaling::LogLength, 2, 1);
  // weight e^{ln 2} / (e^{ln 2} + 1) = 2/3
  EXPECT_NEAR(out.weights[0], 2.0 / 3.0, 1e-15);
}

TEST(Attention, ShapeErrors) {
  const Matrix keys(3, 2), values(3, 2);
  EXPECT_THROW(attention_head(Vector{0, 0, 0}, keys, values, AttnScaling::Standard, 3, 2),
               DimensionError);
  EXPECT_THROW(attention_head(Vector{0, 0}, keys, values, AttnScaling::Standard, 2, 2),
               DimensionError);
}

TEST(PositionalEncoding, Families) {
  const PositionalEncoding parity{PositionalEncoding::Family::Parity};
  const Vector v = positional_encoding(parity, 9, 3, 8);
  EXPECT_EQ(v[3], 3.0 / 8.0);
  EXPECT_EQ(v[4], -1.0);
  const PositionalEncoding first{PositionalEncoding::Family::First, 6};
  const Vector u = positional_encoding(first, 12, 1, 5);
  EXPECT_EQ(u[3], 1.0);
  EXPECT_EQ(u[9], -1.0);
  EXPECT_EQ(positional_encoding(first, 12, 2, 5)[3], 0.0);
}

TEST(CrossEntropy, BitsAndNats) {
  EXPECT_DOUBLE_EQ(cross_entropy_bits(0.5, true), 1.0);
  EXPECT_NEAR(cross_entropy_bits(0.25, false), std::log2(4.0 / 3.0), 1e-15);
  EXPECT_THROW(cross_entropy_bits(1.0, true), InvalidArgument);
  EXPECT_THROW(cross_entropy_bits(0.0, false), InvalidArgument);
  EXPECT_NEAR(cross_entropy_bits_from_logit(0.0, false), 1.0, 1e-15);
  EXPECT_NEAR(cross_entropy_nats_from_logit(2.0, true), std::log1p(std::exp(-2.0)), 1e-15);
  EXPECT_NEAR(cross_entropy_bits_from_logit(-800.0, true), 800.0 / std::numbers::ln2, 1e-9);
  EXPECT_EQ(cross_entropy_bits_from_logit(800.0, true), 0.0);
}

TEST(Classify, AcceptsIffLogitPositive) {
  ModelParams p = fixtures::random_model(1, 5, 1, 1, 3, NormMode::none(), AttnScaling::Standard);
  p.output_weights.assign(5, 0.0);
  p.output_bias = 0.0;
  EXPECT_FALSE(classify(p, TokenSeq::parse("1")).accepted);
  p.output_bias = 1e-300;
  EXPECT_TRUE(classify(p, TokenSeq::parse("1")).accepted);
}
