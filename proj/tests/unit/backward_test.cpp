#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "hardattn/backward.hpp"
#include "hardattn/constructions.hpp"
#include "hardattn/error.hpp"
#include "hardattn/oracles.hpp"
#include "hardattn/train.hpp"
#include "hardattn/transformer.hpp"

using namespace hardattn;

namespace {
// On d = 16 models some entries are ~1e-8 and the difference quotient's
// rounding error (~1e-12) dominates at h = 1e-5; 1e-4 balances it against
// the O(h^2) truncation error. Probes that cross a ReLU boundary are skipped.
constexpr double kDefaultShapeStep = 1e-4;
}  // namespace

TEST(Backward, LogisticGradientAtZeroReadout) {
  ModelParams p = fixtures::random_model(2, 4, 2, 1, 3, NormMode::layer_norm(1e-5), AttnScaling::Standard);
  p.output_weights.assign(4, 0.0);
  p.output_bias = 0.0;
  const TokenSeq seq = TokenSeq::parse("101");
  EXPECT_DOUBLE_EQ(backward(p, seq, true).grads.tensors.output_bias, -0.5);
  EXPECT_DOUBLE_EQ(backward(p, seq, false).grads.tensors.output_bias, 0.5);
  // Nothing upstream of a zero read-out receives gradient.
  EXPECT_TRUE(backward(p, seq, true).grads.tensors.layers[0].ffn_in.is_zero());
}

TEST(Backward, MatchesFiniteDifferencesOnSmallModel) {
  const ModelParams p = fixtures::random_model(12, 5, 2, 2, 6, NormMode::layer_norm(1e-5), AttnScaling::Standard);
  const TokenSeq seq = TokenSeq::parse("10011");
  const auto br = backward(p, seq, false);
  const auto report = check_gradients(p, seq, false, br.grads, 1e-5);
  EXPECT_TRUE(report.passed) << report.max_rel_error;
}

TEST(Backward, MatchesFiniteDifferencesOnDefaultShapedModels) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    for (const Task task : {Task::Parity, Task::First}) {
      TrainConfig config;
      config.task = task;
      config.scaling = seed == 1 ? AttnScaling::LogLength : AttnScaling::Standard;
      RngStream rng(seed);
      const ModelParams p = init_params(config, rng);
      const TokenSeq seq = TokenSeq::from_bits(sample_string(6 + seed, rng));
      const bool label = rng.bit();
      const auto br = backward(p, seq, label);
      const auto report = check_gradients(p, seq, label, br.grads, kDefaultShapeStep);
      for (const auto& t : report.tensors) {
        EXPECT_TRUE(t.passed) << t.name << " rel " << t.max_rel_error;
      }
      EXPECT_LT(report.max_rel_error, 1e-4);
    }
  }
}

TEST(Backward, MatchesFiniteDifferencesWithoutNormalization) {
  const ModelParams p = fixtures::random_model(5, 5, 2, 2, 4, NormMode::none(), AttnScaling::LogLength);
  const TokenSeq seq = TokenSeq::parse("011001");
  const auto br = backward(p, seq, true);
  EXPECT_TRUE(check_gradients(p, seq, true, br.grads).passed);
}

TEST(Backward, CorruptedGradientIsCaught) {
  const ModelParams p = fixtures::random_model(6, 5, 2, 1, 4, NormMode::layer_norm(1e-5), AttnScaling::Standard);
  const TokenSeq seq = TokenSeq::parse("0110");
  auto br = backward(p, seq, false);
  br.grads.tensors.layers[0].heads[0].value(1, 2) *= 1.01;
  const auto report = check_gradients(p, seq, false, br.grads);
  EXPECT_FALSE(report.passed);
  for (const auto& t : report.tensors) EXPECT_EQ(t.passed, t.name != "layer1.head1.value") << t.name;
}

TEST(Backward, ProbesAcrossAReluBoundaryAreSkipped) {
  ModelParams p = fixtures::random_model(8, 5, 1, 1, 4, NormMode::layer_norm(1e-5), AttnScaling::Standard);
  const TokenSeq seq = TokenSeq::parse("0110");
  // Put hidden unit 0 exactly on its boundary at the CLS position.
  const auto c = encoder_forward(p, seq).layers[0].attended[0];
  double pre = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) pre += p.layers[0].ffn_in(0, j) * c[j];
  p.layers[0].ffn_in_bias[0] = -pre;
  const auto br = backward(p, seq, true);
  const auto report = check_gradients(p, seq, true, br.grads);
  EXPECT_GT(report.kinks, 0u);
  for (const auto& t : report.tensors) {
    if (t.name == "layer1.ffn_in_bias") EXPECT_GE(t.kinks, 1u);
  }
}

TEST(Backward, LossMatchesConstructionLogit) {
  const ModelParams p = build_first(1.0);
  const TokenSeq seq = TokenSeq::parse("100101");
  const double s = oracles::first_logit(seq.size(), true, 1.0, false);
  EXPECT_NEAR(backward(p, seq, true).loss, std::log1p(std::exp(-s)), 1e-12);
}

TEST(Backward, RejectsUntrainableModels) {
  ModelParams p = build_first();
  p.norm = NormMode::layer_norm(0.0);
  EXPECT_THROW(backward(p, TokenSeq::parse("1"), true), InvalidArgument);
  const std::array<double, 4> scales{1, 1, 1, 1};
  EXPECT_THROW(backward(scale_activations(build_first(), scales), TokenSeq::parse("1"), true),
               InvalidArgument);
}

TEST(Gradients, ZerosLikeKeepsShapes) {
  const ModelParams p = build_parity();
  const Gradients g = Gradients::zeros_like(p);
  EXPECT_EQ(g.tensors.layers.size(), 2u);
  EXPECT_EQ(g.tensors.layers[1].heads.size(), 2u);
  std::size_t count = 0;
  for_each_tensor(g.tensors, [&](const std::string&, std::span<const double> v) {
    for (double x : v) EXPECT_EQ(x, 0.0);
    ++count;
  });
  EXPECT_EQ(count, 3u + 2u * (6u + 4u) + 2u);
}
