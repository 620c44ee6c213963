#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hardattn/constructions.hpp"
#include "hardattn/error.hpp"
#include "hardattn/train.hpp"

using namespace hardattn;

namespace {

TrainConfig tiny_config() {
  TrainConfig c;
  c.task = Task::First;
  c.epochs = 3;
  c.strings_per_epoch = 10;
  c.train_length = 6;
  c.test_length = 20;
  c.test_count = 10;
  return c;
}

}  // namespace

TEST(Init, BoundsAndFixedPositions) {
  TrainConfig c;
  c.task = Task::Parity;
  RngStream rng(3);
  const ModelParams p = init_params(c, rng);
  EXPECT_EQ(p.width, 16u);
  EXPECT_EQ(p.layers.size(), 2u);
  EXPECT_EQ(p.layers[0].heads.size(), 2u);
  EXPECT_EQ(p.layers[0].ffn_width(), 64u);
  EXPECT_EQ(p.positional.family, PositionalEncoding::Family::Parity);
  EXPECT_DOUBLE_EQ(p.norm.eps, 1e-5);
  for (double x : p.layers[1].heads[1].key.data()) EXPECT_LE(std::abs(x), 0.25);
  for (double x : p.layers[0].ffn_out.data()) EXPECT_LE(std::abs(x), 0.125);
  for (double x : p.word_embeddings[2]) EXPECT_LE(std::abs(x), 1.0 / std::sqrt(3.0));
  for (double x : p.layers[0].ffn_in_bias) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(p.output_bias, 0.0);

  c.task = Task::First;
  RngStream r2(3);
  EXPECT_EQ(init_params(c, r2).layers[0].heads.size(), 1u);
}

TEST(Init, SeedReproducibleAndDistinct) {
  TrainConfig c;
  RngStream a(1), b(1), z(2);
  const ModelParams x = init_params(c, a), y = init_params(c, b), w = init_params(c, z);
  EXPECT_EQ(x.layers[0].heads[0].query, y.layers[0].heads[0].query);
  EXPECT_NE(x.layers[0].heads[0].query, w.layers[0].heads[0].query);
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  c.ln_eps = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = TrainConfig{};
  c.epochs = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = TrainConfig{};
  c.d_model = 3;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(AttnMassFirst, UniformAndHardAttention) {
  ActivationTrace trace;
  trace.input.assign(10, Vector(2, 0.0));
  trace.layers.resize(2);
  for (auto& layer : trace.layers) layer.heads.emplace_back(10, std::vector<Vector>{Vector(10, 0.1)});
  EXPECT_NEAR(attn_mass_first(trace), 0.2, 1e-15);

  Vector hard(10, 0.0);
  hard[1] = 1.0;
  for (auto& layer : trace.layers) layer.heads.assign(1, AttentionMap(1, {hard}));
  EXPECT_DOUBLE_EQ(attn_mass_first(trace), 2.0);

  ActivationTrace tiny;
  tiny.input.assign(1, Vector(2, 0.0));
  EXPECT_THROW(attn_mass_first(tiny), InvalidArgument);
}

TEST(AttnMassFirst, FirstConstructionPlugIn) {
  const auto trace = encoder_forward(build_first(1.0), TokenSeq::parse("100000000"));
  const double e = std::exp(1.0);
  EXPECT_NEAR(attn_mass_first(trace), e / (e + 9.0) + 0.1, 1e-14);
}

TEST(Train, DeterministicRecords) {
  const TrainConfig c = tiny_config();
  const TrainRun a = train_run(c), b = train_run(c);
  std::ostringstream sa, sb;
  write_csv(sa, a.records);
  write_csv(sb, b.records);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a.records.size(), 3u);
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
  TrainConfig other = c;
  other.seed = 1;
  EXPECT_NE(train_run(other).epoch_loss, a.epoch_loss);
}

TEST(Train, EvalScheduleAndEarlyStop) {
  TrainConfig c = tiny_config();
  c.epochs = 7;
  c.eval_every = 3;
  const TrainRun run = train_run(c);
  ASSERT_EQ(run.records.size(), 3u);
  EXPECT_EQ(run.records[0].epoch, 3);
  EXPECT_EQ(run.records[2].epoch, 7);
  c.stop_at_accuracy = 0.0;
  EXPECT_EQ(train_run(c).records.size(), 1u);
}

TEST(Train, EpochMeanLossMostlyDecreases) {
  TrainConfig c;
  c.task = Task::First;
  c.scaling = AttnScaling::LogLength;
  c.epochs = 50;
  c.train_length = 30;
  c.test_length = 30;
  c.test_count = 10;
  c.eval_every = 50;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    c.seed = seed;
    const TrainRun run = train_run(c);
    ASSERT_EQ(run.first_epoch_steps.size(), 100u);
    ASSERT_EQ(run.epoch_loss.size(), 50u);
    std::size_t increases = 0;
    for (std::size_t e = 1; e < run.epoch_loss.size(); ++e) increases += run.epoch_loss[e] > run.epoch_loss[e - 1];
    EXPECT_LE(increases, 4u) << "seed " << seed;  // 10% of 49 steps
    EXPECT_LT(run.epoch_loss.back(), run.epoch_loss.front());
  }
}

TEST(Train, CollectRecordsAppendsMeanCurve) {
  TrainConfig c = tiny_config();
  c.runs = 2;
  c.seed = 7;
  const auto runs = train_runs(c);
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_EQ(runs[1].seed, 8u);
  const auto records = collect_records(runs);
  ASSERT_EQ(records.size(), 9u);
  const MetricRecord& mean = records[6];
  EXPECT_EQ(mean.seed, -1);
  EXPECT_EQ(mean.epoch, 1);
  EXPECT_NEAR(mean.accuracy, (records[0].accuracy + records[3].accuracy) / 2.0, 1e-15);
}
