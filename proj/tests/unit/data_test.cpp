#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "hardattn/data.hpp"
#include "hardattn/error.hpp"

using namespace hardattn;

TEST(Data, ExhaustiveCountAndOrder) {
  RngStream rng(0);
  const auto data = make_dataset(Task::Parity, ExhaustiveLength{12}, 1, rng);
  EXPECT_EQ(data.items.size(), 8190u);
  EXPECT_EQ(data.items[0].seq.to_string(), "0");
  EXPECT_EQ(data.items[1].seq.to_string(), "1");
  EXPECT_EQ(data.items[2].seq.to_string(), "00");
  EXPECT_EQ(data.items[5].seq.to_string(), "11");
  EXPECT_EQ(data.items.back().seq.to_string(), std::string(12, '1'));
  std::set<std::string> unique;
  for (const auto& item : data.items) unique.insert(item.seq.to_string());
  EXPECT_EQ(unique.size(), 8190u);
}

TEST(Data, LabelsComeFromTheOracle) {
  RngStream rng(1);
  const auto data = make_dataset(Task::First, FixedLength{7}, 200, rng);
  for (const auto& item : data.items) {
    EXPECT_EQ(item.seq.size(), 8u);
    EXPECT_EQ(item.label, item.seq[1] == Token::One);
  }
  LabeledDataset bad = data;
  bad.items[0].label = !bad.items[0].label;
  EXPECT_THROW(bad.check_labels(), Error);
}

TEST(Data, SeededSamplingIsReproducible) {
  RngStream a(9), b(9), c(10);
  const auto x = make_dataset(Task::Parity, UniformLength{1, 30}, 50, a);
  const auto y = make_dataset(Task::Parity, UniformLength{1, 30}, 50, b);
  const auto z = make_dataset(Task::Parity, UniformLength{1, 30}, 50, c);
  std::ostringstream sx, sy, sz;
  write_dataset(sx, x);
  write_dataset(sy, y);
  write_dataset(sz, z);
  EXPECT_EQ(sx.str(), sy.str());
  EXPECT_NE(sx.str(), sz.str());
  for (const auto& item : x.items) {
    EXPECT_GE(item.seq.size(), 2u);
    EXPECT_LE(item.seq.size(), 31u);
  }
}

TEST(Data, Errors) {
  RngStream rng(0);
  EXPECT_THROW(make_dataset(Task::Parity, ExhaustiveLength{21}, 1, rng), InvalidArgument);
  EXPECT_THROW(make_dataset(Task::Parity, FixedLength{3}, 0, rng), InvalidArgument);
  EXPECT_THROW(make_dataset(Task::Parity, UniformLength{5, 2}, 3, rng), InvalidArgument);
  EXPECT_THROW(parse_task("dyck"), InvalidArgument);
}

TEST(Data, WriteFormat) {
  LabeledDataset data;
  data.task = Task::Parity;
  data.items.push_back({TokenSeq::parse("011"), false});
  data.items.push_back({TokenSeq::parse("1"), true});
  std::ostringstream out;
  write_dataset(out, data);
  EXPECT_EQ(out.str(), "0\t011\n1\t1\n");
}

TEST(Data, BalancedSampleStrings) {
  RngStream rng(2);
  std::size_t ones = 0;
  for (int i = 0; i < 100; ++i) {
    for (auto b : sample_string(100, rng)) ones += b;
  }
  EXPECT_NEAR(static_cast<double>(ones), 5000.0, 250.0);
  EXPECT_TRUE(sample_string(0, rng).empty());
}
