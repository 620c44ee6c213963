#include "hardattn/data.hpp"

#include <ostream>
#include <string>

#include "hardattn/error.hpp"
#include "hardattn/oracles.hpp"

namespace hardattn {

std::string_view to_string(Task task) { return task == Task::First ? "first" : "parity"; }

Task parse_task(std::string_view name) {
  if (name == "parity") return Task::Parity;
  if (name == "first") return Task::First;
  throw InvalidArgument("unknown task '" + std::string(name) + "' (expected parity or first)");
}

bool task_label(Task task, std::span<const std::uint8_t> bits) noexcept {
  return task == Task::First ? oracles::first_oracle(bits) : oracles::parity_oracle(bits);
}

void LabeledDataset::check_labels() const {
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Bits bits = items[i].seq.bits();
    if (items[i].label != task_label(task, bits)) {
      throw Error("dataset item " + std::to_string(i) + " (" + items[i].seq.to_string() +
                  ") carries the wrong label");
    }
  }
}

Bits sample_string(std::size_t len, RngStream& rng) {
  Bits bits(len);
  std::uint64_t pool = 0;
  int left = 0;
  for (auto& b : bits) {
    if (left == 0) {
      pool = rng.next_u64();
      left = 64;
    }
    b = static_cast<std::uint8_t>(pool & 1U);
    pool >>= 1;
    --left;
  }
  return bits;
}

namespace {

void push(LabeledDataset& data, const Bits& bits) {
  data.items.push_back({TokenSeq::from_bits(bits), task_label(data.task, bits)});
}

}  // namespace

LabeledDataset make_dataset(Task task, const LengthSpec& lengths, std::size_t count,
                            RngStream& rng) {
  if (count == 0) throw InvalidArgument("make_dataset: count must be >= 1");
  LabeledDataset data;
  data.task = task;
  data.seed = rng.seed();

  if (const auto* ex = std::get_if<ExhaustiveLength>(&lengths)) {
    if (ex->max_length > kMaxExhaustiveLength) {
      throw InvalidArgument("make_dataset: exhaustive enumeration limited to length " +
                            std::to_string(kMaxExhaustiveLength));
    }
    for (std::size_t len = 1; len <= ex->max_length; ++len) {
      Bits bits(len);
      for (std::uint64_t code = 0; code < (std::uint64_t{1} << len); ++code) {
        for (std::size_t j = 0; j < len; ++j) bits[j] = (code >> (len - 1 - j)) & 1U;
        push(data, bits);
      }
    }
  } else if (const auto* fixed = std::get_if<FixedLength>(&lengths)) {
    data.items.reserve(count);
    for (std::size_t i = 0; i < count; ++i) push(data, sample_string(fixed->length, rng));
  } else {
    const auto& uni = std::get<UniformLength>(lengths);
    if (uni.lo < 1 || uni.lo > uni.hi) {
      throw InvalidArgument("make_dataset: uniform lengths need 1 <= lo <= hi");
    }
    data.items.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const auto len = static_cast<std::size_t>(rng.uniform_int(uni.lo, uni.hi));
      push(data, sample_string(len, rng));
    }
  }
  data.check_labels();
  return data;
}

void write_dataset(std::ostream& out, const LabeledDataset& data) {
  for (const auto& item : data.items) {
    out << (item.label ? '1' : '0') << '\t' << item.seq.to_string() << '\n';
  }
}

}  // namespace hardattn
