#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <variant>
#include <vector>

#include "hardattn/model.hpp"
#include "hardattn/rng.hpp"

namespace hardattn {

enum class Task : std::uint8_t { Parity = 0, First = 1 };

std::string_view to_string(Task task);
Task parse_task(std::string_view name);

/// Language membership for the task, via the brute-force oracles.
bool task_label(Task task, std::span<const std::uint8_t> bits) noexcept;

/// Lengths count symbols, excluding CLS.
struct FixedLength {
  std::size_t length;
};
struct UniformLength {
  std::size_t lo;
  std::size_t hi;
};
struct ExhaustiveLength {
  std::size_t max_length;
};
using LengthSpec = std::variant<FixedLength, UniformLength, ExhaustiveLength>;

inline constexpr std::size_t kMaxExhaustiveLength = 20;

struct LabeledExample {
  TokenSeq seq;
  bool label;
};

struct LabeledDataset {
  Task task = Task::Parity;
  std::uint64_t seed = 0;
  std::vector<LabeledExample> items;

  /// Throws Error if any label disagrees with the task oracle.
  void check_labels() const;
};

/// len i.i.d. uniform bits. len = 0 yields the empty string.
Bits sample_string(std::size_t len, RngStream& rng);

/// Samples `count` strings per the length spec, or for ExhaustiveLength every
/// string of length 1..max_length in length-then-lexicographic order (count is
/// ignored). Labels come from the oracle and are re-checked.
LabeledDataset make_dataset(Task task, const LengthSpec& lengths, std::size_t count,
                            RngStream& rng);

/// One line per item, "label<TAB>bits", label as 0/1, LF line endings.
void write_dataset(std::ostream& out, const LabeledDataset& data);

}  // namespace hardattn
