#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "hardattn/model.hpp"

namespace hardattn {

/// Binary model format, all integers and doubles little-endian:
///
///   "HATN" | u32 version
///   u64 width | u64 layers | per layer: u64 heads, u64 ffn_width
///   u8 norm kind | f64 eps | u8 attn scaling | u8 positional family | u64 mirror offset
///   u64 sublayer scale count | f64 scales...
///   f64 tensor entries in for_each_tensor order
///
/// Doubles are stored as raw IEEE-754 bits, so a round-trip is bit-exact.
inline constexpr std::uint32_t kModelFormatVersion = 1;

void write_model(std::ostream& out, const ModelParams& params);
ModelParams read_model(std::istream& in);

/// Throws Error with the path on I/O failure, FormatError on a bad file.
void save_model(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_model(const std::filesystem::path& path);

}  // namespace hardattn
