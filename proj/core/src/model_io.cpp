#include "hardattn/model_io.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>

#include "hardattn/backward.hpp"
#include "hardattn/error.hpp"

namespace hardattn {

namespace {

constexpr std::array<char, 4> kMagic = {'H', 'A', 'T', 'N'};
// Guards against absurd allocations from corrupt headers.
constexpr std::uint64_t kMaxDim = 1u << 16;

void put_u64(std::ostream& out, std::uint64_t v, int bytes = 8) {
  char buf[8];
  for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, bytes);
}

void put_f64(std::ostream& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }

std::uint64_t get_u64(std::istream& in, int bytes = 8) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), bytes)) throw FormatError("model file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

std::uint64_t get_dim(std::istream& in, const char* what) {
  const auto v = get_u64(in);
  if (v == 0 || v > kMaxDim) throw FormatError(std::string("model file: bad ") + what);
  return v;
}

}  // namespace

void write_model(std::ostream& out, const ModelParams& params) {
  params.validate();
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, kModelFormatVersion, 4);
  put_u64(out, params.width);
  put_u64(out, params.layers.size());
  for (const auto& layer : params.layers) {
    put_u64(out, layer.heads.size());
    put_u64(out, layer.ffn_width());
  }
  put_u64(out, static_cast<std::uint64_t>(params.norm.kind), 1);
  put_f64(out, params.norm.eps);
  put_u64(out, static_cast<std::uint64_t>(params.scaling), 1);
  put_u64(out, static_cast<std::uint64_t>(params.positional.family), 1);
  put_u64(out, params.positional.mirror_offset);
  put_u64(out, params.sublayer_scales.size());
  for (double s : params.sublayer_scales) put_f64(out, s);
  for_each_tensor(params, [&](const std::string&, std::span<const double> v) {
    for (double x : v) put_f64(out, x);
  });
}

ModelParams read_model(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size())) throw FormatError("model file truncated");
  if (magic != kMagic) throw FormatError("not a model file (bad magic)");
  const auto version = get_u64(in, 4);
  if (version != kModelFormatVersion) {
    throw FormatError("unsupported model format version " + std::to_string(version));
  }
  ModelParams p;
  p.width = get_dim(in, "width");
  const auto layers = get_u64(in);
  if (layers > kMaxDim) throw FormatError("model file: bad layer count");
  for (std::uint64_t l = 0; l < layers; ++l) {
    const auto heads = get_dim(in, "head count");
    const auto ff = get_dim(in, "ffn width");
    p.layers.push_back(LayerParams::zeros(p.width, heads, ff));
  }
  const auto norm_kind = get_u64(in, 1);
  const double eps = get_f64(in);
  if (norm_kind > 1) throw FormatError("model file: bad norm kind");
  p.norm = norm_kind == 0 ? NormMode::none() : NormMode::layer_norm(eps);
  const auto scaling = get_u64(in, 1);
  if (scaling > 1) throw FormatError("model file: bad attention scaling");
  p.scaling = static_cast<AttnScaling>(scaling);
  const auto family = get_u64(in, 1);
  if (family > 2) throw FormatError("model file: bad positional family");
  p.positional.family = static_cast<PositionalEncoding::Family>(family);
  p.positional.mirror_offset = get_u64(in);
  const auto scale_count = get_u64(in);
  if (scale_count > 2 * layers) throw FormatError("model file: bad sublayer scale count");
  for (std::uint64_t i = 0; i < scale_count; ++i) p.sublayer_scales.push_back(get_f64(in));
  for (auto& e : p.word_embeddings) e.assign(p.width, 0.0);
  p.output_weights.assign(p.width, 0.0);
  for_each_tensor(p, [&](const std::string&, std::span<double> v) {
    for (double& x : v) x = get_f64(in);
  });
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("model file: trailing bytes");
  try {
    p.validate();
  } catch (const Error& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
  return p;
}

void save_model(const ModelParams& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_model(out, params);
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
}

ModelParams load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return read_model(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace hardattn
