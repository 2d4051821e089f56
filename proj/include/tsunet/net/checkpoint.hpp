#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsunet/net/two_stream.hpp"

namespace tsunet {

// Checkpoint file ("TSUN"):
//   magic "TSUN" | version u32 | config blob (u32 length + UTF-8 JSON) |
//   per-parameter records in canonical order:
//     name length u16 | name | rank u8 | dims u32[rank] | f32 data row-major
// All integers and floats little-endian. Round-trips are bit-exact.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct BadMagicError : DataError {
  using DataError::DataError;
};
struct VersionError : DataError {
  using DataError::DataError;
};
struct TruncatedError : DataError {
  using DataError::DataError;
};

static_assert(std::endian::native == std::endian::little,
              "TSUN serialization assumes a little-endian host");

namespace detail {

template <typename V>
void write_raw(std::ostream& os, const V& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(V));
}

template <typename V>
V read_raw(std::istream& is, const std::string& what) {
  V v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(V)))
    throw TruncatedError("TSUN: truncated while reading " + what);
  return v;
}

inline nlohmann::json stream_config_json(const StreamConfig& c) {
  return {{"in_channels", c.in_channels},
          {"base_channels", c.base_channels},
          {"depth", c.depth}};
}

inline StreamConfig stream_config_from_json(const nlohmann::json& j) {
  StreamConfig c;
  c.in_channels = j.at("in_channels").get<std::size_t>();
  c.base_channels = j.at("base_channels").get<std::size_t>();
  c.depth = j.at("depth").get<std::size_t>();
  return c;
}

}  // namespace detail

template <typename T>
void save_checkpoint(const TwoStreamModel<T>& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open for writing: " + path);
  os.write("TSUN", 4);
  detail::write_raw<std::uint32_t>(os, kCheckpointVersion);

  nlohmann::json cfg{{"num_classes", model.num_classes},
                     {"spatial", detail::stream_config_json(model.spatial.config)},
                     {"vector", detail::stream_config_json(model.vector_stream.config)}};
  const std::string blob = cfg.dump();
  detail::write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(blob.size()));
  os.write(blob.data(), static_cast<std::streamsize>(blob.size()));

  for_each_param(model, [&](const std::string& name, const Tensor<T>& t) {
    detail::write_raw<std::uint16_t>(os, static_cast<std::uint16_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    detail::write_raw<std::uint8_t>(os, static_cast<std::uint8_t>(t.rank()));
    for (std::size_t d : t.shape)
      detail::write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(d));
    for (T v : t.data) detail::write_raw<float>(os, static_cast<float>(v));
  });
  if (!os) throw DataError("write failed: " + path);
}

// Loads parameter records into an existing model; every record must match the
// model's canonical parameter names and shapes.
template <typename T>
void load_checkpoint_params(TwoStreamModel<T>& model, std::istream& is,
                            const std::string& path) {
  for_each_param(model, [&](const std::string& name, Tensor<T>& t) {
    const auto name_len = detail::read_raw<std::uint16_t>(is, "parameter name length");
    std::string got(name_len, '\0');
    if (!is.read(got.data(), name_len))
      throw TruncatedError("TSUN: truncated parameter name in " + path);
    if (got != name)
      throw ShapeError("TSUN: expected parameter '" + name + "', file has '" + got + "'");
    const auto rank = detail::read_raw<std::uint8_t>(is, "rank of " + got);
    std::vector<std::size_t> dims(rank);
    for (auto& d : dims) d = detail::read_raw<std::uint32_t>(is, "dims of " + got);
    if (dims != t.shape)
      throw ShapeError("TSUN: parameter '" + name + "' has shape " + shape_str(dims) +
                       ", model expects " + shape_str(t.shape));
    for (T& v : t.data) v = static_cast<T>(detail::read_raw<float>(is, "data of " + got));
  });
  if (is.peek() != std::char_traits<char>::eof())
    throw DataError("TSUN: trailing bytes after last parameter in " + path);
}

template <typename T = float>
TwoStreamModel<T> load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open: " + path);
  char magic[4] = {};
  if (!is.read(magic, 4)) throw TruncatedError("TSUN: file shorter than magic: " + path);
  if (std::memcmp(magic, "TSUN", 4) != 0)
    throw BadMagicError("not a TSUN checkpoint: " + path);
  const auto version = detail::read_raw<std::uint32_t>(is, "version");
  if (version != kCheckpointVersion)
    throw VersionError("TSUN version " + std::to_string(version) + " unsupported (expected " +
                       std::to_string(kCheckpointVersion) + "): " + path);
  const auto blob_len = detail::read_raw<std::uint32_t>(is, "config length");
  std::string blob(blob_len, '\0');
  if (!is.read(blob.data(), blob_len))
    throw TruncatedError("TSUN: truncated config blob: " + path);

  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(blob);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("TSUN: malformed config blob in " + path + ": " + e.what());
  }
  TwoStreamModel<T> model;
  try {
    model.spatial.config = detail::stream_config_from_json(cfg.at("spatial"));
    model.vector_stream.config = detail::stream_config_from_json(cfg.at("vector"));
    model.num_classes = cfg.at("num_classes").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("TSUN: incomplete config in " + path + ": " + e.what());
  }
  const StreamConfig vec_cfg = model.vector_stream.config;
  model = build_two_stream<T>(model.spatial.config, model.num_classes, /*seed=*/0);
  if (vec_cfg.in_channels != 2 ||
      vec_cfg.base_channels != model.spatial.config.base_channels ||
      vec_cfg.depth != model.spatial.config.depth)
    throw DataError("TSUN: vector stream config in " + path +
                    " does not match the spatial stream preset");
  load_checkpoint_params(model, is, path);
  return model;
}

}  // namespace tsunet
