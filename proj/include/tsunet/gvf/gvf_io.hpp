#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "tsunet/gvf/gvf.hpp"

namespace tsunet {

// GVF binary file, little-endian throughout:
//   magic "GVF2" | version u32 | width u32 | height u32 | mu f32 |
//   iterations u32 | u-plane f32[h*w] row-major | v-plane f32[h*w]
inline constexpr std::uint32_t kGvfFormatVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "GVF2 serialization assumes a little-endian host");

namespace detail {

inline void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), 4);
}

inline void write_f32(std::ostream& os, float v) {
  os.write(reinterpret_cast<const char*>(&v), 4);
}

inline std::uint32_t read_u32(std::istream& is, const std::string& what) {
  std::uint32_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), 4))
    throw DataError("GVF2: truncated file while reading " + what);
  return v;
}

inline float read_f32(std::istream& is, const std::string& what) {
  float v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), 4))
    throw DataError("GVF2: truncated file while reading " + what);
  return v;
}

}  // namespace detail

template <typename T>
void save_gvf(const std::string& path, const GvfField<T>& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open for writing: " + path);
  os.write("GVF2", 4);
  detail::write_u32(os, kGvfFormatVersion);
  detail::write_u32(os, static_cast<std::uint32_t>(field.width()));
  detail::write_u32(os, static_cast<std::uint32_t>(field.height()));
  detail::write_f32(os, static_cast<float>(field.params.mu));
  detail::write_u32(os, static_cast<std::uint32_t>(field.params.iterations));
  for (T x : field.u.data) detail::write_f32(os, static_cast<float>(x));
  for (T x : field.v.data) detail::write_f32(os, static_cast<float>(x));
  if (!os) throw DataError("write failed: " + path);
}

template <typename T = float>
GvfField<T> load_gvf(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open: " + path);
  char magic[4] = {};
  if (!is.read(magic, 4) || std::memcmp(magic, "GVF2", 4) != 0)
    throw DataError("not a GVF2 file: " + path);
  const std::uint32_t version = detail::read_u32(is, "version");
  if (version != kGvfFormatVersion)
    throw DataError("GVF2 version " + std::to_string(version) + " unsupported (expected " +
                    std::to_string(kGvfFormatVersion) + "): " + path);
  const std::size_t w = detail::read_u32(is, "width");
  const std::size_t h = detail::read_u32(is, "height");
  GvfField<T> field;
  field.params.mu = detail::read_f32(is, "mu");
  field.params.iterations = detail::read_u32(is, "iterations");
  field.u = Tensor<T>({h, w});
  field.v = Tensor<T>({h, w});
  for (std::size_t i = 0; i < h * w; ++i)
    field.u.data[i] = static_cast<T>(detail::read_f32(is, "u plane"));
  for (std::size_t i = 0; i < h * w; ++i)
    field.v.data[i] = static_cast<T>(detail::read_f32(is, "v plane"));
  return field;
}

}  // namespace tsunet
