#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tsunet/core/tensor.hpp"

namespace tsunet {

// Decoded 8-bit image, interleaved row-major; channels is 1 (gray) or 3 (RGB).
struct ImageU8 {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 1;
  std::vector<std::uint8_t> data;

  std::uint8_t at(std::size_t r, std::size_t c, std::size_t ch = 0) const {
    return data[(r * width + c) * channels + ch];
  }
};

inline ImageU8 load_png(const std::string& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str()))
    throw DataError("cannot read PNG " + path + ": " + img.message);
  if (img.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&img);
    throw DataError("unsupported bit depth (16-bit) in " + path);
  }
  const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  ImageU8 out;
  out.width = img.width;
  out.height = img.height;
  out.channels = color ? 3 : 1;
  out.data.resize(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, out.data.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw DataError("cannot decode PNG " + path + ": " + msg);
  }
  return out;
}

inline void save_png(const std::string& path, const ImageU8& image) {
  if (image.channels != 1 && image.channels != 3)
    throw DataError("save_png: only 1- or 3-channel images supported");
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width);
  img.height = static_cast<png_uint_32>(image.height);
  img.format = image.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&img, path.c_str(), 0, image.data.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw DataError("cannot write PNG " + path + ": " + msg);
  }
}

inline void save_png_gray(const std::string& path, std::size_t width, std::size_t height,
                          const std::vector<std::uint8_t>& pixels) {
  ImageU8 img{width, height, 1, pixels};
  save_png(path, img);
}

// Binary PGM (P5), maxval <= 255.
inline ImageU8 load_pgm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open: " + path);
  auto next_token = [&is, &path]() {
    std::string tok;
    int ch;
    while ((ch = is.get()) != EOF) {
      if (ch == '#') {
        while ((ch = is.get()) != EOF && ch != '\n') {
        }
      } else if (!std::isspace(ch)) {
        tok.push_back(static_cast<char>(ch));
        while ((ch = is.peek()) != EOF && !std::isspace(ch)) tok.push_back(static_cast<char>(is.get()));
        return tok;
      }
    }
    throw DataError("truncated PGM header: " + path);
  };
  if (next_token() != "P5") throw DataError("not a binary PGM (P5): " + path);
  ImageU8 out;
  out.width = std::stoul(next_token());
  out.height = std::stoul(next_token());
  const unsigned long maxval = std::stoul(next_token());
  if (maxval == 0 || maxval > 255)
    throw DataError("unsupported PGM maxval " + std::to_string(maxval) + " in " + path);
  is.get();  // single whitespace after maxval
  out.channels = 1;
  out.data.resize(out.width * out.height);
  if (!is.read(reinterpret_cast<char*>(out.data.data()),
               static_cast<std::streamsize>(out.data.size())))
    throw DataError("truncated PGM pixel data: " + path);
  return out;
}

inline void save_pgm(const std::string& path, std::size_t width, std::size_t height,
                     const std::vector<std::uint8_t>& pixels) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open for writing: " + path);
  os << "P5\n" << width << " " << height << "\n255\n";
  os.write(reinterpret_cast<const char*>(pixels.data()),
           static_cast<std::streamsize>(pixels.size()));
  if (!os) throw DataError("write failed: " + path);
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline ImageU8 load_image(const std::string& path) {
  if (ends_with(path, ".png") || ends_with(path, ".PNG")) return load_png(path);
  if (ends_with(path, ".pgm") || ends_with(path, ".PGM")) return load_pgm(path);
  throw DataError("unsupported image format (expect .png or .pgm): " + path);
}

// Planar [C,H,W] tensor with intensities scaled to [0,1].
template <typename T>
Tensor<T> image_to_tensor(const ImageU8& img) {
  Tensor<T> out({img.channels, img.height, img.width});
  for (std::size_t ch = 0; ch < img.channels; ++ch)
    for (std::size_t r = 0; r < img.height; ++r)
      for (std::size_t c = 0; c < img.width; ++c)
        out.data[(ch * img.height + r) * img.width + c] =
            static_cast<T>(img.at(r, c, ch)) / T(255);
  return out;
}

// Grayscale plane [H,W] in [0,1]; RGB converts via luma (0.299,0.587,0.114).
template <typename T>
Tensor<T> luma_plane(const Tensor<T>& chw) {
  if (chw.rank() != 3) throw ShapeError("luma_plane: expected [C,H,W]");
  const std::size_t C = chw.dim(0), H = chw.dim(1), W = chw.dim(2);
  Tensor<T> out({H, W});
  if (C == 1) {
    std::copy(chw.data.begin(), chw.data.end(), out.data.begin());
  } else if (C == 3) {
    for (std::size_t i = 0; i < H * W; ++i)
      out.data[i] = static_cast<T>(0.299) * chw.data[i] +
                    static_cast<T>(0.587) * chw.data[H * W + i] +
                    static_cast<T>(0.114) * chw.data[2 * H * W + i];
  } else {
    throw ShapeError("luma_plane: expected 1 or 3 channels, got " + std::to_string(C));
  }
  return out;
}

// Maps raw 8-bit mask values to contiguous class indices. Accepts masks that
// already store indices < num_classes, or binary 0/255 masks.
inline std::vector<std::uint8_t> mask_from_image(const ImageU8& img, std::size_t num_classes) {
  if (img.channels != 1)
    throw DataError("mask must be single-channel, got " + std::to_string(img.channels) +
                    " channels");
  std::set<std::uint8_t> values(img.data.begin(), img.data.end());
  const bool indexed =
      values.empty() || *values.rbegin() < static_cast<std::uint8_t>(std::min<std::size_t>(num_classes, 256));
  if (indexed) return img.data;
  const bool binary01 = num_classes == 2 &&
                        std::all_of(values.begin(), values.end(),
                                    [](std::uint8_t v) { return v == 0 || v == 255; });
  if (binary01) {
    std::vector<std::uint8_t> out(img.data.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = img.data[i] == 255 ? 1 : 0;
    return out;
  }
  std::ostringstream os;
  os << "mask values {";
  for (std::uint8_t v : values) os << int(v) << ",";
  os << "} do not fit " << num_classes << " classes (expect indices or 0/255)";
  throw DataError(os.str());
}

}  // namespace tsunet
