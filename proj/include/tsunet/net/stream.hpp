#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tsunet/core/ops.hpp"

namespace tsunet {

// Encoder-decoder stream backbone. Channels double per level down to the
// bottleneck; every 3x3 convolution uses same-padding and ReLU; upsampling is
// a 2x2 stride-2 transposed convolution (no bias). The default is the
// full-size preset: base 64, depth 5 -> 22 convolutional layers, 64-channel
// output at input resolution.
struct StreamConfig {
  std::size_t in_channels = 1;   // 1 grayscale, 2 vector field, 3 RGB
  std::size_t base_channels = 64;
  std::size_t depth = 5;         // resolution levels including the bottleneck

  void validate() const {
    if (depth < 2) throw ShapeError("StreamConfig: depth must be >= 2");
    if (base_channels < 1) throw ShapeError("StreamConfig: base_channels must be >= 1");
    if (in_channels < 1 || in_channels > 3)
      throw ShapeError("StreamConfig: in_channels must be 1, 2 or 3");
  }

  std::size_t level_channels(std::size_t level) const {  // level 1..depth
    return base_channels << (level - 1);
  }
  std::size_t downscale_factor() const { return std::size_t{1} << (depth - 1); }
};

// 3x3 convs (4*(depth-1) + 2) plus up-convs (depth-1).
inline std::size_t conv_layer_count(const StreamConfig& c) {
  return 4 * (c.depth - 1) + 2 + (c.depth - 1);
}

template <typename T>
struct Param {
  std::string name;
  Tensor<T> value;
};

template <typename T>
struct StreamNet {
  StreamConfig config;
  std::vector<Param<T>> params;  // canonical order fixed by build_stream
};

namespace detail {

template <typename T>
void add_conv_param(std::vector<Param<T>>& out, const std::string& prefix,
                    std::size_t cout, std::size_t cin, std::size_t k,
                    std::mt19937_64& rng) {
  // He-normal: std = sqrt(2 / fan_in), zero bias.
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / double(cin * k * k)));
  Tensor<T> w({cout, cin, k, k});
  for (T& v : w.data) v = static_cast<T>(dist(rng));
  out.push_back({prefix + ".weight", std::move(w)});
  out.push_back({prefix + ".bias", Tensor<T>({cout})});
}

template <typename T>
void add_upconv_param(std::vector<Param<T>>& out, const std::string& prefix,
                      std::size_t cin, std::size_t cout, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / double(cin * 4)));
  Tensor<T> w({cin, cout, 2, 2});
  for (T& v : w.data) v = static_cast<T>(dist(rng));
  out.push_back({prefix + ".weight", std::move(w)});
}

}  // namespace detail

template <typename T>
StreamNet<T> build_stream(const StreamConfig& config, std::uint64_t seed) {
  config.validate();
  StreamNet<T> net;
  net.config = config;
  std::mt19937_64 rng(seed);
  const std::size_t D = config.depth;
  for (std::size_t level = 1; level < D; ++level) {
    const std::size_t cin = level == 1 ? config.in_channels : config.level_channels(level - 1);
    const std::size_t c = config.level_channels(level);
    const std::string p = "enc" + std::to_string(level);
    detail::add_conv_param(net.params, p + ".conv1", c, cin, 3, rng);
    detail::add_conv_param(net.params, p + ".conv2", c, c, 3, rng);
  }
  {
    const std::size_t cin = config.level_channels(D - 1);
    const std::size_t c = config.level_channels(D);
    detail::add_conv_param(net.params, "bottleneck.conv1", c, cin, 3, rng);
    detail::add_conv_param(net.params, "bottleneck.conv2", c, c, 3, rng);
  }
  for (std::size_t level = D - 1; level >= 1; --level) {
    const std::size_t cdeep = config.level_channels(level + 1);
    const std::size_t c = config.level_channels(level);
    const std::string p = "dec" + std::to_string(level);
    detail::add_upconv_param(net.params, p + ".up", cdeep, c, rng);
    detail::add_conv_param(net.params, p + ".conv1", c, 2 * c, 3, rng);
    detail::add_conv_param(net.params, p + ".conv2", c, c, 3, rng);
  }
  return net;
}

// Leaf ids for every parameter, in canonical order.
struct StreamBinding {
  std::vector<int> ids;
};

template <typename T>
StreamBinding bind_stream(Graph<T>& g, const StreamNet<T>& net, bool requires_grad) {
  StreamBinding b;
  b.ids.reserve(net.params.size());
  for (const auto& p : net.params) b.ids.push_back(g.leaf(p.value, requires_grad));
  return b;
}

// Runs the backbone; output is [B, base_channels, H, W].
template <typename T>
int stream_forward(Graph<T>& g, const StreamNet<T>& net, const StreamBinding& binding,
                   int input) {
  const Tensor<T>& x0 = g.value(input);
  if (x0.rank() != 4)
    throw ShapeError("stream_forward: input must be [B,C,H,W], got " + shape_str(x0.shape));
  if (x0.dim(1) != net.config.in_channels)
    throw ShapeError("stream_forward: expected " + std::to_string(net.config.in_channels) +
                     " input channels, got " + std::to_string(x0.dim(1)));
  const std::size_t f = net.config.downscale_factor();
  if (x0.dim(2) % f != 0 || x0.dim(3) % f != 0)
    throw ShapeError("stream_forward: spatial size " + std::to_string(x0.dim(2)) + "x" +
                     std::to_string(x0.dim(3)) + " must be divisible by " +
                     std::to_string(f) + " (2^(depth-1))");

  std::size_t at = 0;
  auto conv_relu = [&](int x) {
    const int w = binding.ids[at++];
    const int bias = binding.ids[at++];
    return relu(g, conv2d(g, x, w, bias, 1, 1));
  };

  const std::size_t D = net.config.depth;
  std::vector<int> skips;
  int x = input;
  for (std::size_t level = 1; level < D; ++level) {
    x = conv_relu(conv_relu(x));
    skips.push_back(x);
    x = maxpool2d(g, x);
  }
  x = conv_relu(conv_relu(x));
  for (std::size_t level = D - 1; level >= 1; --level) {
    const int w = binding.ids[at++];
    x = transposed_conv2d(g, x, w);
    x = concat_channels(g, skips[level - 1], x);
    x = conv_relu(conv_relu(x));
  }
  return x;
}

}  // namespace tsunet
