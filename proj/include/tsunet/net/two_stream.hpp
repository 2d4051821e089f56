#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tsunet/data/patches.hpp"
#include "tsunet/gvf/gvf.hpp"
#include "tsunet/net/stream.hpp"

namespace tsunet {

// Two StreamNets (intensity input and GVF input) joined by convolution
// fusion: channel concatenation followed by a learned 1x1 convolution
// projecting M = 2*base_channels features to N class logits.
template <typename T>
struct TwoStreamModel {
  StreamNet<T> spatial;
  StreamNet<T> vector_stream;
  Tensor<T> fusion_weight;  // [N, M, 1, 1]
  Tensor<T> fusion_bias;    // [N]
  std::size_t num_classes = 1;

  std::size_t fused_channels() const {
    return spatial.config.base_channels + vector_stream.config.base_channels;
  }
};

template <typename T>
TwoStreamModel<T> build_two_stream(const StreamConfig& spatial_cfg, std::size_t num_classes,
                                   std::uint64_t seed) {
  if (num_classes < 1) throw ShapeError("build_two_stream: num_classes must be >= 1");
  StreamConfig vector_cfg = spatial_cfg;
  vector_cfg.in_channels = 2;  // GVF planes (u,v)
  TwoStreamModel<T> m;
  m.spatial = build_stream<T>(spatial_cfg, seed);
  m.vector_stream = build_stream<T>(vector_cfg, seed + 1);
  m.num_classes = num_classes;
  const std::size_t M = m.fused_channels();
  std::mt19937_64 rng(seed + 2);
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / double(M)));
  m.fusion_weight = Tensor<T>({num_classes, M, 1, 1});
  for (T& v : m.fusion_weight.data) v = static_cast<T>(dist(rng));
  m.fusion_bias = Tensor<T>({num_classes});
  return m;
}

// Visits every parameter as (name, tensor) in canonical order: spatial
// stream, vector stream, fusion filter, fusion bias.
template <typename T, typename Fn>
void for_each_param(TwoStreamModel<T>& m, Fn&& fn) {
  for (auto& p : m.spatial.params) fn("spatial." + p.name, p.value);
  for (auto& p : m.vector_stream.params) fn("vector." + p.name, p.value);
  fn(std::string("fusion.weight"), m.fusion_weight);
  fn(std::string("fusion.bias"), m.fusion_bias);
}

template <typename T, typename Fn>
void for_each_param(const TwoStreamModel<T>& m, Fn&& fn) {
  for (const auto& p : m.spatial.params) fn("spatial." + p.name, p.value);
  for (const auto& p : m.vector_stream.params) fn("vector." + p.name, p.value);
  fn(std::string("fusion.weight"), m.fusion_weight);
  fn(std::string("fusion.bias"), m.fusion_bias);
}

template <typename T>
std::size_t param_count(const TwoStreamModel<T>& m) {
  std::size_t n = 0;
  for_each_param(m, [&](const std::string&, const Tensor<T>& t) { n += t.numel(); });
  return n;
}

struct ModelBinding {
  StreamBinding spatial;
  StreamBinding vector_stream;
  int fusion_weight = -1;
  int fusion_bias = -1;
};

template <typename T>
ModelBinding bind_model(Graph<T>& g, const TwoStreamModel<T>& m, bool requires_grad) {
  ModelBinding b;
  b.spatial = bind_stream(g, m.spatial, requires_grad);
  b.vector_stream = bind_stream(g, m.vector_stream, requires_grad);
  b.fusion_weight = g.leaf(m.fusion_weight, requires_grad);
  b.fusion_bias = g.leaf(m.fusion_bias, requires_grad);
  return b;
}

// Convolution fusion (1x1): logits = concat(xs, xv) * f + b, a per-pixel
// affine map from M stacked features to N classes.
template <typename T>
int fuse(Graph<T>& g, int xs, int xv, int fusion_weight, int fusion_bias) {
  const std::size_t Cs = g.value(xs).dim(1), Cv = g.value(xv).dim(1);
  const std::size_t M = g.value(fusion_weight).dim(1);
  if (Cs + Cv != M)
    throw ShapeError("fuse: fusion filter expects M=" + std::to_string(M) +
                     " channels, streams provide " + std::to_string(Cs) + "+" +
                     std::to_string(Cv));
  const int cat = concat_channels(g, xs, xv);
  return conv2d(g, cat, fusion_weight, fusion_bias, 1, 0);
}

template <typename T>
int two_stream_logits(Graph<T>& g, const TwoStreamModel<T>& m, const ModelBinding& b,
                      int image, int gvf_input) {
  const Tensor<T>& img = g.value(image);
  const Tensor<T>& vec = g.value(gvf_input);
  if (img.rank() != 4 || vec.rank() != 4 || img.dim(0) != vec.dim(0) ||
      img.dim(2) != vec.dim(2) || img.dim(3) != vec.dim(3))
    throw ShapeError("two_stream: image " + shape_str(img.shape) + " and gvf " +
                     shape_str(vec.shape) + " are not spatially aligned");
  const int xs = stream_forward(g, m.spatial, b.spatial, image);
  const int xv = stream_forward(g, m.vector_stream, b.vector_stream, gvf_input);
  return fuse(g, xs, xv, b.fusion_weight, b.fusion_bias);
}

// Probabilities: sigmoid for N=1, per-pixel channel softmax for N>1.
template <typename T>
int two_stream_forward(Graph<T>& g, const TwoStreamModel<T>& m, const ModelBinding& b,
                       int image, int gvf_input) {
  const int logits = two_stream_logits(g, m, b, image, gvf_input);
  return m.num_classes == 1 ? sigmoid(g, logits) : softmax_channels(g, logits);
}

enum class Aggregate { none, vote, mean };

// Hard labels from probabilities [N,H,W]; argmax ties and the binary 0.5
// threshold both resolve to the lowest class index.
template <typename T>
std::vector<std::uint8_t> probabilities_to_labels(const Tensor<T>& probs) {
  const std::size_t N = probs.dim(0), HW = probs.dim(1) * probs.dim(2);
  std::vector<std::uint8_t> out(HW, 0);
  if (N == 1) {
    for (std::size_t i = 0; i < HW; ++i) out[i] = probs.data[i] > T(0.5) ? 1 : 0;
  } else {
    for (std::size_t i = 0; i < HW; ++i) {
      T best = probs.data[i];
      std::uint8_t cls = 0;
      for (std::size_t c = 1; c < N; ++c)
        if (probs.data[c * HW + i] > best) {
          best = probs.data[c * HW + i];
          cls = static_cast<std::uint8_t>(c);
        }
      out[i] = cls;
    }
  }
  return out;
}

template <typename T>
struct PatchedPrediction {
  std::vector<std::uint8_t> labels;  // H*W class mask
  std::size_t height = 0, width = 0;
};

// Sliding-window inference over a full-size image with a precomputed
// full-image GVF field. The patch is clamped per axis when the image is
// smaller; the final row/column of patches is clamped to the border.
//   none: tile-and-stitch (overwrite, row-major order)
//   vote: per-pixel majority over overlapping hard predictions
//   mean: average probabilities over overlaps, then take labels
template <typename T>
PatchedPrediction<T> predict_patched(const TwoStreamModel<T>& model,
                                     const Tensor<T>& image, const GvfField<T>& gvf,
                                     std::size_t patch, std::size_t stride,
                                     Aggregate aggregate) {
  if (image.rank() != 3) throw ShapeError("predict_patched: image must be [C,H,W]");
  const std::size_t H = image.dim(1), W = image.dim(2);
  if (gvf.height() != H || gvf.width() != W)
    throw ShapeError("predict_patched: GVF field size mismatch");
  if (stride < 1 || stride > patch)
    throw ShapeError("predict_patched: stride must be in [1, patch]");
  const std::size_t ph = std::min(patch, H), pw = std::min(patch, W);
  const Tensor<T> vec = field_to_tensor(gvf);

  Graph<T> g;
  const ModelBinding binding = bind_model(g, model, /*requires_grad=*/false);
  const int mark = g.size();

  const auto grid = patch_grid(H, W, patch, stride);
  const std::size_t n_classes = std::max<std::size_t>(model.num_classes, 2);
  std::vector<std::vector<std::uint8_t>> label_patches;
  std::vector<Tensor<T>> prob_patches;
  for (const auto& o : grid) {
    Tensor<T> ip = crop_chw(image, o.y, o.x, ph, pw);
    Tensor<T> vp = crop_chw(vec, o.y, o.x, ph, pw);
    ip.shape = {1, image.dim(0), ph, pw};
    vp.shape = {1, 2, ph, pw};
    const int probs_id = two_stream_forward(g, model, binding,
                                            g.leaf(std::move(ip)), g.leaf(std::move(vp)));
    Tensor<T> probs = g.value(probs_id);
    g.truncate(mark);
    probs.shape = {model.num_classes, ph, pw};
    if (aggregate == Aggregate::mean)
      prob_patches.push_back(std::move(probs));
    else
      label_patches.push_back(probabilities_to_labels(probs));
  }

  PatchedPrediction<T> out;
  out.height = H;
  out.width = W;
  if (aggregate == Aggregate::mean) {
    // For N=1 average the foreground probability, then threshold.
    Tensor<T> merged = stitch_mean_patches(prob_patches, grid, H, W);
    out.labels = probabilities_to_labels(merged);
  } else {
    out.labels = stitch_label_patches(
        label_patches, grid, ph, pw, H, W,
        aggregate == Aggregate::vote ? StitchReduce::vote : StitchReduce::overwrite,
        n_classes);
  }
  return out;
}

}  // namespace tsunet
