#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "tsunet/core/tensor.hpp"

namespace tsunet {

// Sliding-window origins along one axis: multiples of stride while the patch
// fits, plus a final origin clamped to the border so coverage is complete.
inline std::vector<std::size_t> patch_origins(std::size_t size, std::size_t patch,
                                              std::size_t stride) {
  if (stride < 1) throw ShapeError("patch_origins: stride must be >= 1");
  if (patch >= size) return {0};
  std::vector<std::size_t> origins;
  for (std::size_t o = 0; o + patch <= size; o += stride) origins.push_back(o);
  if (origins.back() + patch < size) origins.push_back(size - patch);
  return origins;
}

struct PatchOrigin {
  std::size_t y = 0, x = 0;
};

// Row-major enumeration of patch origins over a 2-D domain. The patch is
// clamped per axis when the image is smaller than the requested size.
inline std::vector<PatchOrigin> patch_grid(std::size_t height, std::size_t width,
                                           std::size_t patch, std::size_t stride) {
  const auto ys = patch_origins(height, patch, stride);
  const auto xs = patch_origins(width, patch, stride);
  std::vector<PatchOrigin> grid;
  grid.reserve(ys.size() * xs.size());
  for (std::size_t y : ys)
    for (std::size_t x : xs) grid.push_back({y, x});
  return grid;
}

template <typename T>
Tensor<T> crop_chw(const Tensor<T>& t, std::size_t oy, std::size_t ox, std::size_t ph,
                   std::size_t pw) {
  if (t.rank() != 3) throw ShapeError("crop_chw: expected [C,H,W]");
  const std::size_t C = t.dim(0), H = t.dim(1), W = t.dim(2);
  if (oy + ph > H || ox + pw > W) throw ShapeError("crop_chw: crop exceeds bounds");
  Tensor<T> out({C, ph, pw});
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t r = 0; r < ph; ++r)
      std::copy_n(t.data.data() + (c * H + oy + r) * W + ox, pw,
                  out.data.data() + (c * ph + r) * pw);
  return out;
}

inline std::vector<std::uint8_t> crop_mask(const std::vector<std::uint8_t>& mask,
                                           std::size_t H, std::size_t W, std::size_t oy,
                                           std::size_t ox, std::size_t ph, std::size_t pw) {
  if (oy + ph > H || ox + pw > W) throw ShapeError("crop_mask: crop exceeds bounds");
  std::vector<std::uint8_t> out(ph * pw);
  for (std::size_t r = 0; r < ph; ++r)
    std::copy_n(mask.data() + (oy + r) * W + ox, pw, out.data() + r * pw);
  return out;
}

enum class StitchReduce { overwrite, vote, mean };

// Reassembles label patches. `overwrite` places patches in the given order
// (later patches win on overlaps); `vote` takes the per-pixel majority with
// ties resolved to the lowest class index. Every output pixel must be covered.
inline std::vector<std::uint8_t> stitch_label_patches(
    const std::vector<std::vector<std::uint8_t>>& patches,
    const std::vector<PatchOrigin>& origins, std::size_t ph, std::size_t pw,
    std::size_t out_h, std::size_t out_w, StitchReduce reduce, std::size_t num_classes) {
  if (patches.size() != origins.size())
    throw ShapeError("stitch_label_patches: patches/origins size mismatch");
  if (reduce == StitchReduce::mean)
    throw ShapeError("stitch_label_patches: mean reduction applies to probabilities");
  std::vector<std::uint8_t> out(out_h * out_w, 0);
  std::vector<std::uint32_t> coverage(out_h * out_w, 0);
  std::vector<std::uint32_t> votes;
  if (reduce == StitchReduce::vote) votes.assign(out_h * out_w * num_classes, 0);

  for (std::size_t p = 0; p < patches.size(); ++p) {
    if (patches[p].size() != ph * pw)
      throw ShapeError("stitch_label_patches: patch size mismatch");
    const auto [oy, ox] = origins[p];
    if (oy + ph > out_h || ox + pw > out_w)
      throw ShapeError("stitch_label_patches: patch exceeds output bounds");
    for (std::size_t r = 0; r < ph; ++r)
      for (std::size_t c = 0; c < pw; ++c) {
        const std::size_t i = (oy + r) * out_w + ox + c;
        const std::uint8_t cls = patches[p][r * pw + c];
        if (cls >= num_classes)
          throw ShapeError("stitch_label_patches: class index out of range");
        coverage[i] += 1;
        if (reduce == StitchReduce::vote)
          votes[i * num_classes + cls] += 1;
        else
          out[i] = cls;
      }
  }
  for (std::size_t i = 0; i < coverage.size(); ++i)
    if (coverage[i] == 0)
      throw ShapeError("stitch_label_patches: uncovered pixel at index " + std::to_string(i));
  if (reduce == StitchReduce::vote) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      std::uint32_t best = votes[i * num_classes];
      std::uint8_t cls = 0;
      for (std::size_t k = 1; k < num_classes; ++k)
        if (votes[i * num_classes + k] > best) {
          best = votes[i * num_classes + k];
          cls = static_cast<std::uint8_t>(k);
        }
      out[i] = cls;
    }
  }
  return out;
}

// Averages probability patches [N,ph,pw] over their coverage; used by the
// `mean` aggregation mode.
template <typename T>
Tensor<T> stitch_mean_patches(const std::vector<Tensor<T>>& patches,
                              const std::vector<PatchOrigin>& origins, std::size_t out_h,
                              std::size_t out_w) {
  if (patches.empty()) throw ShapeError("stitch_mean_patches: no patches");
  if (patches.size() != origins.size())
    throw ShapeError("stitch_mean_patches: patches/origins size mismatch");
  const std::size_t N = patches[0].dim(0);
  const std::size_t ph = patches[0].dim(1), pw = patches[0].dim(2);
  Tensor<T> acc({N, out_h, out_w});
  std::vector<std::uint32_t> coverage(out_h * out_w, 0);
  for (std::size_t p = 0; p < patches.size(); ++p) {
    const auto [oy, ox] = origins[p];
    if (oy + ph > out_h || ox + pw > out_w)
      throw ShapeError("stitch_mean_patches: patch exceeds output bounds");
    for (std::size_t r = 0; r < ph; ++r)
      for (std::size_t c = 0; c < pw; ++c) {
        coverage[(oy + r) * out_w + ox + c] += 1;
        for (std::size_t n = 0; n < N; ++n)
          acc.data[(n * out_h + oy + r) * out_w + ox + c] +=
              patches[p].data[(n * ph + r) * pw + c];
      }
  }
  for (std::size_t i = 0; i < coverage.size(); ++i) {
    if (coverage[i] == 0)
      throw ShapeError("stitch_mean_patches: uncovered pixel at index " + std::to_string(i));
    for (std::size_t n = 0; n < N; ++n)
      acc.data[n * out_h * out_w + i] /= static_cast<T>(coverage[i]);
  }
  return acc;
}

}  // namespace tsunet
