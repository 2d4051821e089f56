#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tsunet/core/tensor.hpp"
#include "tsunet/gvf/gvf.hpp"

namespace tsunet {

// Lossless geometric augmentations: quarter rotations (square inputs only)
// and mirror flips. rot90 is counter-clockwise: out(r,c) = in(c, N-1-r).
enum class AugmentOp : std::uint8_t { none, rot90, rot180, rot270, flip_h, flip_v };

inline const char* augment_name(AugmentOp op) {
  switch (op) {
    case AugmentOp::none: return "none";
    case AugmentOp::rot90: return "rot90";
    case AugmentOp::rot180: return "rot180";
    case AugmentOp::rot270: return "rot270";
    case AugmentOp::flip_h: return "flip_h";
    case AugmentOp::flip_v: return "flip_v";
  }
  return "?";
}

namespace detail {

inline void check_square(std::size_t H, std::size_t W, AugmentOp op) {
  if ((op == AugmentOp::rot90 || op == AugmentOp::rot270) && H != W)
    throw ShapeError(std::string("augment: ") + augment_name(op) +
                     " requires a square image, got " + std::to_string(H) + "x" +
                     std::to_string(W));
}

// Index map: source (r,c) for output (r,c).
template <typename Get, typename Set>
void apply_index_map(std::size_t H, std::size_t W, AugmentOp op, Get get, Set set) {
  for (std::size_t r = 0; r < H; ++r)
    for (std::size_t c = 0; c < W; ++c) {
      std::size_t sr = r, sc = c;
      switch (op) {
        case AugmentOp::none: break;
        case AugmentOp::rot90: sr = c, sc = W - 1 - r; break;
        case AugmentOp::rot180: sr = H - 1 - r, sc = W - 1 - c; break;
        case AugmentOp::rot270: sr = H - 1 - c, sc = r; break;
        case AugmentOp::flip_h: sc = W - 1 - c; break;
        case AugmentOp::flip_v: sr = H - 1 - r; break;
      }
      set(r, c, get(sr, sc));
    }
}

}  // namespace detail

template <typename T>
Tensor<T> transform_plane(const Tensor<T>& plane, AugmentOp op) {
  if (plane.rank() != 2) throw ShapeError("transform_plane: expected [H,W]");
  const std::size_t H = plane.dim(0), W = plane.dim(1);
  detail::check_square(H, W, op);
  Tensor<T> out(plane.shape);
  detail::apply_index_map(
      H, W, op, [&](std::size_t r, std::size_t c) { return plane.data[r * W + c]; },
      [&](std::size_t r, std::size_t c, T v) { out.data[r * W + c] = v; });
  return out;
}

template <typename T>
Tensor<T> transform_chw(const Tensor<T>& t, AugmentOp op) {
  if (t.rank() != 3) throw ShapeError("transform_chw: expected [C,H,W]");
  const std::size_t C = t.dim(0), H = t.dim(1), W = t.dim(2);
  detail::check_square(H, W, op);
  Tensor<T> out(t.shape);
  for (std::size_t ch = 0; ch < C; ++ch)
    detail::apply_index_map(
        H, W, op,
        [&](std::size_t r, std::size_t c) { return t.data[(ch * H + r) * W + c]; },
        [&](std::size_t r, std::size_t c, T v) { out.data[(ch * H + r) * W + c] = v; });
  return out;
}

inline std::vector<std::uint8_t> transform_mask(const std::vector<std::uint8_t>& mask,
                                                std::size_t H, std::size_t W, AugmentOp op) {
  detail::check_square(H, W, op);
  std::vector<std::uint8_t> out(mask.size());
  detail::apply_index_map(
      H, W, op, [&](std::size_t r, std::size_t c) { return mask[r * W + c]; },
      [&](std::size_t r, std::size_t c, std::uint8_t v) { out[r * W + c] = v; });
  return out;
}

// Transforms a GVF field geometrically, remixing the (u,v) components so the
// vectors keep pointing at the transformed edges:
//   flip_h: (u,v) -> (-u, v)    flip_v: (u,v) -> (u, -v)
//   rot90:  (u,v) -> (v, -u)    rot270: (u,v) -> (-v, u)    rot180: (-u, -v)
// where the component planes are index-mapped like the image.
template <typename T>
GvfField<T> transform_gvf(const GvfField<T>& field, AugmentOp op) {
  GvfField<T> out = field;
  const Tensor<T> u = transform_plane(field.u, op);
  const Tensor<T> v = transform_plane(field.v, op);
  switch (op) {
    case AugmentOp::none:
      out.u = u, out.v = v;
      break;
    case AugmentOp::flip_h:
      out.u = u, out.v = v;
      for (T& x : out.u.data) x = -x;
      break;
    case AugmentOp::flip_v:
      out.u = u, out.v = v;
      for (T& x : out.v.data) x = -x;
      break;
    case AugmentOp::rot180:
      out.u = u, out.v = v;
      for (T& x : out.u.data) x = -x;
      for (T& x : out.v.data) x = -x;
      break;
    case AugmentOp::rot90:
      out.u = v, out.v = u;
      for (T& x : out.v.data) x = -x;
      break;
    case AugmentOp::rot270:
      out.u = v, out.v = u;
      for (T& x : out.u.data) x = -x;
      break;
  }
  return out;
}

}  // namespace tsunet
