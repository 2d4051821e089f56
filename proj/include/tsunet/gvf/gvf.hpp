#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "tsunet/core/tensor.hpp"

namespace tsunet {

// Scalar edge function of an image, large near boundaries. values is [H,W]
// with entries in [0,1].
template <typename T>
struct EdgeMap {
  Tensor<T> values;
  std::size_t height() const { return values.dim(0); }
  std::size_t width() const { return values.dim(1); }
};

struct GvfParams {
  double mu = 0.2;              // diffusion regularization coefficient
  std::size_t iterations = 80;  // number of explicit Euler steps
  double dt = 0.0;              // 0 = auto: min(1, 1/(4*mu))
  double smoothing_sigma = 1.0; // Gaussian width (px) for edge-map preprocessing

  double resolved_dt() const { return dt > 0.0 ? dt : std::min(1.0, 1.0 / (4.0 * mu)); }

  void validate() const {
    if (!(mu > 0.0)) throw ShapeError("GvfParams: mu must be positive");
    if (iterations < 1) throw ShapeError("GvfParams: iterations must be >= 1");
    // Explicit-scheme stability bound for the diffusion term.
    if (resolved_dt() > 1.0 / (4.0 * mu) + 1e-12)
      throw NumericError("GvfParams: dt=" + std::to_string(resolved_dt()) +
                         " exceeds the stability bound 1/(4*mu)=" +
                         std::to_string(1.0 / (4.0 * mu)) +
                         "; refusing to run an unstable scheme");
  }
};

// V(x,y) = [u(x,y), v(x,y)]: u is the x- (column-) component, v the y- (row-)
// component. Planes are [H,W].
template <typename T>
struct GvfField {
  Tensor<T> u, v;
  GvfParams params;
  T residual = T(0);

  std::size_t height() const { return u.dim(0); }
  std::size_t width() const { return u.dim(1); }
};

enum class GvfNormalize { none, max_magnitude, unit };

// Separable Gaussian blur with replicated borders; sigma <= 0 is a no-op.
template <typename T>
Tensor<T> gaussian_smooth(const Tensor<T>& plane, double sigma) {
  if (plane.rank() != 2) throw ShapeError("gaussian_smooth: plane must be 2-D");
  if (sigma <= 0.0) return plane;
  const long H = static_cast<long>(plane.dim(0));
  const long W = static_cast<long>(plane.dim(1));
  const long radius = std::max(1L, static_cast<long>(std::ceil(3.0 * sigma)));
  std::vector<T> kernel(static_cast<std::size_t>(2 * radius + 1));
  double norm = 0.0;
  for (long k = -radius; k <= radius; ++k) {
    const double w = std::exp(-0.5 * (k / sigma) * (k / sigma));
    kernel[static_cast<std::size_t>(k + radius)] = static_cast<T>(w);
    norm += w;
  }
  for (T& w : kernel) w = static_cast<T>(w / norm);

  Tensor<T> tmp(plane.shape);
  for (long r = 0; r < H; ++r)
    for (long c = 0; c < W; ++c) {
      T acc = T(0);
      for (long k = -radius; k <= radius; ++k) {
        const long cc = std::clamp(c + k, 0L, W - 1);
        acc += kernel[static_cast<std::size_t>(k + radius)] *
               plane.data[static_cast<std::size_t>(r * W + cc)];
      }
      tmp.data[static_cast<std::size_t>(r * W + c)] = acc;
    }
  Tensor<T> out(plane.shape);
  for (long r = 0; r < H; ++r)
    for (long c = 0; c < W; ++c) {
      T acc = T(0);
      for (long k = -radius; k <= radius; ++k) {
        const long rr = std::clamp(r + k, 0L, H - 1);
        acc += kernel[static_cast<std::size_t>(k + radius)] *
               tmp.data[static_cast<std::size_t>(rr * W + c)];
      }
      out.data[static_cast<std::size_t>(r * W + c)] = acc;
    }
  return out;
}

// Central differences in the interior, one-sided on the borders.
// fx is the x- (column-) derivative, fy the y- (row-) derivative.
template <typename T>
std::pair<Tensor<T>, Tensor<T>> spatial_gradient(const Tensor<T>& plane) {
  if (plane.rank() != 2) throw ShapeError("spatial_gradient: plane must be 2-D");
  const std::size_t H = plane.dim(0), W = plane.dim(1);
  if (H < 2 || W < 2) throw ShapeError("spatial_gradient: plane must be at least 2x2");
  Tensor<T> fx(plane.shape), fy(plane.shape);
  const T* p = plane.data.data();
  for (std::size_t r = 0; r < H; ++r) {
    const T* row = p + r * W;
    T* gx = fx.data.data() + r * W;
    gx[0] = row[1] - row[0];
    for (std::size_t c = 1; c + 1 < W; ++c) gx[c] = (row[c + 1] - row[c - 1]) / T(2);
    gx[W - 1] = row[W - 1] - row[W - 2];
  }
  for (std::size_t c = 0; c < W; ++c) {
    fy.data[c] = p[W + c] - p[c];
    for (std::size_t r = 1; r + 1 < H; ++r)
      fy.data[r * W + c] = (p[(r + 1) * W + c] - p[(r - 1) * W + c]) / T(2);
    fy.data[(H - 1) * W + c] = p[(H - 1) * W + c] - p[(H - 2) * W + c];
  }
  return {std::move(fx), std::move(fy)};
}

// Gaussian-smoothed squared gradient magnitude, max-normalized to [0,1].
// An all-constant image yields the all-zero map.
template <typename T>
EdgeMap<T> edge_map(const Tensor<T>& image, double sigma) {
  if (image.rank() != 2) throw ShapeError("edge_map: image must be a 2-D plane");
  if (image.dim(0) < 3 || image.dim(1) < 3)
    throw ShapeError("edge_map: degenerate image, need at least 3x3, got " +
                     shape_str(image.shape));
  Tensor<T> smooth = gaussian_smooth(image, sigma);
  auto [fx, fy] = spatial_gradient(smooth);
  Tensor<T> e(image.shape);
  T mx = T(0);
  for (std::size_t i = 0; i < e.numel(); ++i) {
    e.data[i] = fx.data[i] * fx.data[i] + fy.data[i] * fy.data[i];
    mx = std::max(mx, e.data[i]);
  }
  if (mx > T(0))
    for (T& v : e.data) v /= mx;
  return EdgeMap<T>{std::move(e)};
}

namespace detail {

// 5-point Laplacian with replicated (Neumann) borders.
template <typename T>
T laplacian_at(const T* p, std::size_t H, std::size_t W, std::size_t r, std::size_t c) {
  const T center = p[r * W + c];
  const T n = (r > 0) ? p[(r - 1) * W + c] : center;
  const T s = (r + 1 < H) ? p[(r + 1) * W + c] : center;
  const T w = (c > 0) ? p[r * W + c - 1] : center;
  const T e = (c + 1 < W) ? p[r * W + c + 1] : center;
  return n + s + w + e - T(4) * center;
}

}  // namespace detail

// RMS Euler-Lagrange residual of the GVF stationarity condition
// mu*lap(u) - (u - fx)*(fx^2+fy^2) = 0, pooled over both component planes.
template <typename T>
T gvf_residual(const Tensor<T>& u, const Tensor<T>& v, const EdgeMap<T>& edge, double mu) {
  require_same_shape(u, edge.values, "gvf_residual");
  require_same_shape(v, edge.values, "gvf_residual");
  const std::size_t H = edge.height(), W = edge.width();
  auto [fx, fy] = spatial_gradient(edge.values);
  long double acc = 0.0L;
  for (std::size_t r = 0; r < H; ++r)
    for (std::size_t c = 0; c < W; ++c) {
      const std::size_t i = r * W + c;
      const T b = fx.data[i] * fx.data[i] + fy.data[i] * fy.data[i];
      const T ru = static_cast<T>(mu) * detail::laplacian_at(u.data.data(), H, W, r, c) -
                   (u.data[i] - fx.data[i]) * b;
      const T rv = static_cast<T>(mu) * detail::laplacian_at(v.data.data(), H, W, r, c) -
                   (v.data[i] - fy.data[i]) * b;
      acc += static_cast<long double>(ru) * ru + static_cast<long double>(rv) * rv;
    }
  return static_cast<T>(std::sqrt(static_cast<double>(acc / (2.0L * H * W))));
}

template <typename T>
T gvf_residual(const GvfField<T>& field, const EdgeMap<T>& edge, double mu) {
  return gvf_residual(field.u, field.v, edge, mu);
}

// Explicit Euler iteration of the GVF diffusion equations, Jacobi style: each
// step reads only the previous iterate, so row-parallel evaluation is
// bit-identical to the sequential sweep.
template <typename T>
GvfField<T> gvf_solve(const EdgeMap<T>& edge, const GvfParams& params) {
  params.validate();
  const std::size_t H = edge.height(), W = edge.width();
  auto [fx, fy] = spatial_gradient(edge.values);
  Tensor<T> b(edge.values.shape);
  for (std::size_t i = 0; i < b.numel(); ++i)
    b.data[i] = fx.data[i] * fx.data[i] + fy.data[i] * fy.data[i];

  const T mu = static_cast<T>(params.mu);
  const T dt = static_cast<T>(params.resolved_dt());
  Tensor<T> u = fx, v = fy;
  Tensor<T> un(u.shape), vn(v.shape);
  for (std::size_t it = 0; it < params.iterations; ++it) {
    for (std::size_t r = 0; r < H; ++r)
      for (std::size_t c = 0; c < W; ++c) {
        const std::size_t i = r * W + c;
        un.data[i] = u.data[i] + dt * (mu * detail::laplacian_at(u.data.data(), H, W, r, c) -
                                       (u.data[i] - fx.data[i]) * b.data[i]);
        vn.data[i] = v.data[i] + dt * (mu * detail::laplacian_at(v.data.data(), H, W, r, c) -
                                       (v.data[i] - fy.data[i]) * b.data[i]);
      }
    std::swap(u, un);
    std::swap(v, vn);
  }

  GvfField<T> field{std::move(u), std::move(v), params, T(0)};
  field.residual = gvf_residual(field, edge, params.mu);
  return field;
}

template <typename T>
GvfField<T> normalize_field(const GvfField<T>& field, GvfNormalize mode) {
  GvfField<T> out = field;
  switch (mode) {
    case GvfNormalize::none:
      break;
    case GvfNormalize::max_magnitude: {
      T mx = T(0);
      for (std::size_t i = 0; i < out.u.numel(); ++i)
        mx = std::max(mx, static_cast<T>(std::sqrt(out.u.data[i] * out.u.data[i] +
                                                   out.v.data[i] * out.v.data[i])));
      if (mx > T(0))
        for (std::size_t i = 0; i < out.u.numel(); ++i) {
          out.u.data[i] /= mx;
          out.v.data[i] /= mx;
        }
      break;
    }
    case GvfNormalize::unit: {
      const T eps = static_cast<T>(1e-8);
      for (std::size_t i = 0; i < out.u.numel(); ++i) {
        const T mag = static_cast<T>(
            std::sqrt(out.u.data[i] * out.u.data[i] + out.v.data[i] * out.v.data[i]));
        if (mag > eps) {
          out.u.data[i] /= mag;
          out.v.data[i] /= mag;
        } else {
          out.u.data[i] = T(0);
          out.v.data[i] = T(0);
        }
      }
      break;
    }
  }
  return out;
}

// Stacks the field as the 2-channel vector-stream input [2,H,W]: u first.
template <typename T>
Tensor<T> field_to_tensor(const GvfField<T>& field) {
  const std::size_t H = field.height(), W = field.width();
  Tensor<T> out({2, H, W});
  std::copy(field.u.data.begin(), field.u.data.end(), out.data.begin());
  std::copy(field.v.data.begin(), field.v.data.end(), out.data.begin() + H * W);
  return out;
}

// Full pipeline from a grayscale plane in [0,1] to the vector-stream input.
template <typename T>
GvfField<T> compute_gvf(const Tensor<T>& image, const GvfParams& params,
                        GvfNormalize normalize = GvfNormalize::max_magnitude) {
  EdgeMap<T> e = edge_map(image, params.smoothing_sigma);
  GvfField<T> field = gvf_solve(e, params);
  return normalize_field(field, normalize);
}

}  // namespace tsunet
