#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tsunet/core/graph.hpp"
#include "tsunet/core/ops.hpp"

namespace tsunet {

// Log-loss probability clamp; keeps losses finite on saturated predictions.
template <typename T>
inline constexpr T kProbClamp = static_cast<T>(1e-7);

// Soft dice loss 1 - (2*sum(p*g) + eps) / (sum(p) + sum(g) + eps), averaged
// over batch items and, for multi-class predictions, over foreground classes
// (class 0 is background). pred is [B,1,H,W] or [B,N,H,W] probabilities,
// target the same-shape binary/one-hot tensor.
template <typename T>
int dice_loss(Graph<T>& g, int pred, const Tensor<T>& target, T eps = T(1e-6)) {
  const Tensor<T>& p = g.value(pred);
  if (p.rank() != 4) throw ShapeError("dice_loss: pred must be 4-D");
  require_same_shape(p, target, "dice_loss");
  const std::size_t B = p.dim(0), N = p.dim(1), HW = p.dim(2) * p.dim(3);
  const std::size_t c_lo = N == 1 ? 0 : 1;
  const std::size_t groups = B * (N - c_lo);

  // Per-group overlap A = sum(p*g) and size S = sum(p) + sum(g).
  std::vector<T> overlap(groups), size_sum(groups);
  T loss = T(0);
  std::size_t k = 0;
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t c = c_lo; c < N; ++c, ++k) {
      const T* pp = p.data.data() + (b * N + c) * HW;
      const T* gg = target.data.data() + (b * N + c) * HW;
      T a = T(0), s = T(0);
      for (std::size_t i = 0; i < HW; ++i) {
        a += pp[i] * gg[i];
        s += pp[i] + gg[i];
      }
      overlap[k] = a;
      size_sum[k] = s;
      loss += T(1) - (T(2) * a + eps) / (s + eps);
    }
  loss /= static_cast<T>(groups);

  auto backward = [=](Graph<T>& gr, int id) {
    const T go = gr.grad(id).data[0];
    Tensor<T>& gp = gr.grad(pred);
    std::size_t kk = 0;
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t c = c_lo; c < N; ++c, ++kk) {
        const T* gg = target.data.data() + (b * N + c) * HW;
        T* out = gp.data.data() + (b * N + c) * HW;
        const T denom = size_sum[kk] + eps;
        const T a2 = T(2) * overlap[kk] + eps;
        const T scale_ = go / static_cast<T>(groups);
        for (std::size_t i = 0; i < HW; ++i)
          out[i] += scale_ * (a2 - T(2) * gg[i] * denom) / (denom * denom);
      }
  };
  return g.push(Tensor<T>::scalar(loss), {pred}, backward);
}

// Mean binary cross-entropy over all elements, probabilities clamped to
// [1e-7, 1-1e-7]. Clamped elements get zero gradient.
template <typename T>
int bce_loss(Graph<T>& g, int pred, const Tensor<T>& target) {
  const Tensor<T>& p = g.value(pred);
  require_same_shape(p, target, "bce_loss");
  const T lo = kProbClamp<T>, hi = T(1) - kProbClamp<T>;
  const std::size_t n = p.numel();
  T loss = T(0);
  for (std::size_t i = 0; i < n; ++i) {
    const T pc = std::clamp(p.data[i], lo, hi);
    loss -= target.data[i] * std::log(pc) + (T(1) - target.data[i]) * std::log(T(1) - pc);
  }
  loss /= static_cast<T>(n);

  auto backward = [=](Graph<T>& gr, int id) {
    const T go = gr.grad(id).data[0] / static_cast<T>(n);
    const Tensor<T>& pv = gr.value(pred);
    Tensor<T>& gp = gr.grad(pred);
    for (std::size_t i = 0; i < n; ++i) {
      const T pi = pv.data[i];
      if (pi < lo || pi > hi) continue;
      gp.data[i] += go * (-target.data[i] / pi + (T(1) - target.data[i]) / (T(1) - pi));
    }
  };
  return g.push(Tensor<T>::scalar(loss), {pred}, backward);
}

// Weighted multi-class cross-entropy on per-pixel class probabilities
// [B,N,H,W] against class-index targets (B*H*W). Empty weights = uniform.
template <typename T>
int ce_loss(Graph<T>& g, int pred, const std::vector<std::uint8_t>& target,
            std::vector<T> class_weights = {}) {
  const Tensor<T>& p = g.value(pred);
  if (p.rank() != 4) throw ShapeError("ce_loss: pred must be [B,N,H,W]");
  const std::size_t B = p.dim(0), N = p.dim(1), HW = p.dim(2) * p.dim(3);
  if (N < 2) throw ShapeError("ce_loss: needs N >= 2 classes, got " + std::to_string(N));
  if (target.size() != B * HW)
    throw ShapeError("ce_loss: target has " + std::to_string(target.size()) +
                     " entries, expected " + std::to_string(B * HW));
  if (class_weights.empty()) class_weights.assign(N, T(1));
  if (class_weights.size() != N)
    throw ShapeError("ce_loss: expected " + std::to_string(N) + " class weights");
  for (std::uint8_t t : target)
    if (t >= N)
      throw ShapeError("ce_loss: class index " + std::to_string(int(t)) +
                       " out of range [0," + std::to_string(N) + ")");

  const T lo = kProbClamp<T>, hi = T(1) - kProbClamp<T>;
  const std::size_t n = B * HW;
  T loss = T(0);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t i = 0; i < HW; ++i) {
      const std::uint8_t t = target[b * HW + i];
      const T pc = std::clamp(p.data[(b * N + t) * HW + i], lo, hi);
      loss -= class_weights[t] * std::log(pc);
    }
  loss /= static_cast<T>(n);

  auto backward = [=](Graph<T>& gr, int id) {
    const T go = gr.grad(id).data[0] / static_cast<T>(n);
    const Tensor<T>& pv = gr.value(pred);
    Tensor<T>& gp = gr.grad(pred);
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t i = 0; i < HW; ++i) {
        const std::uint8_t t = target[b * HW + i];
        const T pi = pv.data[(b * N + t) * HW + i];
        if (pi < lo || pi > hi) continue;
        gp.data[(b * N + t) * HW + i] -= go * class_weights[t] / pi;
      }
  };
  return g.push(Tensor<T>::scalar(loss), {pred}, backward);
}

// L_total = alpha * L_dice + (1-alpha) * L_pixel; endpoints are exact.
template <typename T>
int total_loss(Graph<T>& g, T alpha, int l_dice, int l_pixel) {
  if (!(alpha >= T(0) && alpha <= T(1)))
    throw ShapeError("total_loss: alpha must be in [0,1], got " + std::to_string(double(alpha)));
  return axpby(g, alpha, l_dice, T(1) - alpha, l_pixel);
}

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double l_dice = 0, l_pixel = 0, l_total = 0;
  double alpha = 0;
};

struct LossHistory {
  std::vector<EpochRecord> records;
};

// alpha = |dL_bce| / (|dL_bce| + |dL_dice|) over the two most recent epoch
// means, clamped to [0,1]; when both deltas vanish the previous alpha is kept.
inline double estimate_alpha(const LossHistory& history) {
  if (history.records.size() < 2)
    throw NumericError("estimate_alpha: warm-up incomplete, need >= 2 epochs, have " +
                       std::to_string(history.records.size()));
  const EpochRecord& prev = history.records[history.records.size() - 2];
  const EpochRecord& last = history.records.back();
  const double d_pixel = std::abs(last.l_pixel - prev.l_pixel);
  const double d_dice = std::abs(last.l_dice - prev.l_dice);
  if (d_pixel < 1e-12 && d_dice < 1e-12) return last.alpha;
  return std::clamp(d_pixel / (d_pixel + d_dice), 0.0, 1.0);
}

// One-hot encode class-index masks as [B,N,H,W] targets.
template <typename T>
Tensor<T> one_hot(const std::vector<std::uint8_t>& mask, std::size_t B, std::size_t N,
                  std::size_t H, std::size_t W) {
  if (mask.size() != B * H * W) throw ShapeError("one_hot: mask size mismatch");
  Tensor<T> out({B, N, H, W});
  const std::size_t HW = H * W;
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t i = 0; i < HW; ++i) {
      const std::uint8_t c = mask[b * HW + i];
      if (c >= N)
        throw ShapeError("one_hot: class index " + std::to_string(int(c)) +
                         " out of range [0," + std::to_string(N) + ")");
      out.data[(b * N + c) * HW + i] = T(1);
    }
  return out;
}

// Binary target [B,1,H,W] from a {0,1} mask.
template <typename T>
Tensor<T> binary_target(const std::vector<std::uint8_t>& mask, std::size_t B, std::size_t H,
                        std::size_t W) {
  if (mask.size() != B * H * W) throw ShapeError("binary_target: mask size mismatch");
  Tensor<T> out({B, 1, H, W});
  for (std::size_t i = 0; i < mask.size(); ++i) out.data[i] = mask[i] ? T(1) : T(0);
  return out;
}

}  // namespace tsunet
