#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "tsunet/core/graph.hpp"

namespace tsunet {

namespace detail {

// Direct cross-correlation, accumulated as scalar-times-row updates so the
// innermost loop vectorizes. out must hold [B,Cout,Ho,Wo].
template <typename T>
void conv2d_forward_kernel(const T* in, std::size_t B, std::size_t Cin, std::size_t H,
                           std::size_t W, const T* w, std::size_t Cout, std::size_t KH,
                           std::size_t KW, const T* bias, std::size_t stride,
                           std::size_t pad, T* out, std::size_t Ho, std::size_t Wo) {
  const long P = static_cast<long>(pad);
  const long S = static_cast<long>(stride);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t co = 0; co < Cout; ++co) {
      T* oplane = out + (b * Cout + co) * Ho * Wo;
      std::fill(oplane, oplane + Ho * Wo, bias ? bias[co] : T(0));
      for (std::size_t ci = 0; ci < Cin; ++ci) {
        const T* iplane = in + (b * Cin + ci) * H * W;
        for (std::size_t kh = 0; kh < KH; ++kh) {
          const long roff = static_cast<long>(kh) - P;
          for (std::size_t kw = 0; kw < KW; ++kw) {
            const T wv = w[((co * Cin + ci) * KH + kh) * KW + kw];
            const long coff = static_cast<long>(kw) - P;
            std::size_t ow_lo = 0;
            if (coff < 0) ow_lo = static_cast<std::size_t>((-coff + S - 1) / S);
            const long wmax = static_cast<long>(W) - 1 - coff;
            if (wmax < 0) continue;
            const std::size_t ow_hi =
                std::min(Wo - 1, static_cast<std::size_t>(wmax / S));
            if (ow_lo > ow_hi) continue;
            for (std::size_t oh = 0; oh < Ho; ++oh) {
              const long ih = static_cast<long>(oh) * S + roff;
              if (ih < 0 || ih >= static_cast<long>(H)) continue;
              const T* irow = iplane + static_cast<std::size_t>(ih) * W;
              T* orow = oplane + oh * Wo;
              for (std::size_t ow = ow_lo; ow <= ow_hi; ++ow)
                orow[ow] += wv * irow[static_cast<std::size_t>(
                                      static_cast<long>(ow) * S + coff)];
            }
          }
        }
      }
    }
  }
}

template <typename T>
void conv2d_backward_input_kernel(T* din, std::size_t B, std::size_t Cin, std::size_t H,
                                  std::size_t W, const T* w, std::size_t Cout,
                                  std::size_t KH, std::size_t KW, std::size_t stride,
                                  std::size_t pad, const T* dout, std::size_t Ho,
                                  std::size_t Wo) {
  const long P = static_cast<long>(pad);
  const long S = static_cast<long>(stride);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t co = 0; co < Cout; ++co) {
      const T* doplane = dout + (b * Cout + co) * Ho * Wo;
      for (std::size_t ci = 0; ci < Cin; ++ci) {
        T* diplane = din + (b * Cin + ci) * H * W;
        for (std::size_t kh = 0; kh < KH; ++kh) {
          const long roff = static_cast<long>(kh) - P;
          for (std::size_t kw = 0; kw < KW; ++kw) {
            const T wv = w[((co * Cin + ci) * KH + kh) * KW + kw];
            const long coff = static_cast<long>(kw) - P;
            std::size_t ow_lo = 0;
            if (coff < 0) ow_lo = static_cast<std::size_t>((-coff + S - 1) / S);
            const long wmax = static_cast<long>(W) - 1 - coff;
            if (wmax < 0) continue;
            const std::size_t ow_hi =
                std::min(Wo - 1, static_cast<std::size_t>(wmax / S));
            if (ow_lo > ow_hi) continue;
            for (std::size_t oh = 0; oh < Ho; ++oh) {
              const long ih = static_cast<long>(oh) * S + roff;
              if (ih < 0 || ih >= static_cast<long>(H)) continue;
              T* dirow = diplane + static_cast<std::size_t>(ih) * W;
              const T* dorow = doplane + oh * Wo;
              for (std::size_t ow = ow_lo; ow <= ow_hi; ++ow)
                dirow[static_cast<std::size_t>(static_cast<long>(ow) * S + coff)] +=
                    wv * dorow[ow];
            }
          }
        }
      }
    }
  }
}

template <typename T>
void conv2d_backward_weight_kernel(const T* in, std::size_t B, std::size_t Cin,
                                   std::size_t H, std::size_t W, T* dw, std::size_t Cout,
                                   std::size_t KH, std::size_t KW, std::size_t stride,
                                   std::size_t pad, const T* dout, std::size_t Ho,
                                   std::size_t Wo) {
  const long P = static_cast<long>(pad);
  const long S = static_cast<long>(stride);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t co = 0; co < Cout; ++co) {
      const T* doplane = dout + (b * Cout + co) * Ho * Wo;
      for (std::size_t ci = 0; ci < Cin; ++ci) {
        const T* iplane = in + (b * Cin + ci) * H * W;
        for (std::size_t kh = 0; kh < KH; ++kh) {
          const long roff = static_cast<long>(kh) - P;
          for (std::size_t kw = 0; kw < KW; ++kw) {
            const long coff = static_cast<long>(kw) - P;
            std::size_t ow_lo = 0;
            if (coff < 0) ow_lo = static_cast<std::size_t>((-coff + S - 1) / S);
            const long wmax = static_cast<long>(W) - 1 - coff;
            if (wmax < 0) continue;
            const std::size_t ow_hi =
                std::min(Wo - 1, static_cast<std::size_t>(wmax / S));
            if (ow_lo > ow_hi) continue;
            T acc = T(0);
            for (std::size_t oh = 0; oh < Ho; ++oh) {
              const long ih = static_cast<long>(oh) * S + roff;
              if (ih < 0 || ih >= static_cast<long>(H)) continue;
              const T* irow = iplane + static_cast<std::size_t>(ih) * W;
              const T* dorow = doplane + oh * Wo;
              for (std::size_t ow = ow_lo; ow <= ow_hi; ++ow)
                acc += dorow[ow] * irow[static_cast<std::size_t>(
                                       static_cast<long>(ow) * S + coff)];
            }
            dw[((co * Cin + ci) * KH + kh) * KW + kw] += acc;
          }
        }
      }
    }
  }
}

}  // namespace detail

// 2-D cross-correlation with per-channel bias.
// input [B,Cin,H,W], weight [Cout,Cin,KH,KW], bias [Cout].
template <typename T>
int conv2d(Graph<T>& g, int input, int weight, int bias, std::size_t stride,
           std::size_t padding) {
  const Tensor<T>& x = g.value(input);
  const Tensor<T>& w = g.value(weight);
  const Tensor<T>& bv = g.value(bias);
  if (x.rank() != 4) throw ShapeError("conv2d: input must be 4-D, got " + shape_str(x.shape));
  if (w.rank() != 4) throw ShapeError("conv2d: weight must be 4-D, got " + shape_str(w.shape));
  if (stride < 1) throw ShapeError("conv2d: stride must be >= 1");
  const std::size_t B = x.dim(0), Cin = x.dim(1), H = x.dim(2), W = x.dim(3);
  const std::size_t Cout = w.dim(0), KH = w.dim(2), KW = w.dim(3);
  if (w.dim(1) != Cin)
    throw ShapeError("conv2d: weight expects " + std::to_string(w.dim(1)) +
                     " input channels, input has " + std::to_string(Cin));
  if (bv.rank() != 1 || bv.dim(0) != Cout)
    throw ShapeError("conv2d: bias must be [Cout]=[" + std::to_string(Cout) + "], got " +
                     shape_str(bv.shape));
  if (KH > H + 2 * padding || KW > W + 2 * padding)
    throw ShapeError("conv2d: kernel " + std::to_string(KH) + "x" + std::to_string(KW) +
                     " larger than padded input " + shape_str(x.shape));
  const std::size_t Ho = (H + 2 * padding - KH) / stride + 1;
  const std::size_t Wo = (W + 2 * padding - KW) / stride + 1;
  if (Ho == 0 || Wo == 0) throw ShapeError("conv2d: zero-size spatial output");

  Tensor<T> out({B, Cout, Ho, Wo});
  detail::conv2d_forward_kernel(x.data.data(), B, Cin, H, W, w.data.data(), Cout, KH, KW,
                                bv.data.data(), stride, padding, out.data.data(), Ho, Wo);

  auto backward = [=](Graph<T>& gr, int id) {
    const Tensor<T>& go = gr.grad(id);
    const Tensor<T>& xin = gr.value(input);
    const Tensor<T>& wt = gr.value(weight);
    if (gr.requires_grad(input)) {
      detail::conv2d_backward_input_kernel(gr.grad(input).data.data(), B, Cin, H, W,
                                           wt.data.data(), Cout, KH, KW, stride, padding,
                                           go.data.data(), Ho, Wo);
    }
    if (gr.requires_grad(weight)) {
      detail::conv2d_backward_weight_kernel(xin.data.data(), B, Cin, H, W,
                                            gr.grad(weight).data.data(), Cout, KH, KW,
                                            stride, padding, go.data.data(), Ho, Wo);
    }
    if (gr.requires_grad(bias)) {
      Tensor<T>& gb = gr.grad(bias);
      for (std::size_t b = 0; b < B; ++b)
        for (std::size_t co = 0; co < Cout; ++co) {
          const T* dorow = go.data.data() + (b * Cout + co) * Ho * Wo;
          T acc = T(0);
          for (std::size_t i = 0; i < Ho * Wo; ++i) acc += dorow[i];
          gb.data[co] += acc;
        }
    }
  };
  return g.push(std::move(out), {input, weight, bias}, backward);
}

// Stride-2 up-convolution with a 2x2 kernel, the exact adjoint of a stride-2
// conv2d forward pass. input [B,Cin,H,W], weight [Cin,Cout,2,2] -> [B,Cout,2H,2W].
template <typename T>
int transposed_conv2d(Graph<T>& g, int input, int weight) {
  const Tensor<T>& x = g.value(input);
  const Tensor<T>& w = g.value(weight);
  if (x.rank() != 4)
    throw ShapeError("transposed_conv2d: input must be 4-D, got " + shape_str(x.shape));
  if (w.rank() != 4 || w.dim(2) != 2 || w.dim(3) != 2)
    throw ShapeError("transposed_conv2d: weight must be [Cin,Cout,2,2], got " +
                     shape_str(w.shape));
  const std::size_t B = x.dim(0), Cin = x.dim(1), H = x.dim(2), W = x.dim(3);
  if (w.dim(0) != Cin)
    throw ShapeError("transposed_conv2d: weight expects " + std::to_string(w.dim(0)) +
                     " input channels, input has " + std::to_string(Cin));
  const std::size_t Cout = w.dim(1);
  const std::size_t Ho = 2 * H, Wo = 2 * W;

  Tensor<T> out({B, Cout, Ho, Wo});
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t ci = 0; ci < Cin; ++ci) {
      const T* iplane = x.data.data() + (b * Cin + ci) * H * W;
      for (std::size_t co = 0; co < Cout; ++co) {
        T* oplane = out.data.data() + (b * Cout + co) * Ho * Wo;
        for (std::size_t kh = 0; kh < 2; ++kh)
          for (std::size_t kw = 0; kw < 2; ++kw) {
            const T wv = w.data[((ci * Cout + co) * 2 + kh) * 2 + kw];
            for (std::size_t h = 0; h < H; ++h) {
              const T* irow = iplane + h * W;
              T* orow = oplane + (2 * h + kh) * Wo + kw;
              for (std::size_t x_ = 0; x_ < W; ++x_) orow[2 * x_] += wv * irow[x_];
            }
          }
      }
    }

  auto backward = [=](Graph<T>& gr, int id) {
    const Tensor<T>& go = gr.grad(id);
    const Tensor<T>& xin = gr.value(input);
    const Tensor<T>& wt = gr.value(weight);
    if (gr.requires_grad(input)) {
      Tensor<T>& gi = gr.grad(input);
      for (std::size_t b = 0; b < B; ++b)
        for (std::size_t ci = 0; ci < Cin; ++ci) {
          T* diplane = gi.data.data() + (b * Cin + ci) * H * W;
          for (std::size_t co = 0; co < Cout; ++co) {
            const T* doplane = go.data.data() + (b * Cout + co) * Ho * Wo;
            for (std::size_t kh = 0; kh < 2; ++kh)
              for (std::size_t kw = 0; kw < 2; ++kw) {
                const T wv = wt.data[((ci * Cout + co) * 2 + kh) * 2 + kw];
                for (std::size_t h = 0; h < H; ++h) {
                  T* dirow = diplane + h * W;
                  const T* dorow = doplane + (2 * h + kh) * Wo + kw;
                  for (std::size_t x_ = 0; x_ < W; ++x_) dirow[x_] += wv * dorow[2 * x_];
                }
              }
          }
        }
    }
    if (gr.requires_grad(weight)) {
      Tensor<T>& gw = gr.grad(weight);
      for (std::size_t b = 0; b < B; ++b)
        for (std::size_t ci = 0; ci < Cin; ++ci) {
          const T* iplane = xin.data.data() + (b * Cin + ci) * H * W;
          for (std::size_t co = 0; co < Cout; ++co) {
            const T* doplane = go.data.data() + (b * Cout + co) * Ho * Wo;
            for (std::size_t kh = 0; kh < 2; ++kh)
              for (std::size_t kw = 0; kw < 2; ++kw) {
                T acc = T(0);
                for (std::size_t h = 0; h < H; ++h) {
                  const T* irow = iplane + h * W;
                  const T* dorow = doplane + (2 * h + kh) * Wo + kw;
                  for (std::size_t x_ = 0; x_ < W; ++x_) acc += irow[x_] * dorow[2 * x_];
                }
                gw.data[((ci * Cout + co) * 2 + kh) * 2 + kw] += acc;
              }
          }
        }
    }
  };
  return g.push(std::move(out), {input, weight}, backward);
}

// 2x2 max-pooling, stride 2. Ties go to the first element in row-major window
// order; backward routes the gradient to the recorded argmax only.
template <typename T>
int maxpool2d(Graph<T>& g, int input) {
  const Tensor<T>& x = g.value(input);
  if (x.rank() != 4)
    throw ShapeError("maxpool2d: input must be 4-D, got " + shape_str(x.shape));
  const std::size_t B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  if (H % 2 != 0 || W % 2 != 0)
    throw ShapeError("maxpool2d: spatial size " + std::to_string(H) + "x" +
                     std::to_string(W) + " is odd; pad the input to even dimensions");
  const std::size_t Ho = H / 2, Wo = W / 2;

  Tensor<T> out({B, C, Ho, Wo});
  auto argmax = std::make_shared<std::vector<std::size_t>>(out.numel());
  std::size_t o = 0;
  for (std::size_t bc = 0; bc < B * C; ++bc) {
    const T* plane = x.data.data() + bc * H * W;
    const std::size_t base = bc * H * W;
    for (std::size_t oh = 0; oh < Ho; ++oh)
      for (std::size_t ow = 0; ow < Wo; ++ow, ++o) {
        std::size_t best = 2 * oh * W + 2 * ow;
        T bestv = plane[best];
        const std::size_t cand[3] = {best + 1, best + W, best + W + 1};
        for (std::size_t k = 0; k < 3; ++k)
          if (plane[cand[k]] > bestv) {
            bestv = plane[cand[k]];
            best = cand[k];
          }
        out.data[o] = bestv;
        (*argmax)[o] = base + best;
      }
  }

  auto backward = [=](Graph<T>& gr, int id) {
    const Tensor<T>& go = gr.grad(id);
    Tensor<T>& gi = gr.grad(input);
    for (std::size_t i = 0; i < go.numel(); ++i) gi.data[(*argmax)[i]] += go.data[i];
  };
  return g.push(std::move(out), {input}, backward);
}

template <typename T>
int relu(Graph<T>& g, int input) {
  Tensor<T> out = g.value(input);
  for (T& v : out.data) v = std::max(v, T(0));
  auto backward = [=](Graph<T>& gr, int id) {
    const Tensor<T>& go = gr.grad(id);
    const Tensor<T>& xin = gr.value(input);
    Tensor<T>& gi = gr.grad(input);
    for (std::size_t i = 0; i < go.numel(); ++i)
      if (xin.data[i] > T(0)) gi.data[i] += go.data[i];
  };
  return g.push(std::move(out), {input}, backward);
}

template <typename T>
int sigmoid(Graph<T>& g, int input) {
  Tensor<T> out = g.value(input);
  for (T& v : out.data) v = T(1) / (T(1) + std::exp(-v));
  auto backward = [=](Graph<T>& gr, int id) {
    const Tensor<T>& go = gr.grad(id);
    const Tensor<T>& s = gr.value(id);
    Tensor<T>& gi = gr.grad(input);
    for (std::size_t i = 0; i < go.numel(); ++i)
      gi.data[i] += go.data[i] * s.data[i] * (T(1) - s.data[i]);
  };
  return g.push(std::move(out), {input}, backward);
}

// Per-pixel softmax over the channel axis of a [B,C,H,W] tensor.
template <typename T>
int softmax_channels(Graph<T>& g, int input) {
  const Tensor<T>& x = g.value(input);
  if (x.rank() != 4)
    throw ShapeError("softmax_channels: input must be 4-D with a channel axis, got " +
                     shape_str(x.shape));
  const std::size_t B = x.dim(0), C = x.dim(1), HW = x.dim(2) * x.dim(3);
  Tensor<T> out(x.shape);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t p = 0; p < HW; ++p) {
      const std::size_t base = b * C * HW + p;
      T mx = x.data[base];
      for (std::size_t c = 1; c < C; ++c) mx = std::max(mx, x.data[base + c * HW]);
      T denom = T(0);
      for (std::size_t c = 0; c < C; ++c) {
        const T e = std::exp(x.data[base + c * HW] - mx);
        out.data[base + c * HW] = e;
        denom += e;
      }
      for (std::size_t c = 0; c < C; ++c) out.data[base + c * HW] /= denom;
    }
  auto backward = [=](Graph<T>& gr, int id) {
    const Tensor<T>& go = gr.grad(id);
    const Tensor<T>& p = gr.value(id);
    Tensor<T>& gi = gr.grad(input);
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t px = 0; px < HW; ++px) {
        const std::size_t base = b * C * HW + px;
        T dotpg = T(0);
        for (std::size_t c = 0; c < C; ++c)
          dotpg += p.data[base + c * HW] * go.data[base + c * HW];
        for (std::size_t c = 0; c < C; ++c)
          gi.data[base + c * HW] += p.data[base + c * HW] * (go.data[base + c * HW] - dotpg);
      }
  };
  return g.push(std::move(out), {input}, backward);
}

// Channel concatenation: channels of a precede channels of b.
template <typename T>
int concat_channels(Graph<T>& g, int a, int b) {
  const Tensor<T>& ta = g.value(a);
  const Tensor<T>& tb = g.value(b);
  if (ta.rank() != 4 || tb.rank() != 4)
    throw ShapeError("concat_channels: inputs must be 4-D");
  if (ta.dim(0) != tb.dim(0) || ta.dim(2) != tb.dim(2) || ta.dim(3) != tb.dim(3))
    throw ShapeError("concat_channels: batch/spatial mismatch " + shape_str(ta.shape) +
                     " vs " + shape_str(tb.shape));
  const std::size_t B = ta.dim(0), Ca = ta.dim(1), Cb = tb.dim(1),
                    HW = ta.dim(2) * ta.dim(3);
  Tensor<T> out({B, Ca + Cb, ta.dim(2), ta.dim(3)});
  for (std::size_t bi = 0; bi < B; ++bi) {
    std::copy_n(ta.data.data() + bi * Ca * HW, Ca * HW,
                out.data.data() + bi * (Ca + Cb) * HW);
    std::copy_n(tb.data.data() + bi * Cb * HW, Cb * HW,
                out.data.data() + bi * (Ca + Cb) * HW + Ca * HW);
  }
  auto backward = [=](Graph<T>& gr, int id) {
    const Tensor<T>& go = gr.grad(id);
    if (gr.requires_grad(a)) {
      Tensor<T>& ga = gr.grad(a);
      for (std::size_t bi = 0; bi < B; ++bi)
        for (std::size_t i = 0; i < Ca * HW; ++i)
          ga.data[bi * Ca * HW + i] += go.data[bi * (Ca + Cb) * HW + i];
    }
    if (gr.requires_grad(b)) {
      Tensor<T>& gb = gr.grad(b);
      for (std::size_t bi = 0; bi < B; ++bi)
        for (std::size_t i = 0; i < Cb * HW; ++i)
          gb.data[bi * Cb * HW + i] += go.data[bi * (Ca + Cb) * HW + Ca * HW + i];
    }
  };
  return g.push(std::move(out), {a, b}, backward);
}

// Reduction to a scalar node of shape [1].
template <typename T>
int sum(Graph<T>& g, int input) {
  const Tensor<T>& x = g.value(input);
  T acc = T(0);
  for (T v : x.data) acc += v;
  auto backward = [=](Graph<T>& gr, int id) {
    const T go = gr.grad(id).data[0];
    Tensor<T>& gi = gr.grad(input);
    for (T& v : gi.data) v += go;
  };
  return g.push(Tensor<T>::scalar(acc), {input}, backward);
}

template <typename T>
int add(Graph<T>& g, int a, int b) {
  const Tensor<T>& ta = g.value(a);
  const Tensor<T>& tb = g.value(b);
  require_same_shape(ta, tb, "add");
  Tensor<T> out = ta;
  for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] += tb.data[i];
  auto backward = [=](Graph<T>& gr, int id) {
    const Tensor<T>& go = gr.grad(id);
    if (gr.requires_grad(a)) {
      Tensor<T>& ga = gr.grad(a);
      for (std::size_t i = 0; i < go.numel(); ++i) ga.data[i] += go.data[i];
    }
    if (gr.requires_grad(b)) {
      Tensor<T>& gb = gr.grad(b);
      for (std::size_t i = 0; i < go.numel(); ++i) gb.data[i] += go.data[i];
    }
  };
  return g.push(std::move(out), {a, b}, backward);
}

// Elementwise (Hadamard) product of same-shape tensors.
template <typename T>
int mul(Graph<T>& g, int a, int b) {
  const Tensor<T>& ta = g.value(a);
  const Tensor<T>& tb = g.value(b);
  require_same_shape(ta, tb, "mul");
  Tensor<T> out = ta;
  for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] *= tb.data[i];
  auto backward = [=](Graph<T>& gr, int id) {
    const Tensor<T>& go = gr.grad(id);
    const Tensor<T>& va = gr.value(a);
    const Tensor<T>& vb = gr.value(b);
    if (gr.requires_grad(a)) {
      Tensor<T>& ga = gr.grad(a);
      for (std::size_t i = 0; i < go.numel(); ++i) ga.data[i] += go.data[i] * vb.data[i];
    }
    if (gr.requires_grad(b)) {
      Tensor<T>& gb = gr.grad(b);
      for (std::size_t i = 0; i < go.numel(); ++i) gb.data[i] += go.data[i] * va.data[i];
    }
  };
  return g.push(std::move(out), {a, b}, backward);
}

template <typename T>
int scale(Graph<T>& g, int input, T c) {
  Tensor<T> out = g.value(input);
  for (T& v : out.data) v *= c;
  auto backward = [=](Graph<T>& gr, int id) {
    const Tensor<T>& go = gr.grad(id);
    Tensor<T>& gi = gr.grad(input);
    for (std::size_t i = 0; i < go.numel(); ++i) gi.data[i] += c * go.data[i];
  };
  return g.push(std::move(out), {input}, backward);
}

// a*x + b*y with constant coefficients; combines same-shape tensors (used for
// the weighted total loss on scalar nodes).
template <typename T>
int axpby(Graph<T>& g, T a, int x, T b, int y) {
  const Tensor<T>& tx = g.value(x);
  const Tensor<T>& ty = g.value(y);
  require_same_shape(tx, ty, "axpby");
  Tensor<T> out = tx;
  for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] = a * tx.data[i] + b * ty.data[i];
  auto backward = [=](Graph<T>& gr, int id) {
    const Tensor<T>& go = gr.grad(id);
    if (gr.requires_grad(x)) {
      Tensor<T>& gx = gr.grad(x);
      for (std::size_t i = 0; i < go.numel(); ++i) gx.data[i] += a * go.data[i];
    }
    if (gr.requires_grad(y)) {
      Tensor<T>& gy = gr.grad(y);
      for (std::size_t i = 0; i < go.numel(); ++i) gy.data[i] += b * go.data[i];
    }
  };
  return g.push(std::move(out), {x, y}, backward);
}

}  // namespace tsunet
