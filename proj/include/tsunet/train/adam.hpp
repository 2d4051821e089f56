#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tsunet/core/tensor.hpp"

namespace tsunet {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Per-parameter first/second moment estimates plus the shared step count.
template <typename T>
struct AdamState {
  std::size_t t = 0;
  std::vector<Tensor<T>> m, v;

  static AdamState init(const std::vector<Tensor<T>*>& params) {
    AdamState st;
    st.m.reserve(params.size());
    st.v.reserve(params.size());
    for (const Tensor<T>* p : params) {
      st.m.push_back(Tensor<T>::zeros(p->shape));
      st.v.push_back(Tensor<T>::zeros(p->shape));
    }
    return st;
  }
};

// One ADAM update with bias correction:
//   m <- b1*m + (1-b1)*g,  v <- b2*v + (1-b2)*g^2
//   theta <- theta - lr * m/(1-b1^t) / (sqrt(v/(1-b2^t)) + eps)
// names, when given, label the offending parameter on non-finite gradients.
template <typename T>
void adam_step(const std::vector<Tensor<T>*>& params,
               const std::vector<const Tensor<T>*>& grads, AdamState<T>& state,
               const AdamConfig& cfg, const std::vector<std::string>* names = nullptr) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw ShapeError("adam_step: parameter/gradient/state arity mismatch");
  state.t += 1;
  const T b1 = static_cast<T>(cfg.beta1), b2 = static_cast<T>(cfg.beta2);
  const T corr1 = T(1) - static_cast<T>(std::pow(cfg.beta1, double(state.t)));
  const T corr2 = T(1) - static_cast<T>(std::pow(cfg.beta2, double(state.t)));
  const T lr = static_cast<T>(cfg.lr);
  const T eps = static_cast<T>(cfg.eps);

  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<T>& theta = *params[i];
    const Tensor<T>& grad = *grads[i];
    if (!theta.same_shape(grad))
      throw ShapeError("adam_step: gradient shape mismatch at parameter " +
                       (names ? (*names)[i] : std::to_string(i)));
    if (!grad.all_finite())
      throw NumericError("adam_step: non-finite gradient for parameter " +
                         (names ? (*names)[i] : std::to_string(i)));
    Tensor<T>& m = state.m[i];
    Tensor<T>& v = state.v[i];
    for (std::size_t j = 0; j < theta.numel(); ++j) {
      const T gj = grad.data[j];
      m.data[j] = b1 * m.data[j] + (T(1) - b1) * gj;
      v.data[j] = b2 * v.data[j] + (T(1) - b2) * gj * gj;
      const T mhat = m.data[j] / corr1;
      const T vhat = v.data[j] / corr2;
      theta.data[j] -= lr * mhat / (static_cast<T>(std::sqrt(vhat)) + eps);
    }
  }
}

}  // namespace tsunet
