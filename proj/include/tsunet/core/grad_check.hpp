#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "tsunet/core/graph.hpp"

namespace tsunet {

// Central-difference gradient verification, double precision.
//
// `build(graph, leaf_ids)` must construct the scalar loss from freshly created
// leaves (one per input tensor, same order) and return the loss node id.
// Returns the max over checked elements of
//   |analytic - numeric| / max(1, |analytic|, |numeric|).
//
// `max_elements_per_input` = 0 checks every element; otherwise a deterministic
// random subset of that size is checked per input tensor.
template <typename Builder>
double grad_check_subset(Builder&& build, std::vector<Tensor<double>> inputs, double eps,
                         std::size_t max_elements_per_input,
                         std::uint64_t sample_seed = 0x9e3779b97f4a7c15ull) {
  if (eps <= 0) throw ShapeError("grad_check: eps must be positive");

  auto eval = [&](const std::vector<Tensor<double>>& in) {
    Graph<double> g;
    std::vector<int> ids;
    ids.reserve(in.size());
    for (const auto& t : in) ids.push_back(g.leaf(t, false));
    const int loss = build(g, ids);
    return g.value(loss).data[0];
  };

  std::vector<Tensor<double>> analytic;
  {
    Graph<double> g;
    std::vector<int> ids;
    ids.reserve(inputs.size());
    for (const auto& t : inputs) ids.push_back(g.leaf(t, true));
    const int loss = build(g, ids);
    g.backward(loss);
    for (int id : ids) analytic.push_back(g.grad(id));
  }

  std::mt19937_64 rng(sample_seed);
  double max_err = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    std::vector<std::size_t> elems(inputs[i].numel());
    std::iota(elems.begin(), elems.end(), std::size_t{0});
    if (max_elements_per_input > 0 && max_elements_per_input < elems.size()) {
      std::shuffle(elems.begin(), elems.end(), rng);
      elems.resize(max_elements_per_input);
    }
    for (std::size_t e : elems) {
      const double orig = inputs[i].data[e];
      inputs[i].data[e] = orig + eps;
      const double lp = eval(inputs);
      inputs[i].data[e] = orig - eps;
      const double lm = eval(inputs);
      inputs[i].data[e] = orig;
      const double numeric = (lp - lm) / (2.0 * eps);
      const double ana = analytic[i].data[e];
      const double err =
          std::abs(ana - numeric) / std::max({1.0, std::abs(ana), std::abs(numeric)});
      max_err = std::max(max_err, err);
    }
  }
  return max_err;
}

template <typename Builder>
double grad_check(Builder&& build, std::vector<Tensor<double>> inputs, double eps = 1e-5) {
  return grad_check_subset(std::forward<Builder>(build), std::move(inputs), eps, 0);
}

}  // namespace tsunet
