#pragma once

#include <cassert>
#include <functional>
#include <utility>
#include <vector>

#include "tsunet/core/tensor.hpp"

namespace tsunet {

// Reverse-mode autodiff tape. Operations append nodes in execution order, so
// node ids form a topological order and the reverse sweep visits each node at
// most once. Gradients at fan-out points accumulate by summation. A Graph is
// confined to one logical thread; run one graph per sample for data-parallel
// work.
template <typename T>
class Graph {
 public:
  // Called with (graph, node_id); reads the node's grad and accumulates into
  // the parents' grads.
  using BackwardFn = std::function<void(Graph<T>&, int)>;

  struct Node {
    Tensor<T> value;
    Tensor<T> grad;  // empty until a gradient reaches this node
    std::vector<int> parents;
    BackwardFn backward;  // empty for leaves and grad-free subgraphs
    bool requires_grad = false;
  };

  int leaf(Tensor<T> value, bool requires_grad = false) {
    nodes_.push_back(Node{std::move(value), {}, {}, {}, requires_grad});
    return static_cast<int>(nodes_.size()) - 1;
  }

  int push(Tensor<T> value, std::vector<int> parents, BackwardFn backward) {
    bool req = false;
    for (int p : parents) {
      assert(p >= 0 && p < static_cast<int>(nodes_.size()));  // acyclic by construction
      req = req || nodes_[static_cast<std::size_t>(p)].requires_grad;
    }
    // Subgraphs with no differentiable ancestor never run backward.
    nodes_.push_back(Node{std::move(value), {}, std::move(parents),
                          req ? std::move(backward) : BackwardFn{}, req});
    return static_cast<int>(nodes_.size()) - 1;
  }

  const Tensor<T>& value(int id) const { return node(id).value; }
  Tensor<T>& value(int id) { return node(id).value; }

  bool requires_grad(int id) const { return node(id).requires_grad; }
  bool has_grad(int id) const { return !node(id).grad.empty(); }

  // Allocates a zero gradient on first touch.
  Tensor<T>& grad(int id) {
    Node& n = node(id);
    if (n.grad.empty()) n.grad = Tensor<T>::zeros(n.value.shape);
    return n.grad;
  }

  // Seeds dLoss/dLoss = 1 and sweeps the tape in reverse. Leaf gradients
  // accumulate across repeated calls; intermediate gradients are transient.
  void backward(int loss_id) {
    if (value(loss_id).numel() != 1)
      throw ShapeError("backward: loss must be scalar, got " +
                       shape_str(value(loss_id).shape));
    for (Node& n : nodes_)
      if (n.backward) n.grad = Tensor<T>{};
    grad(loss_id).data[0] += T(1);
    for (int id = loss_id; id >= 0; --id) {
      Node& n = node(id);
      if (!n.backward || n.grad.empty()) continue;
      n.backward(*this, id);
    }
  }

  void zero_grad() {
    for (Node& n : nodes_) n.grad = Tensor<T>{};
  }

  int size() const { return static_cast<int>(nodes_.size()); }

  // Drops nodes past the mark; lets callers reuse bound leaves (e.g. model
  // parameters) across many forward passes without retaining activations.
  void truncate(int mark) {
    assert(mark >= 0 && mark <= size());
    nodes_.resize(static_cast<std::size_t>(mark));
  }

  void reserve(std::size_t n) { nodes_.reserve(n); }

 private:
  Node& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }

  std::vector<Node> nodes_;
};

}  // namespace tsunet
