#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "msdc/neuro/tensor.hpp"

namespace msdc::nn {

/// One value in a dynamically built computation graph. Nodes only reference
/// their parents, so a graph is released as soon as its outputs go out of scope.
template <typename T>
struct Node {
    Tensor<T> value;
    Tensor<T> grad;  // allocated on first accumulation
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward;  // pushes this->grad into parents

    Tensor<T>& ensure_grad();
};

template <typename T>
using Var = std::shared_ptr<Node<T>>;

/// Value that never receives gradients.
template <typename T>
Var<T> constant(Tensor<T> value);

/// Trainable leaf.
template <typename T>
Var<T> leaf(Tensor<T> value);

/// Creates an op node; requires_grad is inherited from the parents.
template <typename T>
Var<T> make_node(Tensor<T> value, std::vector<Var<T>> parents,
                 std::function<void(Node<T>&)> backward);

/// Reverse-mode sweep from a scalar root (seeded with 1). Gradients accumulate
/// into every reachable node that requires them, including leaves.
template <typename T>
void backward(const Var<T>& root);

}  // namespace msdc::nn
