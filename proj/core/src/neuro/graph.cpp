#include "msdc/neuro/graph.hpp"

#include <unordered_set>

#include "msdc/error.hpp"

namespace msdc::nn {

template <typename T>
Tensor<T>& Node<T>::ensure_grad()
{
    if (grad.empty() && !value.empty())
        grad = Tensor<T>(value.shape());
    return grad;
}

template <typename T>
Var<T> constant(Tensor<T> value)
{
    auto n = std::make_shared<Node<T>>();
    n->value = std::move(value);
    return n;
}

template <typename T>
Var<T> leaf(Tensor<T> value)
{
    auto n = std::make_shared<Node<T>>();
    n->value = std::move(value);
    n->requires_grad = true;
    return n;
}

template <typename T>
Var<T> make_node(Tensor<T> value, std::vector<Var<T>> parents,
                 std::function<void(Node<T>&)> backward_fn)
{
    auto n = std::make_shared<Node<T>>();
    n->value = std::move(value);
    for (const auto& p : parents)
        n->requires_grad = n->requires_grad || (p && p->requires_grad);
    if (n->requires_grad) {
        n->parents = std::move(parents);
        n->backward = std::move(backward_fn);
    }
    return n;
}

template <typename T>
void backward(const Var<T>& root)
{
    if (!root || root->value.numel() != 1)
        throw DimensionError("backward: root must be a scalar");
    if (!root->requires_grad)
        return;

    // Iterative post-order DFS gives a topological order.
    std::vector<Node<T>*> order;
    std::unordered_set<Node<T>*> seen;
    std::vector<std::pair<Node<T>*, std::size_t>> stack{{root.get(), 0}};
    seen.insert(root.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node<T>* p = node->parents[next++].get();
            if (p && p->requires_grad && seen.insert(p).second)
                stack.emplace_back(p, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    root->ensure_grad()[0] += T(1);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node<T>* n = *it;
        if (n->backward && !n->grad.empty())
            n->backward(*n);
    }
}

#define MSDC_INSTANTIATE(T)                                                                   \
    template struct Node<T>;                                                                  \
    template Var<T> constant<T>(Tensor<T>);                                                   \
    template Var<T> leaf<T>(Tensor<T>);                                                       \
    template Var<T> make_node<T>(Tensor<T>, std::vector<Var<T>>,                              \
                                 std::function<void(Node<T>&)>);                              \
    template void backward<T>(const Var<T>&);

MSDC_INSTANTIATE(float)
MSDC_INSTANTIATE(double)
#undef MSDC_INSTANTIATE

}  // namespace msdc::nn
