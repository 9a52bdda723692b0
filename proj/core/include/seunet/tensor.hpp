#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "seunet/grid.hpp"

namespace seunet {

/// One node of the dynamically built computation graph. Nodes are created in
/// forward order, so the sequence number gives a valid topological order for
/// the backward sweep. `grad` stays empty (meaning zero) until backward
/// touches the node.
template <class T>
struct TapeNode {
  Grid<T> value;
  Grid<T> grad;
  bool requires_grad = false;
  std::uint64_t seq = 0;
  std::string name;
  std::vector<std::shared_ptr<TapeNode<T>>> parents;
  std::function<void(TapeNode<T>&)> backprop;

  Grid<T>& ensure_grad() {
    if (grad.data.empty()) grad = Grid<T>(value.shape);
    return grad;
  }
};

namespace detail {
inline std::atomic<std::uint64_t>& tape_counter() {
  static std::atomic<std::uint64_t> c{0};
  return c;
}
inline int& no_grad_depth() {
  thread_local int depth = 0;
  return depth;
}
}  // namespace detail

inline bool grad_enabled() { return detail::no_grad_depth() == 0; }

/// Scope guard that suspends graph construction; forwards inside it produce
/// value-only tensors whose intermediates are freed as handles go out of
/// scope.
struct NoGradGuard {
  NoGradGuard() { ++detail::no_grad_depth(); }
  ~NoGradGuard() { --detail::no_grad_depth(); }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;
};

/// Value-semantics handle to a tape node.
template <class T>
class Tensor {
 public:
  using Node = TapeNode<T>;

  Tensor() = default;

  static Tensor leaf(Grid<T> value, bool requires_grad = false, std::string name = {}) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->requires_grad = requires_grad;
    n->seq = ++detail::tape_counter();
    n->name = std::move(name);
    return Tensor(std::move(n));
  }

  static Tensor constant(Grid<T> value) { return leaf(std::move(value), false); }
  static Tensor scalar(T v) { return leaf(Grid<T>(Shape{1}, v), false); }

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->value.shape; }
  std::size_t size() const { return node_->value.size(); }
  const Grid<T>& value() const { return node_->value; }
  Grid<T>& value() { return node_->value; }
  const Grid<T>& grad() const { return node_->grad; }
  bool has_grad() const { return !node_->grad.data.empty(); }
  bool requires_grad() const { return node_->requires_grad; }
  const std::string& name() const { return node_->name; }

  void zero_grad() { node_->grad = Grid<T>(); }

  std::shared_ptr<Node>& node() { return node_; }
  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<Node> n) : node_(std::move(n)) {}
  std::shared_ptr<Node> node_;

  template <class U>
  friend Tensor<U> make_op(Grid<U> value, std::vector<Tensor<U>> parents,
                           std::function<void(TapeNode<U>&)> backprop);
};

/// Registers an op result on the tape. Parents and the backward rule are
/// attached only when gradients are enabled and some parent needs them.
template <class T>
Tensor<T> make_op(Grid<T> value, std::vector<Tensor<T>> parents,
                  std::function<void(TapeNode<T>&)> backprop) {
  auto n = std::make_shared<TapeNode<T>>();
  n->value = std::move(value);
  n->seq = ++detail::tape_counter();
  bool needs = false;
  if (grad_enabled()) {
    for (const auto& p : parents) needs = needs || p.requires_grad();
  }
  if (needs) {
    n->requires_grad = true;
    n->parents.reserve(parents.size());
    for (auto& p : parents) n->parents.push_back(p.node());
    n->backprop = std::move(backprop);
  }
  return Tensor<T>(std::move(n));
}

/// Reverse-mode sweep from a scalar root. Every reachable requires_grad leaf
/// ends with d(root)/d(leaf) in its grad; fan-out accumulates additively.
template <class T>
void backward(const Tensor<T>& root) {
  if (!root.defined() || root.size() != 1)
    throw std::invalid_argument("backward: root must be a defined scalar tensor");

  std::vector<TapeNode<T>*> order;
  std::unordered_set<TapeNode<T>*> seen;
  std::vector<TapeNode<T>*> stack{root.node().get()};
  seen.insert(root.node().get());
  while (!stack.empty()) {
    TapeNode<T>* n = stack.back();
    stack.pop_back();
    order.push_back(n);
    for (const auto& p : n->parents)
      if (seen.insert(p.get()).second) stack.push_back(p.get());
  }
  std::sort(order.begin(), order.end(),
            [](const TapeNode<T>* a, const TapeNode<T>* b) { return a->seq > b->seq; });

  root.node()->ensure_grad().data[0] = T(1);
  for (TapeNode<T>* n : order) {
    if (!n->backprop || n->grad.data.empty()) continue;
    n->backprop(*n);
  }
}

}  // namespace seunet
