#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "advroad/error.hpp"

namespace advroad {

using Shape = std::vector<long>;

inline long shape_numel(const Shape& s) {
  long n = 1;
  for (long d : s) n *= d;
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << "]";
  return os.str();
}

namespace detail {

inline std::uint64_t next_tensor_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

template <typename S>
struct Node {
  Shape shape;
  std::vector<S> values;
  bool requires_grad = false;
  std::uint64_t id = next_tensor_id();
};

}  // namespace detail

// Dense row-major tensor with value semantics on the handle; the underlying
// node is shared, so copies alias. Gradients are never stored on the tensor:
// backward() returns them in a separate map.
template <typename S>
class Tensor {
 public:
  using Scalar = S;

  Tensor() : node_(std::make_shared<detail::Node<S>>()) {}

  static Tensor zeros(Shape shape) {
    Tensor t;
    t.node_->shape = std::move(shape);
    t.node_->values.assign(static_cast<std::size_t>(shape_numel(t.node_->shape)), S(0));
    return t;
  }

  static Tensor full(Shape shape, S value) {
    Tensor t = zeros(std::move(shape));
    for (auto& v : t.node_->values) v = value;
    return t;
  }

  static Tensor scalar(S value) { return full({1}, value); }

  static Tensor from(Shape shape, std::vector<S> values) {
    if (shape_numel(shape) != static_cast<long>(values.size()))
      raise(Errc::ShapeMismatch, "from: shape " + shape_str(shape) + " does not match " +
                                     std::to_string(values.size()) + " values");
    Tensor t;
    t.node_->shape = std::move(shape);
    t.node_->values = std::move(values);
    return t;
  }

  const Shape& shape() const { return node_->shape; }
  long dim(std::size_t i) const { return node_->shape[i]; }
  std::size_t rank() const { return node_->shape.size(); }
  long size() const { return static_cast<long>(node_->values.size()); }

  S* data() { return node_->values.data(); }
  const S* data() const { return node_->values.data(); }
  std::vector<S>& values() { return node_->values; }
  const std::vector<S>& values() const { return node_->values; }

  S item() const {
    if (size() != 1) raise(Errc::ShapeMismatch, "item() on tensor of size " + std::to_string(size()));
    return node_->values[0];
  }

  bool requires_grad() const { return node_->requires_grad; }
  Tensor& set_requires_grad(bool flag) {
    node_->requires_grad = flag;
    return *this;
  }

  std::uint64_t id() const { return node_->id; }

  // Fresh leaf with copied values and no grad requirement.
  Tensor detach() const {
    Tensor t;
    t.node_->shape = node_->shape;
    t.node_->values = node_->values;
    return t;
  }

  Tensor clone() const {
    Tensor t = detach();
    t.node_->requires_grad = node_->requires_grad;
    return t;
  }

  template <typename T>
  Tensor<T> cast() const {
    Tensor<T> t = Tensor<T>::zeros(node_->shape);
    for (long i = 0; i < size(); ++i) t.data()[i] = static_cast<T>(node_->values[i]);
    return t;
  }

  std::shared_ptr<detail::Node<S>> node() const { return node_; }

 private:
  std::shared_ptr<detail::Node<S>> node_;

  template <typename T>
  friend class Tape;
};

// Gradient map returned by backward(): tensor id -> gradient tensor.
template <typename S>
class GradMap {
 public:
  bool has(const Tensor<S>& t) const { return grads_.count(t.id()) > 0; }

  const Tensor<S>& at(const Tensor<S>& t) const {
    auto it = grads_.find(t.id());
    if (it == grads_.end())
      raise(Errc::EmptyInput, "no gradient recorded for tensor id " + std::to_string(t.id()));
    return it->second;
  }

  void put(std::uint64_t id, Tensor<S> g) { grads_.emplace(id, std::move(g)); }
  std::size_t count() const { return grads_.size(); }

 private:
  std::unordered_map<std::uint64_t, Tensor<S>> grads_;
};

// Ordered record of executed primitives. Append-only during forward, walked in
// reverse by backward(). A tape is confined to one logical thread; independent
// tapes on different threads never interact.
template <typename S>
class Tape {
 public:
  using NodePtr = std::shared_ptr<detail::Node<S>>;
  // gin(i) returns the accumulation buffer for input i, or nullptr when that
  // input does not need a gradient; implementations must += into it.
  using BackwardFn = std::function<void(const S* dout, const std::function<S*(std::size_t)>& gin)>;

  struct Entry {
    NodePtr out;
    std::vector<NodePtr> inputs;
    BackwardFn backward;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  class Scope {
   public:
    explicit Scope(Tape& tape) : prev_(current()) { current() = &tape; }
    ~Scope() { current() = prev_; }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Tape* prev_;
  };

  static Tape*& current() {
    thread_local Tape* active = nullptr;
    return active;
  }

  void record(const Tensor<S>& out, const std::vector<Tensor<S>>& inputs, BackwardFn fn) {
    Entry e;
    e.out = out.node();
    e.inputs.reserve(inputs.size());
    for (const auto& t : inputs) e.inputs.push_back(t.node());
    e.backward = std::move(fn);
    entries_.push_back(std::move(e));
  }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  void clear() { entries_.clear(); }

 private:
  std::vector<Entry> entries_;
};

// Reverse sweep over the tape. Pure: repeated calls over the same tape give
// identical results. Gradients exist only for requires_grad tensors reachable
// from the loss.
template <typename S>
GradMap<S> backward(const Tape<S>& tape, const Tensor<S>& loss) {
  if (loss.size() != 1)
    raise(Errc::NonScalarLoss, "backward needs a scalar loss, got shape " + shape_str(loss.shape()));

  std::unordered_map<std::uint64_t, std::vector<S>> cotangents;
  cotangents[loss.id()] = {S(1)};

  const auto& entries = tape.entries();
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    const auto& e = *it;
    auto found = cotangents.find(e.out->id);
    if (found == cotangents.end()) continue;  // not reachable from the loss
    const S* dout = found->second.data();

    auto gin = [&](std::size_t i) -> S* {
      const auto& node = e.inputs[i];
      if (!node->requires_grad) return nullptr;
      auto& buf = cotangents[node->id];
      if (buf.empty()) buf.assign(node->values.size(), S(0));
      return buf.data();
    };
    e.backward(dout, gin);
  }

  GradMap<S> grads;
  // Export every requires_grad tensor that received a cotangent; shapes come
  // from the recorded nodes.
  std::unordered_map<std::uint64_t, const detail::Node<S>*> nodes;
  for (const auto& e : entries) {
    nodes[e.out->id] = e.out.get();
    for (const auto& in : e.inputs) nodes[in->id] = in.get();
  }
  for (auto& [id, buf] : cotangents) {
    auto nit = nodes.find(id);
    if (nit == nodes.end()) continue;
    const auto* node = nit->second;
    if (!node->requires_grad) continue;
    grads.put(id, Tensor<S>::from(node->shape, std::move(buf)));
  }
  return grads;
}

}  // namespace advroad
