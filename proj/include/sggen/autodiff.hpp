#pragma once

// Reverse-mode gradients over the tensor kernels. A Tape records every
// primitive application eagerly (forward values are computed at node
// creation), then backward() replays adjoints in reverse order. Leaves
// bound to a ParamStore accumulate straight into the store's gradient
// slots, so one store can collect gradients from many tapes.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sggen/tensor.hpp"

namespace sggen {

// Named parameter tensors with same-shape gradient slots. Iteration is
// lexicographic by name, which fixes the order of every reduction that
// walks the store.
class ParamStore {
 public:
  struct Entry {
    Tensor value;
    Tensor grad;
  };

  void add(const std::string& name, Tensor value);
  bool has(const std::string& name) const { return entries_.count(name) != 0; }
  Tensor& value(const std::string& name);
  const Tensor& value(const std::string& name) const;
  Tensor& grad(const std::string& name);
  const Tensor& grad(const std::string& name) const;

  void zero_grads();
  std::vector<std::string> names() const;
  std::size_t count() const { return entries_.size(); }
  std::int64_t total_size() const;

  std::map<std::string, Entry>& entries() { return entries_; }
  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  std::map<std::string, Entry> entries_;
};

class Tape;

// Handle to a tape node. Cheap to copy; owns nothing.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // ---- leaves ----
  Var constant(Tensor value);
  // Leaf whose adjoint accumulates into store.grad(name).
  Var param(ParamStore& store, const std::string& name);

  // ---- recorded primitives ----
  Var matmul(Var a, Var b);
  Var matmul_nt(Var a, Var b);  // a * b^T
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var hadamard(Var a, Var b);
  Var scale(Var a, double c);
  Var add_rowvec(Var a, Var v);
  Var mul_colvec(Var a, Var c);
  Var relu(Var a);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var softmax_rows(Var a);      // last axis
  Var log_softmax_rows(Var a);  // last axis
  Var layer_norm(Var x, Var gain, Var bias, double eps = 1e-5);
  Var concat_rows(std::span<const Var> parts);  // axis 0
  Var concat_cols(std::span<const Var> parts);  // axis 1, 2-d inputs
  Var concat_cols(Var a, Var b);
  Var gather_rows(Var a, std::vector<std::int64_t> rows);
  Var reshape(Var a, Shape shape);
  Var sum_all(Var a);  // -> shape [1]

  const Tensor& value(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].value; }
  double scalar(Var v) const;
  std::size_t size() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }

  // Seeds d(loss)/d(loss) = 1 and pushes adjoints back through every
  // recorded node. Parameter leaves ADD into their store's grad slots
  // (callers zero the store between optimization steps). A tape may be
  // walked backward exactly once.
  void backward(Var loss);

 private:
  struct Node {
    Tensor value;
    Tensor adjoint;
    bool has_adjoint = false;
    Tensor* grad_sink = nullptr;
    std::function<void(Tape&, int)> vjp;  // nullptr for leaves
  };

  int push(Tensor value) {
    nodes_.push_back(Node{std::move(value), Tensor(), false, nullptr, nullptr});
    return static_cast<int>(nodes_.size()) - 1;
  }
  Node& node(Var v) { return nodes_[static_cast<std::size_t>(v.id)]; }
  Node& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Tensor& val(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  const Tensor& adj(int id) const { return nodes_[static_cast<std::size_t>(id)].adjoint; }
  void accum(int id, Tensor g);

  std::vector<Node> nodes_;
  bool consumed_ = false;
};

// ---- gradient verification ----

// Evaluates `f` once with gradients (with_grad=true fills store grads via
// a tape it builds itself) and then re-evaluates pure forward passes with
// single coordinates nudged by +/-h. Coordinates are sampled round-robin
// across parameter names (at least one per parameter, `min_coords` total),
// deterministically from `seed`.
struct FdCheckReport {
  double max_rel_error = 0.0;
  std::int64_t coords_checked = 0;
  std::string worst_param;
  std::int64_t worst_index = -1;
};

FdCheckReport finite_difference_check(
    const std::function<double(ParamStore&, bool with_grad)>& f, ParamStore& params,
    double h = 1e-5, std::int64_t min_coords = 200, std::uint64_t seed = 0x5eedcafe);

}  // namespace sggen
