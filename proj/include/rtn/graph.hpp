#pragma once

#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "rtn/param_store.hpp"
#include "rtn/tensor.hpp"

namespace rtn {

using NodeId = int;

enum class OpKind {
  Input,
  Param,
  MatMul,
  Add,       // same shape, or rhs is a column broadcast across lhs columns
  CMul,      // elementwise; same broadcast rule as Add
  Sigmoid,
  Tanh,
  LRelu,
  Concat,    // row-wise stack
  Slice,     // row range
  SumSquares,  // scalar: sum of squared entries
  Scale,       // multiply by a compile-time constant scalar
};

// Reverse-mode tape over Tensor2. Forward values are computed eagerly at node
// creation so autoregressive rollouts can read intermediate emissions while
// the graph is still being built. A graph lives for one minibatch.
class Graph {
 public:
  explicit Graph(ParamStore* params = nullptr) : params_(params) {}

  NodeId input(Tensor2 value, std::string name = {});
  NodeId param(const std::string& name);  // one node per parameter, cached

  NodeId matmul(NodeId a, NodeId b);
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b) { return add(a, scale(b, -1.0)); }
  NodeId cmul(NodeId a, NodeId b);
  NodeId sigmoid(NodeId a);
  NodeId tanh(NodeId a);
  NodeId lrelu(NodeId a, double slope);
  NodeId concat(std::initializer_list<NodeId> parts);
  NodeId concat(const std::vector<NodeId>& parts);
  NodeId slice(NodeId a, int row0, int nrows);
  NodeId sum_squares(NodeId a);
  NodeId scale(NodeId a, double s);

  const Tensor2& value(NodeId id) const { return nodes_[id].value; }
  const std::string& name(NodeId id) const { return nodes_[id].name; }
  int node_count() const { return static_cast<int>(nodes_.size()); }

  // Rebind a named input and recompute every node in creation order.
  // Unknown names are an error.
  void set_input(const std::string& name, Tensor2 value);
  void recompute();

  // Populates adjoints for everything reachable from `loss` (a 1x1 node) and
  // collects parameter gradients. Parameters off every path get zero grads.
  void backward(NodeId loss);
  const Tensor2& adjoint(NodeId id) const { return nodes_[id].adjoint; }
  const GradMap& param_grads() const { return grads_; }

  ParamStore* params() const { return params_; }

 private:
  struct Node {
    OpKind kind;
    Tensor2 value;
    Tensor2 adjoint;
    std::vector<NodeId> preds;
    std::string name;     // inputs and params
    int param_index = -1;
    double attr = 0.0;          // lrelu slope / scale factor
    int row0 = 0, nrows = 0;    // slice range
  };

  NodeId push(Node n);
  void eval(Node& n);
  const Tensor2& val(NodeId id) const { return nodes_[id].value; }
  [[noreturn]] void fail(const Node& n, const std::string& what) const;

  std::vector<Node> nodes_;
  std::unordered_map<std::string, NodeId> param_nodes_;
  std::unordered_map<std::string, NodeId> named_inputs_;
  ParamStore* params_ = nullptr;
  GradMap grads_;
};

// Max over all parameters of |analytic - numeric| / max(|analytic|, |numeric|, 1e-8),
// with numeric gradients from central differences of `f` at the current point.
// `f` may mutate nothing observable; it is called with the perturbed store.
double grad_check(ParamStore& params, const std::function<double(ParamStore&)>& f,
                  const GradMap& analytic, double eps);

}  // namespace rtn
