#include "rtn/graph.hpp"

#include <cmath>
#include <stdexcept>

namespace rtn {

namespace {

const char* kind_name(OpKind k) {
  switch (k) {
    case OpKind::Input: return "input";
    case OpKind::Param: return "param";
    case OpKind::MatMul: return "matmul";
    case OpKind::Add: return "add";
    case OpKind::CMul: return "cmul";
    case OpKind::Sigmoid: return "sigmoid";
    case OpKind::Tanh: return "tanh";
    case OpKind::LRelu: return "lrelu";
    case OpKind::Concat: return "concat";
    case OpKind::Slice: return "slice";
    case OpKind::SumSquares: return "sum_squares";
    case OpKind::Scale: return "scale";
  }
  return "?";
}

// Column vector rhs broadcasts across the columns of lhs.
bool broadcasts(const Tensor2& a, const Tensor2& b) {
  return b.cols == 1 && a.rows == b.rows && a.cols > 1;
}

}  // namespace

void Graph::fail(const Node& n, const std::string& what) const {
  std::string id = n.name.empty() ? std::string(kind_name(n.kind)) : n.name;
  throw std::runtime_error("graph node '" + id + "': " + what);
}

NodeId Graph::push(Node n) {
  eval(n);
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size()) - 1;
}

NodeId Graph::input(Tensor2 value, std::string name) {
  Node n;
  n.kind = OpKind::Input;
  n.value = std::move(value);
  n.name = std::move(name);
  NodeId id = push(std::move(n));
  if (!nodes_[id].name.empty()) named_inputs_[nodes_[id].name] = id;
  return id;
}

NodeId Graph::param(const std::string& name) {
  auto it = param_nodes_.find(name);
  if (it != param_nodes_.end()) return it->second;
  if (!params_) throw std::runtime_error("graph has no parameter store");
  Node n;
  n.kind = OpKind::Param;
  n.name = name;
  n.param_index = params_->index_of(name);
  NodeId id = push(std::move(n));
  param_nodes_[name] = id;
  return id;
}

NodeId Graph::matmul(NodeId a, NodeId b) {
  Node n;
  n.kind = OpKind::MatMul;
  n.preds = {a, b};
  return push(std::move(n));
}

NodeId Graph::add(NodeId a, NodeId b) {
  Node n;
  n.kind = OpKind::Add;
  n.preds = {a, b};
  return push(std::move(n));
}

NodeId Graph::cmul(NodeId a, NodeId b) {
  Node n;
  n.kind = OpKind::CMul;
  n.preds = {a, b};
  return push(std::move(n));
}

NodeId Graph::sigmoid(NodeId a) {
  Node n;
  n.kind = OpKind::Sigmoid;
  n.preds = {a};
  return push(std::move(n));
}

NodeId Graph::tanh(NodeId a) {
  Node n;
  n.kind = OpKind::Tanh;
  n.preds = {a};
  return push(std::move(n));
}

NodeId Graph::lrelu(NodeId a, double slope) {
  if (!(slope > 0.0 && slope < 1.0)) throw std::invalid_argument("lrelu: slope must lie in (0, 1)");
  Node n;
  n.kind = OpKind::LRelu;
  n.preds = {a};
  n.attr = slope;
  return push(std::move(n));
}

NodeId Graph::concat(std::initializer_list<NodeId> parts) {
  return concat(std::vector<NodeId>(parts));
}

NodeId Graph::concat(const std::vector<NodeId>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat: no parts");
  Node n;
  n.kind = OpKind::Concat;
  n.preds = parts;
  return push(std::move(n));
}

NodeId Graph::slice(NodeId a, int row0, int nrows) {
  Node n;
  n.kind = OpKind::Slice;
  n.preds = {a};
  n.row0 = row0;
  n.nrows = nrows;
  return push(std::move(n));
}

NodeId Graph::sum_squares(NodeId a) {
  Node n;
  n.kind = OpKind::SumSquares;
  n.preds = {a};
  return push(std::move(n));
}

NodeId Graph::scale(NodeId a, double s) {
  Node n;
  n.kind = OpKind::Scale;
  n.preds = {a};
  n.attr = s;
  return push(std::move(n));
}

void Graph::eval(Node& n) {
  switch (n.kind) {
    case OpKind::Input:
      break;
    case OpKind::Param:
      n.value = params_->entry(n.param_index).value;
      break;
    case OpKind::MatMul: {
      const Tensor2& a = val(n.preds[0]);
      const Tensor2& b = val(n.preds[1]);
      if (a.cols != b.rows)
        fail(n, "inner dimensions disagree: " + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                    " * " + std::to_string(b.rows) + "x" + std::to_string(b.cols));
      n.value = rtn::matmul(a, b);
      break;
    }
    case OpKind::Add:
    case OpKind::CMul: {
      const Tensor2& a = val(n.preds[0]);
      const Tensor2& b = val(n.preds[1]);
      const bool bc = broadcasts(a, b);
      if (!bc && !a.same_shape(b))
        fail(n, "shape mismatch: " + std::to_string(a.rows) + "x" + std::to_string(a.cols) + " vs " +
                    std::to_string(b.rows) + "x" + std::to_string(b.cols));
      n.value = a;
      for (int r = 0; r < a.rows; ++r)
        for (int c = 0; c < a.cols; ++c) {
          const double bv = bc ? b.at(r, 0) : b.at(r, c);
          if (n.kind == OpKind::Add)
            n.value.at(r, c) += bv;
          else
            n.value.at(r, c) *= bv;
        }
      break;
    }
    case OpKind::Sigmoid: {
      n.value = val(n.preds[0]);
      for (double& v : n.value.data) v = 1.0 / (1.0 + std::exp(-v));
      break;
    }
    case OpKind::Tanh: {
      n.value = val(n.preds[0]);
      for (double& v : n.value.data) v = std::tanh(v);
      break;
    }
    case OpKind::LRelu: {
      const Tensor2& a = val(n.preds[0]);
      if (!a.all_finite()) fail(n, "non-finite input");
      n.value = a;
      for (double& v : n.value.data)
        if (v < 0.0) v *= n.attr;
      break;
    }
    case OpKind::Concat: {
      int rows = 0;
      const int cols = val(n.preds[0]).cols;
      for (NodeId p : n.preds) {
        if (val(p).cols != cols) fail(n, "column counts disagree");
        rows += val(p).rows;
      }
      n.value = Tensor2(rows, cols);
      int r0 = 0;
      for (NodeId p : n.preds) {
        const Tensor2& part = val(p);
        std::copy(part.data.begin(), part.data.end(),
                  n.value.data.begin() + static_cast<size_t>(r0) * cols);
        r0 += part.rows;
      }
      break;
    }
    case OpKind::Slice: {
      const Tensor2& a = val(n.preds[0]);
      if (n.row0 < 0 || n.nrows <= 0 || n.row0 + n.nrows > a.rows) fail(n, "row range out of bounds");
      n.value = Tensor2(n.nrows, a.cols);
      std::copy(a.data.begin() + static_cast<size_t>(n.row0) * a.cols,
                a.data.begin() + static_cast<size_t>(n.row0 + n.nrows) * a.cols, n.value.data.begin());
      break;
    }
    case OpKind::SumSquares: {
      const Tensor2& a = val(n.preds[0]);
      double s = 0.0;
      for (double v : a.data) s += v * v;
      n.value = Tensor2(1, 1);
      n.value.data[0] = s;
      break;
    }
    case OpKind::Scale: {
      n.value = val(n.preds[0]);
      for (double& v : n.value.data) v *= n.attr;
      break;
    }
  }
}

void Graph::set_input(const std::string& name, Tensor2 value) {
  auto it = named_inputs_.find(name);
  if (it == named_inputs_.end()) throw std::out_of_range("graph: no input named '" + name + "'");
  Node& n = nodes_[it->second];
  if (!n.value.same_shape(value)) fail(n, "set_input shape mismatch");
  n.value = std::move(value);
}

void Graph::recompute() {
  for (Node& n : nodes_) eval(n);
}

void Graph::backward(NodeId loss) {
  Node& ln = nodes_[loss];
  if (ln.value.rows != 1 || ln.value.cols != 1)
    fail(ln, "loss must be scalar, got " + std::to_string(ln.value.rows) + "x" +
                 std::to_string(ln.value.cols));
  for (Node& n : nodes_) {
    n.adjoint = Tensor2(n.value.rows, n.value.cols, 0.0);
  }
  ln.adjoint.data[0] = 1.0;

  for (NodeId id = loss; id >= 0; --id) {
    Node& n = nodes_[id];
    const Tensor2& g = n.adjoint;
    bool live = false;
    for (double v : g.data)
      if (v != 0.0) { live = true; break; }
    if (!live) continue;
    switch (n.kind) {
      case OpKind::Input:
      case OpKind::Param:
        break;
      case OpKind::MatMul: {
        matmul_acc(nodes_[n.preds[0]].adjoint, g, false, val(n.preds[1]), true);
        matmul_acc(nodes_[n.preds[1]].adjoint, val(n.preds[0]), true, g, false);
        break;
      }
      case OpKind::Add: {
        Node& a = nodes_[n.preds[0]];
        Node& b = nodes_[n.preds[1]];
        a.adjoint += g;
        if (broadcasts(a.value, b.value)) {
          for (int r = 0; r < g.rows; ++r)
            for (int c = 0; c < g.cols; ++c) b.adjoint.at(r, 0) += g.at(r, c);
        } else {
          b.adjoint += g;
        }
        break;
      }
      case OpKind::CMul: {
        Node& a = nodes_[n.preds[0]];
        Node& b = nodes_[n.preds[1]];
        const bool bc = broadcasts(a.value, b.value);
        for (int r = 0; r < g.rows; ++r)
          for (int c = 0; c < g.cols; ++c) {
            const double gv = g.at(r, c);
            const double bv = bc ? b.value.at(r, 0) : b.value.at(r, c);
            a.adjoint.at(r, c) += gv * bv;
            if (bc)
              b.adjoint.at(r, 0) += gv * a.value.at(r, c);
            else
              b.adjoint.at(r, c) += gv * a.value.at(r, c);
          }
        break;
      }
      case OpKind::Sigmoid: {
        Tensor2& pa = nodes_[n.preds[0]].adjoint;
        for (size_t i = 0; i < g.data.size(); ++i) {
          const double y = n.value.data[i];
          pa.data[i] += g.data[i] * y * (1.0 - y);
        }
        break;
      }
      case OpKind::Tanh: {
        Tensor2& pa = nodes_[n.preds[0]].adjoint;
        for (size_t i = 0; i < g.data.size(); ++i) {
          const double y = n.value.data[i];
          pa.data[i] += g.data[i] * (1.0 - y * y);
        }
        break;
      }
      case OpKind::LRelu: {
        const Tensor2& x = val(n.preds[0]);
        Tensor2& pa = nodes_[n.preds[0]].adjoint;
        for (size_t i = 0; i < g.data.size(); ++i)
          pa.data[i] += g.data[i] * (x.data[i] < 0.0 ? n.attr : 1.0);
        break;
      }
      case OpKind::Concat: {
        int r0 = 0;
        for (NodeId p : n.preds) {
          Node& part = nodes_[p];
          for (int r = 0; r < part.value.rows; ++r)
            for (int c = 0; c < part.value.cols; ++c)
              part.adjoint.at(r, c) += g.at(r0 + r, c);
          r0 += part.value.rows;
        }
        break;
      }
      case OpKind::Slice: {
        Node& a = nodes_[n.preds[0]];
        for (int r = 0; r < n.nrows; ++r)
          for (int c = 0; c < g.cols; ++c) a.adjoint.at(n.row0 + r, c) += g.at(r, c);
        break;
      }
      case OpKind::SumSquares: {
        Node& a = nodes_[n.preds[0]];
        const double gs = g.data[0];
        for (size_t i = 0; i < a.value.data.size(); ++i)
          a.adjoint.data[i] += 2.0 * gs * a.value.data[i];
        break;
      }
      case OpKind::Scale: {
        Tensor2& pa = nodes_[n.preds[0]].adjoint;
        for (size_t i = 0; i < g.data.size(); ++i) pa.data[i] += g.data[i] * n.attr;
        break;
      }
    }
  }

  grads_.clear();
  if (params_) {
    for (const auto& [name, id] : param_nodes_) grads_[name] = nodes_[id].adjoint;
    // parameters never pulled into this graph still get zero gradients
    for (const std::string& name : params_->names()) {
      if (!grads_.count(name)) {
        const Tensor2& v = params_->value(name);
        grads_[name] = Tensor2(v.rows, v.cols, 0.0);
      }
    }
  }
}

double grad_check(ParamStore& params, const std::function<double(ParamStore&)>& f,
                  const GradMap& analytic, double eps) {
  double worst = 0.0;
  for (int i = 0; i < params.count(); ++i) {
    auto& e = params.entry(i);
    auto it = analytic.find(e.name);
    if (it == analytic.end()) throw std::invalid_argument("grad_check: no analytic grad for " + e.name);
    const Tensor2& a = it->second;
    for (size_t k = 0; k < e.value.data.size(); ++k) {
      const double saved = e.value.data[k];
      e.value.data[k] = saved + eps;
      const double fp = f(params);
      e.value.data[k] = saved - eps;
      const double fm = f(params);
      e.value.data[k] = saved;
      if (!std::isfinite(fp) || !std::isfinite(fm))
        throw std::runtime_error("grad_check: non-finite probe at " + e.name);
      const double numeric = (fp - fm) / (2.0 * eps);
      const double analytic_v = a.data[k];
      const double rel = std::abs(analytic_v - numeric) /
                         std::max({std::abs(analytic_v), std::abs(numeric), 1e-8});
      if (rel > worst) worst = rel;
    }
  }
  return worst;
}

}  // namespace rtn
