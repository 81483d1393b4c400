#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rtn/graph.hpp"
#include "test_util.hpp"

using namespace rtn;
using rtn::test::max_abs_diff;
using rtn::test::oracle_dense;
using rtn::test::random_tensor;

TEST_CASE("lrelu definition and fixed point") {
  Graph g;
  Tensor2 x(2, 1);
  x.data = {2.0, -2.0};
  NodeId n = g.lrelu(g.input(x), 0.1);
  CHECK(g.value(n).data[0] == doctest::Approx(2.0));
  CHECK(g.value(n).data[1] == doctest::Approx(-0.2));

  NodeId z = g.lrelu(g.input(Tensor2(1, 1, 0.0)), 0.3);
  CHECK(g.value(z).data[0] == 0.0);
}

TEST_CASE("lrelu matches a scalar-loop oracle exactly") {
  std::mt19937_64 rng(7);
  Graph g;
  Tensor2 x = random_tensor(13, 5, rng, 3.0);
  NodeId n = g.lrelu(g.input(x), 0.01);
  for (size_t i = 0; i < x.data.size(); ++i) {
    const double want = x.data[i] >= 0 ? x.data[i] : 0.01 * x.data[i];
    CHECK(g.value(n).data[i] == want);
  }
}

TEST_CASE("lrelu rejects non-finite input and bad slopes") {
  Graph g;
  Tensor2 bad(1, 1);
  bad.data[0] = std::numeric_limits<double>::infinity();
  NodeId b = g.input(bad);
  CHECK_THROWS(g.lrelu(b, 0.1));
  CHECK_THROWS(g.lrelu(g.input(Tensor2(1, 1, 1.0)), 0.0));
  CHECK_THROWS(g.lrelu(g.input(Tensor2(1, 1, 1.0)), 1.0));
}

TEST_CASE("sigmoid and tanh at zero") {
  Graph g;
  NodeId s = g.sigmoid(g.input(Tensor2(3, 2, 0.0)));
  NodeId t = g.tanh(g.input(Tensor2(3, 2, 0.0)));
  for (double v : g.value(s).data) CHECK(v == 0.5);
  for (double v : g.value(t).data) CHECK(v == 0.0);
}

TEST_CASE("3-layer MLP forward matches the scalar oracle within 1e-12") {
  std::mt19937_64 rng(11);
  const int in = 9, h1 = 7, h2 = 6, out = 4, batch = 5;
  Tensor2 W1 = random_tensor(h1, in, rng), b1 = random_tensor(h1, 1, rng);
  Tensor2 W2 = random_tensor(h2, h1, rng), b2 = random_tensor(h2, 1, rng);
  Tensor2 W3 = random_tensor(out, h2, rng), b3 = random_tensor(out, 1, rng);
  Tensor2 x = random_tensor(in, batch, rng);

  Graph g;
  NodeId xa = g.input(x);
  NodeId l1 = g.lrelu(g.add(g.matmul(g.input(W1), xa), g.input(b1)), 0.01);
  NodeId l2 = g.lrelu(g.add(g.matmul(g.input(W2), l1), g.input(b2)), 0.01);
  NodeId l3 = g.add(g.matmul(g.input(W3), l2), g.input(b3));

  Tensor2 o1 = oracle_dense(W1, b1, x, 0.01);
  Tensor2 o2 = oracle_dense(W2, b2, o1, 0.01);
  Tensor2 o3 = oracle_dense(W3, b3, o2);
  CHECK(max_abs_diff(g.value(l3), o3) < 1e-12);
}

TEST_CASE("evaluate is deterministic and set_input rebinding recomputes") {
  std::mt19937_64 rng(3);
  Graph g;
  Tensor2 x = random_tensor(4, 3, rng);
  NodeId xi = g.input(x, "x");
  NodeId y = g.tanh(g.scale(xi, 0.5));
  const Tensor2 first = g.value(y);
  g.recompute();
  CHECK(max_abs_diff(first, g.value(y)) == 0.0);  // bit-identical
  g.set_input("x", Tensor2(4, 3, 0.0));
  g.recompute();
  for (double v : g.value(y).data) CHECK(v == 0.0);
  CHECK_THROWS(g.set_input("nope", Tensor2(1, 1)));
  CHECK_THROWS(g.set_input("x", Tensor2(2, 2)));
}

TEST_CASE("shape mismatch errors name the offending node") {
  Graph g;
  NodeId a = g.input(Tensor2(2, 3), "a");
  NodeId b = g.input(Tensor2(4, 3), "b");
  CHECK_THROWS_WITH_AS(g.add(a, b), doctest::Contains("add"), std::runtime_error);
  CHECK_THROWS_WITH_AS(g.matmul(a, a), doctest::Contains("matmul"), std::runtime_error);
}

TEST_CASE("backward: closed form grad of sum((Wx)^2)/2 is (Wx) x^T") {
  std::mt19937_64 rng(5);
  ParamStore ps;
  ps.add("W", random_tensor(4, 6, rng));
  Tensor2 x = random_tensor(6, 1, rng);
  Graph g(&ps);
  NodeId y = g.matmul(g.param("W"), g.input(x));
  NodeId loss = g.scale(g.sum_squares(y), 0.5);
  g.backward(loss);

  const Tensor2 Wx = matmul(ps.value("W"), x);
  Tensor2 want(4, 6);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 6; ++c) want.at(r, c) = Wx.at(r, 0) * x.at(c, 0);
  CHECK(max_abs_diff(g.param_grads().at("W"), want) < 1e-12);
}

TEST_CASE("backward: parameters off the loss path get zero gradients") {
  std::mt19937_64 rng(6);
  ParamStore ps;
  ps.add("used", random_tensor(3, 3, rng));
  ps.add("unused", random_tensor(5, 2, rng));
  Graph g(&ps);
  NodeId loss = g.sum_squares(g.matmul(g.param("used"), g.input(random_tensor(3, 1, rng))));
  g.backward(loss);
  for (double v : g.param_grads().at("unused").data) CHECK(v == 0.0);
}

TEST_CASE("backward rejects a non-scalar loss") {
  Graph g;
  NodeId a = g.input(Tensor2(2, 2, 1.0));
  CHECK_THROWS(g.backward(a));
}

namespace {

// FD-checks a scalar function of a single parameter built by `build`.
void fd_check_op(const char* tag, int rows, int cols,
                 const std::function<NodeId(Graph&, NodeId)>& build, uint64_t seed,
                 double tol = 1e-4) {
  std::mt19937_64 rng(seed);
  ParamStore ps;
  ps.add("p", random_tensor(rows, cols, rng, 0.8));
  auto value = [&](ParamStore& s) {
    Graph g(&s);
    return g.value(g.sum_squares(build(g, g.param("p")))).data[0];
  };
  Graph g(&ps);
  NodeId loss = g.sum_squares(build(g, g.param("p")));
  g.backward(loss);
  const double err = grad_check(ps, value, g.param_grads(), 1e-5);
  INFO(tag);
  CHECK(err < tol);
}

}  // namespace

TEST_CASE("every op kind agrees with central finite differences") {
  std::mt19937_64 rng(42);
  const Tensor2 other = random_tensor(5, 4, rng);
  const Tensor2 colv = random_tensor(5, 1, rng);
  const Tensor2 mat = random_tensor(4, 5, rng);

  fd_check_op("matmul", 5, 4, [&](Graph& g, NodeId p) { return g.matmul(g.input(mat), p); }, 1);
  fd_check_op("add", 5, 4, [&](Graph& g, NodeId p) { return g.add(p, g.input(other)); }, 2);
  fd_check_op("add-broadcast", 5, 1,
              [&](Graph& g, NodeId p) { return g.add(g.input(other), p); }, 3);
  fd_check_op("cmul", 5, 4, [&](Graph& g, NodeId p) { return g.cmul(p, g.input(other)); }, 4);
  fd_check_op("cmul-broadcast", 5, 1,
              [&](Graph& g, NodeId p) { return g.cmul(g.input(other), p); }, 5);
  fd_check_op("sigmoid", 5, 4, [&](Graph& g, NodeId p) { return g.sigmoid(p); }, 6);
  fd_check_op("tanh", 5, 4, [&](Graph& g, NodeId p) { return g.tanh(p); }, 7);
  fd_check_op("lrelu", 5, 4, [&](Graph& g, NodeId p) { return g.lrelu(p, 0.01); }, 8);
  fd_check_op("concat", 5, 4,
              [&](Graph& g, NodeId p) { return g.concat({p, g.input(other), p}); }, 9);
  fd_check_op("slice", 5, 4, [&](Graph& g, NodeId p) { return g.slice(p, 1, 3); }, 10);
  fd_check_op("scale", 5, 4, [&](Graph& g, NodeId p) { return g.scale(p, -1.7); }, 11);
  fd_check_op("sub", 5, 4, [&](Graph& g, NodeId p) { return g.sub(g.input(other), p); }, 12);
  // sum_squares is the reduction in every case above
}

TEST_CASE("adjoint accumulation is linear: grad(f+g) = grad(f) + grad(g)") {
  std::mt19937_64 rng(13);
  ParamStore ps;
  ps.add("W", random_tensor(3, 3, rng));
  const Tensor2 x1 = random_tensor(3, 1, rng), x2 = random_tensor(3, 1, rng);

  auto grads = [&](bool f, bool h) {
    Graph g(&ps);
    NodeId loss = -1;
    if (f) loss = g.sum_squares(g.matmul(g.param("W"), g.input(x1)));
    if (h) {
      NodeId t = g.sum_squares(g.tanh(g.matmul(g.param("W"), g.input(x2))));
      loss = f ? g.add(loss, t) : t;
    }
    g.backward(loss);
    return g.param_grads().at("W");
  };
  const Tensor2 gf = grads(true, false), gh = grads(false, true), gsum = grads(true, true);
  for (size_t i = 0; i < gf.data.size(); ++i)
    CHECK(gsum.data[i] == doctest::Approx(gf.data[i] + gh.data[i]).epsilon(1e-12));
}

TEST_CASE("grad_check: quadratic, sigmoid chain, constant") {
  ParamStore ps;
  ps.add("w", Tensor2(1, 1, 3.0));
  GradMap analytic;
  analytic["w"] = Tensor2(1, 1, 6.0);  // d(w^2)/dw at 3
  auto f = [](ParamStore& s) { return s.value("w").data[0] * s.value("w").data[0]; };
  CHECK(grad_check(ps, f, analytic, 1e-5) < 1e-8);

  std::mt19937_64 rng(17);
  ParamStore ps2;
  ps2.add("w", random_tensor(4, 3, rng));
  const Tensor2 x = random_tensor(3, 1, rng);
  auto chain_value = [&](ParamStore& s) {
    Graph g(&s);
    return g.value(g.sum_squares(g.sigmoid(g.matmul(g.param("w"), g.input(x))))).data[0];
  };
  Graph g2(&ps2);
  NodeId loss = g2.sum_squares(g2.sigmoid(g2.matmul(g2.param("w"), g2.input(x))));
  g2.backward(loss);
  CHECK(grad_check(ps2, chain_value, g2.param_grads(), 1e-5) < 1e-6);

  ParamStore ps3;
  ps3.add("w", Tensor2(2, 2, 1.0));
  GradMap zero;
  zero["w"] = Tensor2(2, 2, 0.0);
  auto constant = [](ParamStore&) { return 4.2; };
  CHECK(grad_check(ps3, constant, zero, 1e-5) == 0.0);
}

TEST_CASE("grad_check rejects non-finite probes") {
  ParamStore ps;
  ps.add("w", Tensor2(1, 1, 1.0));
  GradMap analytic;
  analytic["w"] = Tensor2(1, 1, 0.0);
  auto f = [](ParamStore&) { return std::numeric_limits<double>::quiet_NaN(); };
  CHECK_THROWS(grad_check(ps, f, analytic, 1e-5));
}

TEST_CASE("backward is deterministic") {
  std::mt19937_64 rng(23);
  ParamStore ps;
  ps.add("W", random_tensor(6, 6, rng));
  const Tensor2 x = random_tensor(6, 2, rng);
  auto run = [&] {
    Graph g(&ps);
    NodeId loss = g.sum_squares(g.tanh(g.matmul(g.param("W"), g.input(x))));
    g.backward(loss);
    return g.param_grads().at("W");
  };
  CHECK(max_abs_diff(run(), run()) == 0.0);
}
