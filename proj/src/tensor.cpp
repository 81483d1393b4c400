#include "rtn/tensor.hpp"

#include <Eigen/Core>

namespace rtn {

namespace {
using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const EMat>;
using MMap = Eigen::Map<EMat>;
}  // namespace

Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
  if (a.cols != b.rows)
    throw std::invalid_argument("matmul: inner dimensions disagree (" + std::to_string(a.cols) +
                                " vs " + std::to_string(b.rows) + ")");
  Tensor2 out(a.rows, b.cols);
  MMap(out.data.data(), out.rows, out.cols).noalias() =
      CMap(a.data.data(), a.rows, a.cols) * CMap(b.data.data(), b.rows, b.cols);
  return out;
}

void matmul_acc(Tensor2& out, const Tensor2& a, bool ta, const Tensor2& b, bool tb) {
  CMap am(a.data.data(), a.rows, a.cols);
  CMap bm(b.data.data(), b.rows, b.cols);
  MMap om(out.data.data(), out.rows, out.cols);
  const int ar = ta ? a.cols : a.rows, ac = ta ? a.rows : a.cols;
  const int br = tb ? b.cols : b.rows, bc = tb ? b.rows : b.cols;
  if (ac != br || out.rows != ar || out.cols != bc)
    throw std::invalid_argument("matmul_acc: shape mismatch");
  if (ta && tb)
    om.noalias() += am.transpose() * bm.transpose();
  else if (ta)
    om.noalias() += am.transpose() * bm;
  else if (tb)
    om.noalias() += am * bm.transpose();
  else
    om.noalias() += am * bm;
}

Tensor2 uniform_fan_in(int rows, int cols, std::mt19937_64& rng) {
  const double s = std::sqrt(1.0 / static_cast<double>(cols > 0 ? cols : 1));
  std::uniform_real_distribution<double> dist(-s, s);
  Tensor2 t(rows, cols);
  for (double& v : t.data) v = dist(rng);
  return t;
}

}  // namespace rtn
