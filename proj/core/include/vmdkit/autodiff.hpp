#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace vmdkit::graph::ad {

using Matrix = Eigen::MatrixXd;

/// Handle to a node on a Tape.
struct Var {
  std::size_t id = 0;
};

/// Reverse-accumulation tape over dense matrices, limited to the operations
/// the forecaster needs. Rank-3 tensors (node x channel x time) are stored as
/// N x (C*T) matrices with column index c*T + t.
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t self)>;

  Var leaf(Matrix value);
  Var push(Matrix value, Backward backward);

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  const Matrix& grad(Var v) const { return nodes_[v.id].grad; }
  Matrix& grad_of(std::size_t id) { return nodes_[id].grad; }
  const Matrix& value_of(std::size_t id) const { return nodes_[id].value; }

  /// Seeds d(root)/d(root) = 1 for a 1x1 root and propagates to every node.
  void backward(Var root);
  void clear() { nodes_.clear(); }
  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    Backward backward;
  };
  std::vector<Node> nodes_;
};

Var matmul(Tape& t, Var a, Var b);
Var transpose(Tape& t, Var a);
Var add(Tape& t, Var a, Var b);
/// a + 1 * b where b is a single row broadcast over a's rows.
Var add_row_bias(Tape& t, Var a, Var b);
/// Elementwise product with a constant matrix.
Var hadamard_const(Tape& t, const Matrix& c, Var a);
Var sigmoid(Tape& t, Var a);
Var relu(Tape& t, Var a);
Var softmax_rows(Tape& t, Var a);

/// z: N x (C*T), w: T x 1 -> N x C, sum over time.
Var contract_time(Tape& t, Var z, Var w, std::size_t steps);
/// z: N x (C*T), w: C x 1 -> N x T, sum over channels.
Var contract_channel(Tape& t, Var z, Var w, std::size_t steps);
/// z: N x (C*T), v: N x 1 -> C x T, sum over nodes.
Var contract_node(Tape& t, Var z, Var v, std::size_t steps);
/// z: N x (C*T), e: T x T -> N x (C*T); each (n, c) time row is multiplied by e.
Var time_mix(Tape& t, Var z, Var e, std::size_t steps);
/// y: N x (C*T), theta: C x F -> N x (F*T); per (n, t) channel vector times theta.
Var channel_mix(Tape& t, Var y, Var theta, std::size_t steps);
/// Width-3, stride-1, zero "same" padding along time.
/// h: N x (F*T), w: F' x (3F) with column 3f + j for tap j (offset j - 1), b: F' x 1.
Var temporal_conv(Tape& t, Var h, Var w, Var b, std::size_t steps);
/// mean |pred - target| as a 1x1 node.
Var mean_absolute_error(Tape& t, Var pred, const Matrix& target);

}  // namespace vmdkit::graph::ad
