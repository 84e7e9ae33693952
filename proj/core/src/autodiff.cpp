#include "vmdkit/autodiff.hpp"

#include <cmath>

#include "vmdkit/error.hpp"
#include "vmdkit/softplus.hpp"

namespace vmdkit::graph::ad {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidInput(what);
}

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

}  // namespace

Var Tape::leaf(Matrix value) { return push(std::move(value), nullptr); }

Var Tape::push(Matrix value, Backward backward) {
  nodes_.push_back(Node{std::move(value), Matrix(), std::move(backward)});
  return Var{nodes_.size() - 1};
}

void Tape::backward(Var root) {
  require(value(root).size() == 1, "tape backward needs a scalar root");
  for (auto& n : nodes_) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  nodes_[root.id].grad(0, 0) = 1.0;
  for (std::size_t i = root.id + 1; i-- > 0;) {
    if (nodes_[i].backward) nodes_[i].backward(*this, i);
  }
}

Var matmul(Tape& t, Var a, Var b) {
  require(t.value(a).cols() == t.value(b).rows(), "matmul: inner dimensions differ");
  return t.push(t.value(a) * t.value(b), [a, b](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    tp.grad_of(a.id).noalias() += g * tp.value(b).transpose();
    tp.grad_of(b.id).noalias() += tp.value(a).transpose() * g;
  });
}

Var transpose(Tape& t, Var a) {
  return t.push(t.value(a).transpose(),
                [a](Tape& tp, std::size_t self) { tp.grad_of(a.id) += tp.grad_of(self).transpose(); });
}

Var add(Tape& t, Var a, Var b) {
  require(t.value(a).rows() == t.value(b).rows() && t.value(a).cols() == t.value(b).cols(), "add: shapes differ");
  return t.push(t.value(a) + t.value(b), [a, b](Tape& tp, std::size_t self) {
    tp.grad_of(a.id) += tp.grad_of(self);
    tp.grad_of(b.id) += tp.grad_of(self);
  });
}

Var add_row_bias(Tape& t, Var a, Var b) {
  require(t.value(b).rows() == 1 && t.value(b).cols() == t.value(a).cols(), "add_row_bias: bias must be 1 x cols");
  Matrix out = t.value(a).rowwise() + t.value(b).row(0);
  return t.push(std::move(out), [a, b](Tape& tp, std::size_t self) {
    tp.grad_of(a.id) += tp.grad_of(self);
    tp.grad_of(b.id) += tp.grad_of(self).colwise().sum();
  });
}

Var hadamard_const(Tape& t, const Matrix& c, Var a) {
  require(c.rows() == t.value(a).rows() && c.cols() == t.value(a).cols(), "hadamard: shapes differ");
  return t.push(c.cwiseProduct(t.value(a)), [c, a](Tape& tp, std::size_t self) {
    tp.grad_of(a.id) += c.cwiseProduct(tp.grad_of(self));
  });
}

Var sigmoid(Tape& t, Var a) {
  Matrix out = t.value(a).unaryExpr([](double x) { return vmdkit::sigmoid(x); });
  return t.push(std::move(out), [a](Tape& tp, std::size_t self) {
    const Matrix& y = tp.value_of(self);
    tp.grad_of(a.id) += tp.grad_of(self).cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix()));
  });
}

Var relu(Tape& t, Var a) {
  Matrix out = t.value(a).cwiseMax(0.0);
  return t.push(std::move(out), [a](Tape& tp, std::size_t self) {
    const Matrix& x = tp.value(a);
    const Matrix& g = tp.grad_of(self);
    Matrix& ga = tp.grad_of(a.id);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x.data()[i] > 0.0) ga.data()[i] += g.data()[i];
    }
  });
}

Var softmax_rows(Tape& t, Var a) {
  const Matrix& x = t.value(a);
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mx = x.row(r).maxCoeff();
    double s = 0.0;
    for (Eigen::Index c = 0; c < x.cols(); ++c) s += (out(r, c) = std::exp(x(r, c) - mx));
    out.row(r) /= s;
  }
  return t.push(std::move(out), [a](Tape& tp, std::size_t self) {
    const Matrix& y = tp.value_of(self);
    const Matrix& g = tp.grad_of(self);
    Matrix& ga = tp.grad_of(a.id);
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      const double dot = y.row(r).dot(g.row(r));
      for (Eigen::Index c = 0; c < y.cols(); ++c) ga(r, c) += y(r, c) * (g(r, c) - dot);
    }
  });
}

Var contract_time(Tape& t, Var z, Var w, std::size_t steps) {
  const Matrix& zv = t.value(z);
  const Matrix& wv = t.value(w);
  require(wv.rows() == idx(steps) && wv.cols() == 1, "contract_time: weight must be T x 1");
  require(zv.cols() % idx(steps) == 0, "contract_time: tensor width is not a multiple of T");
  const Eigen::Index C = zv.cols() / idx(steps), T = idx(steps);
  Matrix out(zv.rows(), C);
  for (Eigen::Index c = 0; c < C; ++c) out.col(c) = zv.middleCols(c * T, T) * wv;
  return t.push(std::move(out), [z, w, C, T](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    const Matrix& zv = tp.value(z);
    const Matrix& wv = tp.value(w);
    for (Eigen::Index c = 0; c < C; ++c) {
      tp.grad_of(z.id).middleCols(c * T, T).noalias() += g.col(c) * wv.transpose();
      tp.grad_of(w.id).noalias() += zv.middleCols(c * T, T).transpose() * g.col(c);
    }
  });
}

Var contract_channel(Tape& t, Var z, Var w, std::size_t steps) {
  const Matrix& zv = t.value(z);
  const Matrix& wv = t.value(w);
  const Eigen::Index T = idx(steps);
  require(zv.cols() % T == 0, "contract_channel: tensor width is not a multiple of T");
  const Eigen::Index C = zv.cols() / T;
  require(wv.rows() == C && wv.cols() == 1, "contract_channel: weight must be C x 1");
  Matrix out = Matrix::Zero(zv.rows(), T);
  for (Eigen::Index c = 0; c < C; ++c) out += wv(c, 0) * zv.middleCols(c * T, T);
  return t.push(std::move(out), [z, w, C, T](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    const Matrix& zv = tp.value(z);
    const Matrix& wv = tp.value(w);
    for (Eigen::Index c = 0; c < C; ++c) {
      tp.grad_of(z.id).middleCols(c * T, T) += wv(c, 0) * g;
      tp.grad_of(w.id)(c, 0) += zv.middleCols(c * T, T).cwiseProduct(g).sum();
    }
  });
}

Var contract_node(Tape& t, Var z, Var v, std::size_t steps) {
  const Matrix& zv = t.value(z);
  const Matrix& vv = t.value(v);
  const Eigen::Index T = idx(steps);
  require(vv.rows() == zv.rows() && vv.cols() == 1, "contract_node: weight must be N x 1");
  require(zv.cols() % T == 0, "contract_node: tensor width is not a multiple of T");
  const Eigen::Index C = zv.cols() / T;
  const Eigen::RowVectorXd flat = vv.transpose() * zv;
  Matrix out(C, T);
  for (Eigen::Index c = 0; c < C; ++c) out.row(c) = flat.segment(c * T, T);
  return t.push(std::move(out), [z, v, C, T](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    Eigen::RowVectorXd gflat(C * T);
    for (Eigen::Index c = 0; c < C; ++c) gflat.segment(c * T, T) = g.row(c);
    tp.grad_of(z.id).noalias() += tp.value(v) * gflat;
    tp.grad_of(v.id).noalias() += tp.value(z) * gflat.transpose();
  });
}

Var time_mix(Tape& t, Var z, Var e, std::size_t steps) {
  const Matrix& zv = t.value(z);
  const Matrix& ev = t.value(e);
  const Eigen::Index T = idx(steps);
  require(ev.rows() == T && ev.cols() == T, "time_mix: mixing matrix must be T x T");
  require(zv.cols() % T == 0, "time_mix: tensor width is not a multiple of T");
  const Eigen::Index C = zv.cols() / T;
  Matrix out(zv.rows(), zv.cols());
  for (Eigen::Index c = 0; c < C; ++c) out.middleCols(c * T, T).noalias() = zv.middleCols(c * T, T) * ev;
  return t.push(std::move(out), [z, e, C, T](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    for (Eigen::Index c = 0; c < C; ++c) {
      tp.grad_of(z.id).middleCols(c * T, T).noalias() += g.middleCols(c * T, T) * tp.value(e).transpose();
      tp.grad_of(e.id).noalias() += tp.value(z).middleCols(c * T, T).transpose() * g.middleCols(c * T, T);
    }
  });
}

Var channel_mix(Tape& t, Var y, Var theta, std::size_t steps) {
  const Matrix& yv = t.value(y);
  const Matrix& th = t.value(theta);
  const Eigen::Index T = idx(steps);
  require(yv.cols() % T == 0, "channel_mix: tensor width is not a multiple of T");
  const Eigen::Index C = yv.cols() / T, F = th.cols();
  require(th.rows() == C, "channel_mix: theta must be C x F");
  Matrix out = Matrix::Zero(yv.rows(), F * T);
  for (Eigen::Index c = 0; c < C; ++c) {
    for (Eigen::Index f = 0; f < F; ++f) out.middleCols(f * T, T) += th(c, f) * yv.middleCols(c * T, T);
  }
  return t.push(std::move(out), [y, theta, C, F, T](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    const Matrix& yv = tp.value(y);
    const Matrix& th = tp.value(theta);
    for (Eigen::Index c = 0; c < C; ++c) {
      for (Eigen::Index f = 0; f < F; ++f) {
        tp.grad_of(y.id).middleCols(c * T, T) += th(c, f) * g.middleCols(f * T, T);
        tp.grad_of(theta.id)(c, f) += yv.middleCols(c * T, T).cwiseProduct(g.middleCols(f * T, T)).sum();
      }
    }
  });
}

Var temporal_conv(Tape& t, Var h, Var w, Var b, std::size_t steps) {
  const Matrix& hv = t.value(h);
  const Matrix& wv = t.value(w);
  const Matrix& bv = t.value(b);
  const Eigen::Index T = idx(steps);
  require(hv.cols() % T == 0, "temporal_conv: tensor width is not a multiple of T");
  const Eigen::Index F = hv.cols() / T, G = wv.rows();
  require(wv.cols() == 3 * F, "temporal_conv: weight must be F' x 3F");
  require(bv.rows() == G && bv.cols() == 1, "temporal_conv: bias must be F' x 1");
  const Eigen::Index N = hv.rows();
  Matrix out(N, G * T);
  for (Eigen::Index g = 0; g < G; ++g) out.middleCols(g * T, T).setConstant(bv(g, 0));
  for (Eigen::Index g = 0; g < G; ++g) {
    for (Eigen::Index f = 0; f < F; ++f) {
      for (Eigen::Index j = 0; j < 3; ++j) {
        const double k = wv(g, 3 * f + j);
        const Eigen::Index off = j - 1;
        for (Eigen::Index tt = 0; tt < T; ++tt) {
          const Eigen::Index src = tt + off;
          if (src < 0 || src >= T) continue;
          out.col(g * T + tt) += k * hv.col(f * T + src);
        }
      }
    }
  }
  return t.push(std::move(out), [h, w, b, F, G, T](Tape& tp, std::size_t self) {
    const Matrix& gr = tp.grad_of(self);
    const Matrix& hv = tp.value(h);
    const Matrix& wv = tp.value(w);
    for (Eigen::Index g = 0; g < G; ++g) {
      tp.grad_of(b.id)(g, 0) += gr.middleCols(g * T, T).sum();
      for (Eigen::Index f = 0; f < F; ++f) {
        for (Eigen::Index j = 0; j < 3; ++j) {
          const Eigen::Index off = j - 1;
          double acc = 0.0;
          for (Eigen::Index tt = 0; tt < T; ++tt) {
            const Eigen::Index src = tt + off;
            if (src < 0 || src >= T) continue;
            acc += gr.col(g * T + tt).dot(hv.col(f * T + src));
            tp.grad_of(h.id).col(f * T + src) += wv(g, 3 * f + j) * gr.col(g * T + tt);
          }
          tp.grad_of(w.id)(g, 3 * f + j) += acc;
        }
      }
    }
  });
}

Var mean_absolute_error(Tape& t, Var pred, const Matrix& target) {
  const Matrix& p = t.value(pred);
  require(p.rows() == target.rows() && p.cols() == target.cols(), "mae: prediction/target shapes differ");
  Matrix out(1, 1);
  out(0, 0) = (p - target).cwiseAbs().mean();
  return t.push(std::move(out), [pred, target](Tape& tp, std::size_t self) {
    const double g = tp.grad_of(self)(0, 0) / static_cast<double>(target.size());
    const Matrix& p = tp.value(pred);
    Matrix& gp = tp.grad_of(pred.id);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double d = p.data()[i] - target.data()[i];
      gp.data()[i] += d > 0.0 ? g : (d < 0.0 ? -g : 0.0);
    }
  });
}

}  // namespace vmdkit::graph::ad
