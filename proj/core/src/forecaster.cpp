#include "vmdkit/forecaster.hpp"

#include <cmath>
#include <random>
#include <string>

#include "vmdkit/error.hpp"

namespace vmdkit::graph {
namespace {

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

std::string shape_str(Eigen::Index r, Eigen::Index c) { return std::to_string(r) + "x" + std::to_string(c); }

void expect_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* name) {
  if (m.rows() != idx(rows) || m.cols() != idx(cols)) {
    throw InvalidInput(std::string(name) + ": expected " + shape_str(idx(rows), idx(cols)) + ", got " +
                       shape_str(m.rows(), m.cols()));
  }
}

void expect_finite(const Matrix& m, const std::string& name) {
  if (!m.allFinite()) throw InvalidInput(name + " has non-finite entries");
}

// Leaf handles in ForecasterParams::for_each order.
struct Leaves {
  ad::Var Vs, bs, W1, W2, W3, Ve, be, V1, V2, V3;
  std::vector<ad::Var> theta;
  ad::Var conv_w, conv_b, head_w, head_b;
};

Leaves push_leaves(ad::Tape& t, const ForecasterParams& p) {
  const auto& a = p.attention;
  Leaves l;
  l.Vs = t.leaf(a.Vs);
  l.bs = t.leaf(a.bs);
  l.W1 = t.leaf(a.W1);
  l.W2 = t.leaf(a.W2);
  l.W3 = t.leaf(a.W3);
  l.Ve = t.leaf(a.Ve);
  l.be = t.leaf(a.be);
  l.V1 = t.leaf(a.V1);
  l.V2 = t.leaf(a.V2);
  l.V3 = t.leaf(a.V3);
  for (const auto& th : p.cheb.theta) l.theta.push_back(t.leaf(th));
  l.conv_w = t.leaf(p.conv_w);
  l.conv_b = t.leaf(p.conv_b);
  l.head_w = t.leaf(p.head_w);
  l.head_b = t.leaf(p.head_b);
  return l;
}

struct TemporalNodes {
  ad::Var weights, adjusted;
};

TemporalNodes temporal_nodes(ad::Tape& t, ad::Var z, std::size_t steps, ad::Var V1, ad::Var V2, ad::Var V3,
                             ad::Var Ve, ad::Var be) {
  const ad::Var left = ad::matmul(t, ad::transpose(t, ad::contract_node(t, z, V1, steps)), ad::transpose(t, V2));
  const ad::Var right = ad::contract_channel(t, z, V3, steps);
  const ad::Var logits = ad::add(t, ad::matmul(t, left, right), be);
  const ad::Var e = ad::softmax_rows(t, ad::matmul(t, Ve, ad::sigmoid(t, logits)));
  return {e, ad::time_mix(t, z, e, steps)};
}

ad::Var spatial_node(ad::Tape& t, ad::Var z, std::size_t steps, ad::Var W1, ad::Var W2, ad::Var W3, ad::Var Vs,
                     ad::Var bs) {
  const ad::Var left = ad::matmul(t, ad::contract_time(t, z, W1, steps), W2);
  const ad::Var right = ad::contract_channel(t, z, W3, steps);
  const ad::Var logits = ad::add(t, ad::matmul(t, left, ad::transpose(t, right)), bs);
  return ad::softmax_rows(t, ad::matmul(t, Vs, ad::sigmoid(t, logits)));
}

ad::Var cheb_node(ad::Tape& t, ad::Var z, std::size_t steps, ad::Var spatial, const std::vector<Matrix>& basis,
                  const std::vector<ad::Var>& theta) {
  ad::Var acc{};
  for (std::size_t m = 0; m < theta.size(); ++m) {
    const ad::Var masked = ad::hadamard_const(t, basis[m], spatial);
    const ad::Var term = ad::channel_mix(t, ad::matmul(t, masked, z), theta[m], steps);
    acc = m == 0 ? term : ad::add(t, acc, term);
  }
  return ad::relu(t, acc);
}

void check_window(const FeatureTensor& x, const Graph& g, const ForecasterShape& s) {
  x.validate();
  if (x.nodes != g.nodes) {
    throw InvalidInput("window has " + std::to_string(x.nodes) + " nodes, graph has " + std::to_string(g.nodes));
  }
  if (x.nodes != s.nodes || x.channels != s.channels || x.steps != s.window) {
    throw InvalidInput("window shape " + std::to_string(x.nodes) + "x" + std::to_string(x.channels) + "x" +
                       std::to_string(x.steps) + " does not match model " + std::to_string(s.nodes) + "x" +
                       std::to_string(s.channels) + "x" + std::to_string(s.window));
  }
}

ad::Var build(ad::Tape& t, const Leaves& l, const FeatureTensor& x, const std::vector<Matrix>& basis) {
  const std::size_t T = x.steps;
  const ad::Var z = t.leaf(x.data);
  const auto temporal = temporal_nodes(t, z, T, l.V1, l.V2, l.V3, l.Ve, l.be);
  const ad::Var spatial = spatial_node(t, temporal.adjusted, T, l.W1, l.W2, l.W3, l.Vs, l.bs);
  const ad::Var conv = cheb_node(t, temporal.adjusted, T, spatial, basis, l.theta);
  const ad::Var timed = ad::temporal_conv(t, conv, l.conv_w, l.conv_b, T);
  return ad::add_row_bias(t, ad::matmul(t, timed, l.head_w), l.head_b);
}

}  // namespace

FeatureTensor FeatureTensor::zeros(std::size_t nodes, std::size_t channels, std::size_t steps) {
  FeatureTensor f;
  f.nodes = nodes;
  f.channels = channels;
  f.steps = steps;
  f.data = Matrix::Zero(idx(nodes), idx(channels * steps));
  return f;
}

void FeatureTensor::validate() const {
  if (nodes == 0 || channels == 0 || steps == 0) throw InvalidInput("feature tensor needs nodes, channels and steps >= 1");
  expect_shape(data, nodes, channels * steps, "feature tensor");
  expect_finite(data, "feature tensor");
}

AttentionParams AttentionParams::zeros(std::size_t nodes, std::size_t channels, std::size_t steps) {
  const auto N = idx(nodes), C = idx(channels), T = idx(steps);
  return AttentionParams{Matrix::Zero(N, N), Matrix::Zero(N, N), Matrix::Zero(T, 1), Matrix::Zero(C, T),
                         Matrix::Zero(C, 1), Matrix::Zero(T, T), Matrix::Zero(T, T), Matrix::Zero(N, 1),
                         Matrix::Zero(N, C), Matrix::Zero(C, 1)};
}

void AttentionParams::check_shapes(std::size_t N, std::size_t C, std::size_t T) const {
  expect_shape(Vs, N, N, "V_s");
  expect_shape(bs, N, N, "b_s");
  expect_shape(W1, T, 1, "W1");
  expect_shape(W2, C, T, "W2");
  expect_shape(W3, C, 1, "W3");
  expect_shape(Ve, T, T, "V_e");
  expect_shape(be, T, T, "b_e");
  expect_shape(V1, N, 1, "V1");
  expect_shape(V2, N, C, "V2");
  expect_shape(V3, C, 1, "V3");
}

void ForecasterShape::validate() const {
  if (nodes == 0) throw InvalidConfig("forecaster.nodes must be >= 1");
  if (channels == 0) throw InvalidConfig("forecaster.channels must be >= 1");
  if (window == 0) throw InvalidConfig("forecaster.window must be >= 1");
  if (horizon == 0) throw InvalidConfig("forecaster.horizon must be >= 1");
  if (cheb_order == 0) throw InvalidConfig("forecaster.cheb_order must be >= 1");
  if (cheb_order > kMaxChebOrder) {
    throw InvalidConfig("forecaster.cheb_order " + std::to_string(cheb_order) + " exceeds the cap of " +
                        std::to_string(kMaxChebOrder));
  }
  if (cheb_filters == 0) throw InvalidConfig("forecaster.cheb_filters must be >= 1");
  if (time_filters == 0) throw InvalidConfig("forecaster.time_filters must be >= 1");
}

ForecasterParams ForecasterParams::initial(const ForecasterShape& shape, std::uint64_t seed) {
  shape.validate();
  const auto N = idx(shape.nodes), C = idx(shape.channels), T = idx(shape.window), H = idx(shape.horizon);
  const auto F = idx(shape.cheb_filters), G = idx(shape.time_filters);

  std::mt19937_64 rng(seed);
  auto glorot = [&rng](Eigen::Index rows, Eigen::Index cols, double fan_in, double fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-limit, limit);
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng);
    }
    return m;
  };
  auto plain = [&](Eigen::Index r, Eigen::Index c) {
    return glorot(r, c, static_cast<double>(r), static_cast<double>(c));
  };

  ForecasterParams p;
  p.shape = shape;
  auto& a = p.attention;
  a.Vs = plain(N, N);
  a.bs = Matrix::Zero(N, N);
  a.W1 = plain(T, 1);
  a.W2 = plain(C, T);
  a.W3 = plain(C, 1);
  a.Ve = plain(T, T);
  a.be = Matrix::Zero(T, T);
  a.V1 = plain(N, 1);
  a.V2 = plain(N, C);
  a.V3 = plain(C, 1);
  for (std::size_t m = 0; m < shape.cheb_order; ++m) p.cheb.theta.push_back(plain(C, F));
  p.conv_w = glorot(G, 3 * F, 3.0 * static_cast<double>(F), static_cast<double>(G));
  p.conv_b = Matrix::Zero(G, 1);
  p.head_w = plain(G * T, H);
  p.head_b = Matrix::Zero(1, H);
  return p;
}

void ForecasterParams::validate() const {
  shape.validate();
  const std::size_t N = shape.nodes, C = shape.channels, T = shape.window, H = shape.horizon;
  const std::size_t F = shape.cheb_filters, G = shape.time_filters;
  attention.check_shapes(N, C, T);
  if (cheb.order() != shape.cheb_order) {
    throw InvalidInput("expected " + std::to_string(shape.cheb_order) + " Chebyshev blocks, got " +
                       std::to_string(cheb.order()));
  }
  for (const auto& th : cheb.theta) expect_shape(th, C, F, "theta");
  expect_shape(conv_w, G, 3 * F, "conv_w");
  expect_shape(conv_b, G, 1, "conv_b");
  expect_shape(head_w, G * T, H, "head_w");
  expect_shape(head_b, 1, H, "head_b");
  for_each([](const std::string& name, const Matrix& m) { expect_finite(m, name); });
}

void ForecasterParams::for_each(const std::function<void(const std::string&, Matrix&)>& fn) {
  auto& a = attention;
  fn("Vs", a.Vs);
  fn("bs", a.bs);
  fn("W1", a.W1);
  fn("W2", a.W2);
  fn("W3", a.W3);
  fn("Ve", a.Ve);
  fn("be", a.be);
  fn("V1", a.V1);
  fn("V2", a.V2);
  fn("V3", a.V3);
  for (std::size_t m = 0; m < cheb.theta.size(); ++m) fn("theta" + std::to_string(m), cheb.theta[m]);
  fn("conv_w", conv_w);
  fn("conv_b", conv_b);
  fn("head_w", head_w);
  fn("head_b", head_b);
}

void ForecasterParams::for_each(const std::function<void(const std::string&, const Matrix&)>& fn) const {
  const_cast<ForecasterParams*>(this)->for_each([&fn](const std::string& name, Matrix& m) { fn(name, m); });
}

std::size_t ForecasterParams::size() const {
  std::size_t n = 0;
  for_each([&n](const std::string&, const Matrix& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

Matrix spatial_attention(const FeatureTensor& z, const AttentionParams& p) {
  z.validate();
  p.check_shapes(z.nodes, z.channels, z.steps);
  ad::Tape t;
  const ad::Var s = spatial_node(t, t.leaf(z.data), z.steps, t.leaf(p.W1), t.leaf(p.W2), t.leaf(p.W3), t.leaf(p.Vs),
                                 t.leaf(p.bs));
  return t.value(s);
}

TemporalAttention temporal_attention(const FeatureTensor& z, const AttentionParams& p) {
  z.validate();
  p.check_shapes(z.nodes, z.channels, z.steps);
  ad::Tape t;
  const auto nodes = temporal_nodes(t, t.leaf(z.data), z.steps, t.leaf(p.V1), t.leaf(p.V2), t.leaf(p.V3),
                                    t.leaf(p.Ve), t.leaf(p.be));
  TemporalAttention out{t.value(nodes.weights), z};
  out.adjusted.data = t.value(nodes.adjusted);
  return out;
}

Matrix cheb_conv(const FeatureTensor& z_adjusted, const Graph& g, const Matrix& spatial, const ChebParams& cheb) {
  z_adjusted.validate();
  if (cheb.order() == 0) throw InvalidConfig("Chebyshev order must be >= 1");
  if (cheb.order() > kMaxChebOrder) {
    throw InvalidConfig("Chebyshev order " + std::to_string(cheb.order()) + " exceeds the cap of " +
                        std::to_string(kMaxChebOrder));
  }
  if (z_adjusted.nodes != g.nodes) throw InvalidInput("feature tensor and graph disagree on node count");
  expect_shape(spatial, g.nodes, g.nodes, "spatial attention");
  for (const auto& th : cheb.theta) {
    if (th.rows() != idx(z_adjusted.channels) || th.cols() != cheb.theta.front().cols()) {
      throw InvalidInput("theta: expected " + std::to_string(z_adjusted.channels) + " input channels, got " +
                         shape_str(th.rows(), th.cols()));
    }
  }
  const auto basis = chebyshev_basis(g.scaled_laplacian, cheb.order());
  ad::Tape t;
  std::vector<ad::Var> theta;
  for (const auto& th : cheb.theta) theta.push_back(t.leaf(th));
  return t.value(cheb_node(t, t.leaf(z_adjusted.data), z_adjusted.steps, t.leaf(spatial), basis, theta));
}

Matrix forecaster_forward(const FeatureTensor& window, const Graph& g, const ForecasterParams& params) {
  params.validate();
  check_window(window, g, params.shape);
  const auto basis = chebyshev_basis(g.scaled_laplacian, params.shape.cheb_order);
  ad::Tape t;
  const Leaves l = push_leaves(t, params);
  return t.value(build(t, l, window, basis));
}

namespace detail {

// Shared by training: the basis is computed once per graph, not per window.
double loss_and_grad(const FeatureTensor& window, const Matrix& target, const std::vector<Matrix>& basis,
                     const ForecasterParams& params, ForecasterParams* grad) {
  ad::Tape t;
  const Leaves l = push_leaves(t, params);
  const ad::Var pred = build(t, l, window, basis);
  const ad::Var loss = ad::mean_absolute_error(t, pred, target);
  const double value = t.value(loss)(0, 0);
  if (!std::isfinite(value)) throw NumericFailure("forecaster loss is not finite");
  if (grad) {
    t.backward(loss);
    *grad = params;
    std::size_t id = l.Vs.id;  // leaves were pushed contiguously in for_each order
    grad->for_each([&](const std::string&, Matrix& m) { m = t.grad(ad::Var{id++}); });
  }
  return value;
}

}  // namespace detail

ForecasterGradients forecaster_gradients(const FeatureTensor& window, const Matrix& target, const Graph& g,
                                         const ForecasterParams& params) {
  params.validate();
  check_window(window, g, params.shape);
  expect_shape(target, params.shape.nodes, params.shape.horizon, "target");
  const auto basis = chebyshev_basis(g.scaled_laplacian, params.shape.cheb_order);
  ForecasterGradients out;
  out.loss = detail::loss_and_grad(window, target, basis, params, &out.grad);
  return out;
}

double forecaster_loss(const FeatureTensor& window, const Matrix& target, const Graph& g,
                       const ForecasterParams& params) {
  params.validate();
  check_window(window, g, params.shape);
  expect_shape(target, params.shape.nodes, params.shape.horizon, "target");
  const auto basis = chebyshev_basis(g.scaled_laplacian, params.shape.cheb_order);
  return detail::loss_and_grad(window, target, basis, params, nullptr);
}

}  // namespace vmdkit::graph
