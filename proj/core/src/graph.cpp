#include "vmdkit/graph.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "vmdkit/error.hpp"

namespace vmdkit::graph {

Graph build_laplacians(const Matrix& adjacency) {
  if (adjacency.rows() != adjacency.cols()) throw InvalidInput("adjacency must be square");
  if (adjacency.rows() == 0) throw InvalidInput("adjacency must have at least one node");
  for (Eigen::Index i = 0; i < adjacency.rows(); ++i) {
    for (Eigen::Index j = 0; j < adjacency.cols(); ++j) {
      const double a = adjacency(i, j);
      if (!std::isfinite(a)) throw InvalidInput("adjacency has a non-finite weight");
      if (a < 0.0) {
        throw InvalidInput("adjacency has a negative weight at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }

  Graph g;
  g.nodes = static_cast<std::size_t>(adjacency.rows());
  g.adjacency = adjacency;
  g.degree = Vector::Zero(adjacency.rows());
  for (Eigen::Index i = 0; i < adjacency.rows(); ++i) {
    for (Eigen::Index j = 0; j < adjacency.cols(); ++j) g.degree(i) += adjacency(i, j);
  }

  Vector inv_sqrt(g.nodes);
  for (std::size_t i = 0; i < g.nodes; ++i) {
    const double d = g.degree(static_cast<Eigen::Index>(i));
    inv_sqrt(static_cast<Eigen::Index>(i)) = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  const auto n = static_cast<Eigen::Index>(g.nodes);
  g.laplacian = Matrix::Identity(n, n) - inv_sqrt.asDiagonal() * adjacency * inv_sqrt.asDiagonal();

  const auto estimate = largest_eigenvalue_magnitude(g.laplacian);
  if (!(estimate.value > 0.0)) throw DegenerateInput("normalized Laplacian has no nonzero eigenvalue");
  g.lambda_max = estimate.value;
  g.scaled_laplacian = (2.0 / g.lambda_max) * g.laplacian - Matrix::Identity(n, n);
  return g;
}

Matrix adjacency_from_edges(std::size_t nodes, const std::vector<dataset::Edge>& edges) {
  const auto n = static_cast<Eigen::Index>(nodes);
  Matrix a = Matrix::Zero(n, n);
  for (const auto& e : edges) {
    if (e.src >= nodes || e.dst >= nodes) {
      throw DataError("edge (" + std::to_string(e.src) + ", " + std::to_string(e.dst) + ") references a node >= " +
                      std::to_string(nodes));
    }
    a(static_cast<Eigen::Index>(e.src), static_cast<Eigen::Index>(e.dst)) += e.weight;
  }
  return a;
}

EigenEstimate largest_eigenvalue_magnitude(const Matrix& m) {
  constexpr double kTol = 1e-9;
  constexpr std::size_t kCap = 10000;
  const Eigen::Index n = m.rows();

  EigenEstimate est;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.37 * std::sin(1.7 * static_cast<double>(i + 1));
  v.normalize();

  double previous = 0.0;
  for (std::size_t it = 1; it <= kCap; ++it) {
    Vector w = m * v;
    const double norm = w.norm();
    est.iterations = it;
    if (norm == 0.0) {
      est.value = 0.0;
      break;
    }
    v = w / norm;
    est.value = norm;
    if (it > 1 && std::abs(norm - previous) <= kTol * norm) {
      est.converged = true;
      break;
    }
    previous = norm;
  }

  if (!est.converged && n <= 64) {
    Eigen::EigenSolver<Matrix> solver(m, false);
    double best = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) best = std::max(best, std::abs(solver.eigenvalues()(i)));
    est.value = best;
    est.used_dense = true;
  }
  return est;
}

std::vector<Matrix> chebyshev_basis(const Matrix& scaled_laplacian, std::size_t order) {
  if (order < 1) throw InvalidConfig("chebyshev order must be >= 1");
  if (order > kMaxChebOrder) {
    throw InvalidConfig("chebyshev order " + std::to_string(order) + " exceeds the cap of " +
                        std::to_string(kMaxChebOrder));
  }
  const Eigen::Index n = scaled_laplacian.rows();
  std::vector<Matrix> basis;
  basis.push_back(Matrix::Identity(n, n));
  if (order > 1) basis.push_back(scaled_laplacian);
  for (std::size_t m = 2; m < order; ++m) {
    basis.push_back(2.0 * scaled_laplacian * basis[m - 1] - basis[m - 2]);
  }
  return basis;
}

}  // namespace vmdkit::graph
