#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "vmdkit/dataset.hpp"

namespace vmdkit::graph {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr std::size_t kMaxChebOrder = 8;

struct Graph {
  std::size_t nodes = 0;
  Matrix adjacency;          // A_ij >= 0, directed
  Vector degree;             // D_ii = sum_j A_ij
  Matrix laplacian;          // I - D^{-1/2} A D^{-1/2}; zero-degree rows use 0 for D^{-1/2}
  Matrix scaled_laplacian;   // (2 / lambda_max) L - I
  double lambda_max = 0.0;
};

Graph build_laplacians(const Matrix& adjacency);

/// Dense adjacency from an edge list; duplicate edges accumulate.
Matrix adjacency_from_edges(std::size_t nodes, const std::vector<dataset::Edge>& edges);

struct EigenEstimate {
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool used_dense = false;
};

/// Largest eigenvalue magnitude: power iteration (tol 1e-9, 10,000 iteration
/// cap), falling back to a dense eigensolver for N <= 64 when it stalls.
EigenEstimate largest_eigenvalue_magnitude(const Matrix& m);

/// T_0 = I, T_1 = L, T_m = 2 L T_{m-1} - T_{m-2}, for m < order.
std::vector<Matrix> chebyshev_basis(const Matrix& scaled_laplacian, std::size_t order);

}  // namespace vmdkit::graph
