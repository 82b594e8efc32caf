#pragma once

// Graphs as adjacency matrices, the binary products on them, the Laplacian
// L = A - diag(A 1), and a dense Jacobi eigensolver used as a test oracle.

#include <iosfwd>
#include <string_view>
#include <vector>

#include "skel/sparse.hpp"

namespace skel {

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Graph {
 public:
  Graph() = default;
  /// Throws GraphError if adj is not square, has negative values, or is
  /// declared undirected without being symmetric.
  explicit Graph(SparseMatrix adj, bool undirected = true);

  const SparseMatrix& adj() const noexcept { return adj_; }
  bool undirected() const noexcept { return undirected_; }
  Index order() const noexcept { return adj_.rows(); }
  /// Undirected edge count; a self-loop counts once.
  Index edge_count() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  SparseMatrix adj_;
  bool undirected_ = true;
};

Graph empty_graph(Index n);
/// One vertex carrying one self-loop.
Graph loop_vertex();
Graph path_graph(Index n);
Graph cycle_graph(Index n);
Graph complete_graph(Index n);

Graph oplus(const Graph& g1, const Graph& g2);
Graph box(const Graph& g1, const Graph& g2);
Graph cross(const Graph& g1, const Graph& g2);
Graph strong(const Graph& g1, const Graph& g2);
SparseMatrix laplacian(const Graph& g);

/// Witness for G1 op (G2 ⊕ G3) ≅ (G1 op G2) ⊕ (G1 op G3): sends the product
/// index i·(n2+n3)+a to its slot in the concatenated layout.
Permutation distributive_permutation(Index n1, Index n2, Index n3);

struct EigPair {
  double value = 0.0;
  std::vector<double> vector;
};

/// Cyclic Jacobi on a dense copy. Stops once the off-diagonal Frobenius norm
/// is at most 1e-12·‖M‖_F. Eigenvalues ascending; vectors unit length.
std::vector<EigPair> dense_eig_sym(const SparseMatrix& m, Index max_order = 256);
std::vector<double> eigenvalues(const SparseMatrix& m, Index max_order = 256);
/// ‖M v − λ v‖∞.
double eig_residual(const SparseMatrix& m, const EigPair& p);

void write_dot(std::ostream& out, const Graph& g, std::string_view name = "G");
/// "u v" per undirected edge (u ≤ v), 0-based.
void write_edge_list(std::ostream& out, const Graph& g);

}  // namespace skel
