#include "skel/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace skel {

namespace {

void require_same_kind(const Graph& g1, const Graph& g2, const char* op) {
  if (g1.undirected() != g2.undirected()) {
    throw GraphError(std::string(op) + ": mixing directed and undirected graphs");
  }
}

}  // namespace

Graph::Graph(SparseMatrix adj, bool undirected)
    : adj_(std::move(adj)), undirected_(undirected) {
  if (!adj_.is_square()) {
    throw GraphError("adjacency must be square, got " + std::to_string(adj_.rows()) + "x" +
                     std::to_string(adj_.cols()));
  }
  for (const auto& t : adj_.entries()) {
    if (t.value < 0.0) throw GraphError("adjacency has a negative weight");
  }
  if (undirected_ && !is_symmetric(adj_)) {
    throw GraphError("undirected graph with non-symmetric adjacency");
  }
}

Index Graph::edge_count() const {
  Index loops = 0;
  for (const auto& t : adj_.entries()) {
    if (t.row == t.col) ++loops;
  }
  return undirected_ ? (adj_.nnz() - loops) / 2 + loops : adj_.nnz();
}

Graph empty_graph(Index n) { return Graph(SparseMatrix(n, n)); }

Graph loop_vertex() { return Graph(SparseMatrix::identity(1)); }

Graph path_graph(Index n) {
  std::vector<Triplet> e;
  for (Index i = 0; i + 1 < n; ++i) {
    e.push_back({i, i + 1, 1.0});
    e.push_back({i + 1, i, 1.0});
  }
  return Graph(SparseMatrix::from_triplets(n, n, std::move(e)));
}

Graph cycle_graph(Index n) {
  if (n < 3) throw GraphError("cycle graph needs at least 3 vertices");
  std::vector<Triplet> e;
  for (Index i = 0; i < n; ++i) {
    const Index j = (i + 1) % n;
    e.push_back({i, j, 1.0});
    e.push_back({j, i, 1.0});
  }
  return Graph(SparseMatrix::from_triplets(n, n, std::move(e)));
}

Graph complete_graph(Index n) {
  std::vector<Triplet> e;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j) e.push_back({i, j, 1.0});
    }
  }
  return Graph(SparseMatrix::from_triplets(n, n, std::move(e)));
}

Graph oplus(const Graph& g1, const Graph& g2) {
  require_same_kind(g1, g2, "oplus");
  const Index sizes[] = {g1.order(), g2.order()};
  BlockMap blocks;
  blocks.emplace(std::pair<Index, Index>{0, 0}, g1.adj());
  blocks.emplace(std::pair<Index, Index>{1, 1}, g2.adj());
  return Graph(block_assemble(blocks, sizes, sizes), g1.undirected());
}

Graph box(const Graph& g1, const Graph& g2) {
  require_same_kind(g1, g2, "box");
  return Graph(kron_sum(g1.adj(), g2.adj()), g1.undirected());
}

Graph cross(const Graph& g1, const Graph& g2) {
  require_same_kind(g1, g2, "cross");
  return Graph(kron(g1.adj(), g2.adj()), g1.undirected());
}

Graph strong(const Graph& g1, const Graph& g2) {
  require_same_kind(g1, g2, "strong");
  return Graph(entrywise_max(kron_sum(g1.adj(), g2.adj()), kron(g1.adj(), g2.adj())),
               g1.undirected());
}

SparseMatrix laplacian(const Graph& g) {
  if (!g.undirected()) throw GraphError("laplacian: directed input is not supported");
  const auto d = row_sums(g.adj());
  return add(g.adj(), scale(SparseMatrix::diagonal(d), -1.0));
}

Permutation distributive_permutation(Index n1, Index n2, Index n3) {
  const Index m = n2 + n3;
  std::vector<Index> fwd(static_cast<std::size_t>(n1 * m));
  for (Index i = 0; i < n1; ++i) {
    for (Index a = 0; a < m; ++a) {
      fwd[static_cast<std::size_t>(i * m + a)] =
          a < n2 ? i * n2 + a : n1 * n2 + i * n3 + (a - n2);
    }
  }
  return Permutation(std::move(fwd));
}

std::vector<EigPair> dense_eig_sym(const SparseMatrix& m, Index max_order) {
  if (!m.is_square()) throw DimensionError("dense_eig_sym: matrix is not square");
  if (m.rows() > max_order) {
    throw DimensionError("dense_eig_sym: order " + std::to_string(m.rows()) +
                         " exceeds limit " + std::to_string(max_order));
  }
  if (!is_symmetric(m)) throw std::invalid_argument("dense_eig_sym: matrix is not symmetric");

  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<double> a = m.to_dense();
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  auto at = [n](std::vector<double>& x, std::size_t i, std::size_t j) -> double& {
    return x[i * n + j];
  };

  double frob = 0.0;
  for (double x : a) frob += x * x;
  frob = std::sqrt(frob);
  const double tol = 1e-12 * frob;
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) s += a[i * n + j] * a[i * n + j];
      }
    }
    return std::sqrt(s);
  };

  constexpr int max_sweeps = 100;
  int sweep = 0;
  while (off_norm() > tol) {
    if (++sweep > max_sweeps) throw std::runtime_error("dense_eig_sym: no convergence");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(a, p, q);
        if (apq == 0.0) continue;
        const double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(a, k, p);
          const double akq = at(a, k, q);
          at(a, k, p) = c * akp - s * akq;
          at(a, k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(a, p, k);
          const double aqk = at(a, q, k);
          at(a, p, k) = c * apk - s * aqk;
          at(a, q, k) = s * apk + c * aqk;
        }
        at(a, p, q) = 0.0;
        at(a, q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = at(v, k, p);
          const double vkq = at(v, k, q);
          at(v, k, p) = c * vkp - s * vkq;
          at(v, k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<EigPair> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    out[j].value = a[j * n + j];
    out[j].vector.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[j].vector[i] = v[i * n + j];
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EigPair& x, const EigPair& y) { return x.value < y.value; });
  return out;
}

std::vector<double> eigenvalues(const SparseMatrix& m, Index max_order) {
  std::vector<double> out;
  for (auto& p : dense_eig_sym(m, max_order)) out.push_back(p.value);
  return out;
}

double eig_residual(const SparseMatrix& m, const EigPair& p) {
  const auto mv = spmv(m, p.vector);
  double worst = 0.0;
  for (std::size_t i = 0; i < mv.size(); ++i) {
    worst = std::max(worst, std::abs(mv[i] - p.value * p.vector[i]));
  }
  return worst;
}

void write_dot(std::ostream& out, const Graph& g, std::string_view name) {
  const bool und = g.undirected();
  out << (und ? "graph \"" : "digraph \"");
  for (char ch : name) {
    if (ch == '"' || ch == '\\') out << '\\';
    out << ch;
  }
  out << "\" {\n";
  for (Index v = 0; v < g.order(); ++v) out << "  " << v << ";\n";
  for (const auto& t : g.adj().entries()) {
    if (und && t.col < t.row) continue;
    out << "  " << t.row << (und ? " -- " : " -> ") << t.col << ";\n";
  }
  out << "}\n";
}

void write_edge_list(std::ostream& out, const Graph& g) {
  for (const auto& t : g.adj().entries()) {
    if (g.undirected() && t.col < t.row) continue;
    out << t.row << ' ' << t.col << '\n';
  }
}

}  // namespace skel
