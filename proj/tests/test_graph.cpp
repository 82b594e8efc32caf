#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "skel/graph.hpp"

using namespace skel;
using oracle::Dense;

namespace {

void check_spectrum(const SparseMatrix& m, std::vector<double> expect, double tol = 1e-10) {
  std::sort(expect.begin(), expect.end());
  const auto got = eigenvalues(m);
  REQUIRE(got.size() == expect.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - expect[i]) <= tol);
}

SparseMatrix dense_oplus(const Graph& a, const Graph& b) {
  const Dense x(a.adj()), y(b.adj());
  Dense out(x.rows + y.rows, x.rows + y.rows);
  for (Index i = 0; i < x.rows; ++i)
    for (Index j = 0; j < x.rows; ++j) out(i, j) = x(i, j);
  for (Index i = 0; i < y.rows; ++i)
    for (Index j = 0; j < y.rows; ++j) out(x.rows + i, x.rows + j) = y(i, j);
  return out.sparse();
}

}  // namespace

TEST_SUITE_BEGIN("graph");

TEST_CASE("construction checks") {
  CHECK_THROWS_AS(Graph(SparseMatrix(2, 3)), GraphError);
  CHECK_THROWS_AS(Graph(SparseMatrix::from_triplets(2, 2, {{0, 1, -1}, {1, 0, -1}})), GraphError);
  CHECK_THROWS_AS(Graph(SparseMatrix::from_triplets(2, 2, {{0, 1, 1}})), GraphError);
  CHECK_NOTHROW(Graph(SparseMatrix::from_triplets(2, 2, {{0, 1, 1}}), false));
  CHECK_THROWS_AS(cycle_graph(2), GraphError);
}

TEST_CASE("named graphs") {
  CHECK(path_graph(4).edge_count() == 3);
  CHECK(cycle_graph(5).edge_count() == 5);
  CHECK(complete_graph(5).edge_count() == 10);
  CHECK(empty_graph(3).edge_count() == 0);
  CHECK(loop_vertex().order() == 1);
  CHECK(loop_vertex().edge_count() == 1);
  CHECK(loop_vertex().adj().at(0, 0) == 1.0);
  for (Index i = 0; i < 5; ++i) CHECK(complete_graph(5).adj().at(i, i) == 0.0);
}

TEST_CASE("products match their element-wise definitions") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 15; ++trial) {
    const auto a = oracle::random_graph(rng, 1 + trial % 5, 0.5, 0.3);
    const auto b = oracle::random_graph(rng, 1 + (trial * 3) % 6, 0.5, 0.3);
    CHECK(box(a, b).adj() == oracle::graph_product(oracle::Op::box, a, b));
    CHECK(cross(a, b).adj() == oracle::graph_product(oracle::Op::cross, a, b));
    CHECK(strong(a, b).adj() == oracle::graph_product(oracle::Op::strong, a, b));
    CHECK(oplus(a, b).adj() == dense_oplus(a, b));
  }
}

TEST_CASE("laplacian") {
  const auto k2 = laplacian(complete_graph(2));
  CHECK(k2 == SparseMatrix::from_dense(2, 2, std::vector<double>{-1, 1, 1, -1}));
  CHECK(laplacian(loop_vertex()).nnz() == 0);
  for (double s : row_sums(laplacian(path_graph(3)))) CHECK(s == 0.0);
  CHECK_THROWS_AS(laplacian(Graph(SparseMatrix::from_triplets(2, 2, {{0, 1, 1}}), false)),
                  GraphError);
}

TEST_CASE("known spectra") {
  using std::numbers::pi;
  for (Index n : {1, 2, 5, 9}) {
    std::vector<double> e;
    for (Index k = 1; k <= n; ++k) e.push_back(2 * std::cos(pi * k / (n + 1)));
    check_spectrum(path_graph(n).adj(), e);
  }
  for (Index n : {3, 4, 7}) {
    std::vector<double> e;
    for (Index k = 0; k < n; ++k) e.push_back(2 * std::cos(2 * pi * k / n));
    check_spectrum(cycle_graph(n).adj(), e);
  }
  std::vector<double> kn(5, -1.0);
  kn[0] = 4.0;
  check_spectrum(complete_graph(5).adj(), kn);
  // Path Laplacian L = A - D has eigenvalues -(2 - 2 cos(πk/n)), k = 0..n-1.
  std::vector<double> lp;
  for (Index k = 0; k < 6; ++k) lp.push_back(-(2 - 2 * std::cos(pi * k / 6)));
  check_spectrum(laplacian(path_graph(6)), lp);
}

TEST_CASE("eigenpairs certify") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = oracle::random_graph(rng, 2 + trial, 0.4, 0.2);
    const auto pairs = dense_eig_sym(g.adj());
    for (const auto& p : pairs) {
      CHECK(eig_residual(g.adj(), p) <= 1e-10);
      double norm = 0.0;
      for (double x : p.vector) norm += x * x;
      CHECK(std::abs(norm - 1.0) <= 1e-12);
    }
    for (std::size_t i = 1; i < pairs.size(); ++i) CHECK(pairs[i - 1].value <= pairs[i].value);
  }
  CHECK_THROWS(dense_eig_sym(SparseMatrix::from_triplets(2, 2, {{0, 1, 1}})));
  CHECK_THROWS_AS(dense_eig_sym(SparseMatrix::identity(10), 8), DimensionError);
}

TEST_CASE("distributive permutation") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g1 = oracle::random_graph(rng, 1 + trial % 4, 0.5, 0.2);
    const auto g2 = oracle::random_graph(rng, 1 + trial % 3, 0.5, 0.2);
    const auto g3 = oracle::random_graph(rng, 2 + trial % 2, 0.5, 0.2);
    const auto p = distributive_permutation(g1.order(), g2.order(), g3.order());
    CHECK(permute(box(g1, oplus(g2, g3)).adj(), p) == oplus(box(g1, g2), box(g1, g3)).adj());
    CHECK(permute(cross(g1, oplus(g2, g3)).adj(), p) ==
          oplus(cross(g1, g2), cross(g1, g3)).adj());
  }
  // Explicit small case: n1 = 2, n2 = 1, n3 = 2.
  const auto p = distributive_permutation(2, 1, 2);
  CHECK(std::vector<Index>(p.forward().begin(), p.forward().end()) ==
        std::vector<Index>{0, 2, 3, 1, 4, 5});
}

TEST_CASE("text exports") {
  std::ostringstream dot, el;
  const auto g = Graph(SparseMatrix::from_triplets(3, 3, {{0, 0, 1}, {0, 2, 1}, {2, 0, 1}}));
  write_dot(dot, g, "x(y)");
  CHECK(dot.str() == "graph \"x(y)\" {\n  0;\n  1;\n  2;\n  0 -- 0;\n  0 -- 2;\n}\n");
  write_edge_list(el, g);
  CHECK(el.str() == "0 0\n0 2\n");
  CHECK(g.edge_count() == 2);
}

TEST_SUITE_END();
