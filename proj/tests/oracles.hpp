#pragma once

// Reference constructions for the tests. Everything here is written from the
// element-wise definitions with plain loops over dense storage, so it shares
// no code path with the library's sparse algebra.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "skel/graph.hpp"
#include "skel/lineage.hpp"
#include "skel/sparse.hpp"

namespace oracle {

using skel::Index;

struct Dense {
  Index rows = 0;
  Index cols = 0;
  std::vector<double> v;

  Dense() = default;
  Dense(Index r, Index c) : rows(r), cols(c), v(static_cast<std::size_t>(r * c), 0.0) {}
  explicit Dense(const skel::SparseMatrix& m) : Dense(m.rows(), m.cols()) {
    for (const auto& t : m.entries()) (*this)(t.row, t.col) = t.value;
  }

  double& operator()(Index i, Index j) { return v[static_cast<std::size_t>(i * cols + j)]; }
  double operator()(Index i, Index j) const { return v[static_cast<std::size_t>(i * cols + j)]; }

  skel::SparseMatrix sparse() const {
    std::vector<skel::Triplet> t;
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) {
        if ((*this)(i, j) != 0.0) t.push_back({i, j, (*this)(i, j)});
      }
    }
    return skel::SparseMatrix::from_triplets(rows, cols, std::move(t));
  }
};

inline Dense identity(Index n) {
  Dense d(n, n);
  for (Index i = 0; i < n; ++i) d(i, i) = 1.0;
  return d;
}

inline Dense kron(const Dense& a, const Dense& b) {
  Dense out(a.rows * b.rows, a.cols * b.cols);
  for (Index i = 0; i < a.rows; ++i)
    for (Index j = 0; j < a.cols; ++j)
      for (Index k = 0; k < b.rows; ++k)
        for (Index l = 0; l < b.cols; ++l) out(i * b.rows + k, j * b.cols + l) = a(i, j) * b(k, l);
  return out;
}

inline Dense multiply(const Dense& a, const Dense& b) {
  Dense out(a.rows, b.cols);
  for (Index i = 0; i < a.rows; ++i)
    for (Index k = 0; k < a.cols; ++k) {
      const double x = a(i, k);
      if (x == 0.0) continue;
      for (Index j = 0; j < b.cols; ++j) out(i, j) += x * b(k, j);
    }
  return out;
}

inline Dense transpose(const Dense& a) {
  Dense out(a.cols, a.rows);
  for (Index i = 0; i < a.rows; ++i)
    for (Index j = 0; j < a.cols; ++j) out(j, i) = a(i, j);
  return out;
}

inline double max_abs_diff(const Dense& a, const Dense& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
  return m;
}

/// Random symmetric 0/1 adjacency; loops allowed with probability p_loop.
inline skel::Graph random_graph(std::mt19937_64& rng, Index n, double p_edge,
                                double p_loop = 0.0) {
  std::bernoulli_distribution edge(p_edge), loop(p_loop);
  Dense a(n, n);
  for (Index i = 0; i < n; ++i) {
    if (loop(rng)) a(i, i) = 1.0;
    for (Index j = i + 1; j < n; ++j) {
      if (edge(rng)) a(i, j) = a(j, i) = 1.0;
    }
  }
  return skel::Graph(a.sparse());
}

enum class Op { box, cross, strong };

/// Entry of the binary graph product from the factor entries.
inline double product_entry(Op op, double a, bool same_a, double b, bool same_b) {
  const double bx = (same_b ? a : 0.0) + (same_a ? b : 0.0);
  const double cr = a * b;
  switch (op) {
    case Op::box:
      return bx;
    case Op::cross:
      return cr;
    case Op::strong:
      return std::max(bx, cr);
  }
  return 0.0;
}

/// Vertex (u, v) of the product sits at u·|V2| + v.
inline skel::SparseMatrix graph_product(Op op, const skel::Graph& g1, const skel::Graph& g2) {
  const Dense a(g1.adj()), b(g2.adj());
  const Index n1 = a.rows, n2 = b.rows;
  Dense out(n1 * n2, n1 * n2);
  for (Index u = 0; u < n1; ++u)
    for (Index v = 0; v < n2; ++v)
      for (Index x = 0; x < n1; ++x)
        for (Index y = 0; y < n2; ++y)
          out(u * n2 + v, x * n2 + y) = product_entry(op, a(u, x), u == x, b(v, y), v == y);
  return out.sparse();
}

/// Entry of the flat (all-levels) adjacency of a graded graph between
/// (l, j) and (m, k): G^{(l)} on the diagonal, S between adjacent levels.
/// With weighted = true the prolongation replaces S.
inline double flat_entry(const skel::GradedGraph& gg, Index l, Index j, Index m, Index k,
                         bool weighted = false) {
  const auto& maps = weighted ? gg.prolong : gg.inter;
  if (l == m) return gg.levels[static_cast<std::size_t>(l)].adj().at(j, k);
  if (m == l + 1) return maps[static_cast<std::size_t>(l)].at(k, j);
  if (l == m + 1) return maps[static_cast<std::size_t>(m)].at(j, k);
  return 0.0;
}

struct Vertex {
  std::vector<Index> levels;
  std::vector<Index> idx;
};

/// Vertices of one product level: blocks in lexicographic order of the factor
/// levels, indices row-major inside a block.
inline std::vector<Vertex> product_level_vertices(const std::vector<skel::GradedGraph>& f,
                                                  const std::function<Index(std::size_t, Index)>& grade,
                                                  Index level) {
  const std::size_t n = f.size();
  std::vector<std::vector<Index>> blocks;
  std::vector<Index> pick(n);
  std::function<void(std::size_t, Index)> rec = [&](std::size_t i, Index sum) {
    if (i == n) {
      if (sum == level) blocks.push_back(pick);
      return;
    }
    for (Index l = 0; l <= f[i].top_level(); ++l) {
      const Index g = grade(i, l);
      if (sum + g > level) break;
      pick[i] = l;
      rec(i + 1, sum + g);
    }
  };
  rec(0, 0);
  std::sort(blocks.begin(), blocks.end());

  std::vector<Vertex> out;
  for (const auto& b : blocks) {
    Index total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= f[i].level_size(b[i]);
    for (Index t = 0; t < total; ++t) {
      std::vector<Index> idx(n);
      Index rest = t;
      for (std::size_t i = n; i-- > 0;) {
        idx[i] = rest % f[i].level_size(b[i]);
        rest /= f[i].level_size(b[i]);
      }
      out.push_back({b, idx});
    }
  }
  return out;
}

enum class Mode { hat, tilde };

/// Edge weight between two product vertices from the per-factor flat entries.
inline double product_vertex_entry(const std::vector<skel::GradedGraph>& f, Op op, Mode mode,
                                   const Vertex& x, const Vertex& y, bool weighted) {
  const std::size_t n = f.size();
  std::vector<double> e(n);
  std::vector<bool> same(n);
  std::vector<Index> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = y.levels[i] - x.levels[i];
    if (std::abs(d[i]) > 1) return 0.0;
    e[i] = flat_entry(f[i], x.levels[i], x.idx[i], y.levels[i], y.idx[i],
                      weighted && d[i] != 0);
    same[i] = d[i] == 0 && x.idx[i] == y.idx[i];
  }
  double bx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    bool others = true;
    for (std::size_t k = 0; k < n; ++k) others = others && (k == i || same[k]);
    if (others) bx += e[i];
  }
  double cr = 1.0;
  for (double v : e) cr *= v;
  if (mode == Mode::tilde) {
    Index last = 0;
    for (Index s : d) {
      if (s == 0) continue;
      if (s == last) cr = 0.0;
      last = s;
    }
  }
  switch (op) {
    case Op::box:
      return bx;
    case Op::cross:
      return cr;
    case Op::strong:
      return std::max(bx, cr);
  }
  return 0.0;
}

/// Skeletal product of any number of factors built vertex pair by vertex
/// pair. Levels 0..top; factor i contributes grade(i, l_i) to the level.
inline skel::GradedGraph skeletal_product(const std::vector<skel::GradedGraph>& f, Op op, Mode mode,
                                          Index top,
                                          std::function<Index(std::size_t, Index)> grade = nullptr,
                                          bool weighted = false) {
  if (!grade) grade = [](std::size_t, Index l) { return l; };
  std::vector<std::vector<Vertex>> lv;
  for (Index L = 0; L <= top; ++L) lv.push_back(product_level_vertices(f, grade, L));
  skel::GradedGraph out;
  for (Index L = 0; L <= top; ++L) {
    const auto& vs = lv[static_cast<std::size_t>(L)];
    const auto sz = static_cast<Index>(vs.size());
    Dense g(sz, sz);
    for (Index r = 0; r < sz; ++r)
      for (Index c = 0; c < sz; ++c)
        g(r, c) = product_vertex_entry(f, op, mode, vs[static_cast<std::size_t>(r)],
                                       vs[static_cast<std::size_t>(c)], false);
    out.levels.emplace_back(g.sparse());
    if (L == top) break;
    const auto& up = lv[static_cast<std::size_t>(L + 1)];
    const auto usz = static_cast<Index>(up.size());
    Dense s(usz, sz);
    for (Index r = 0; r < usz; ++r)
      for (Index c = 0; c < sz; ++c)
        s(r, c) = product_vertex_entry(f, op, mode, up[static_cast<std::size_t>(r)],
                                       vs[static_cast<std::size_t>(c)], weighted);
    out.inter.push_back(s.sparse());
  }
  return out;
}

/// Thickening from its component formula: vertices (l, i ≤ l, j), intra-level
/// entries from the flat adjacency restricted to i, i' ≤ l, and S linking
/// (l+1, i, j) to (l, i, j') with weight G^{(i)}[j, j'].
inline skel::GradedGraph thicken(const skel::GradedGraph& gg) {
  skel::GradedGraph out;
  auto count = [&](Index l) {
    Index s = 0;
    for (Index i = 0; i <= l; ++i) s += gg.level_size(i);
    return s;
  };
  auto id = [&](Index i, Index j) { return (i == 0 ? 0 : count(i - 1)) + j; };
  for (Index l = 0; l <= gg.top_level(); ++l) {
    const Index n = count(l);
    Dense g(n, n);
    for (Index i = 0; i <= l; ++i)
      for (Index j = 0; j < gg.level_size(i); ++j)
        for (Index i2 = 0; i2 <= l; ++i2)
          for (Index j2 = 0; j2 < gg.level_size(i2); ++j2)
            g(id(i, j), id(i2, j2)) = flat_entry(gg, i, j, i2, j2);
    out.levels.emplace_back(g.sparse());
    if (l == gg.top_level()) break;
    Dense s(count(l + 1), n);
    for (Index i = 0; i <= l; ++i)
      for (Index j = 0; j < gg.level_size(i); ++j)
        for (Index j2 = 0; j2 < gg.level_size(i); ++j2)
          s(id(i, j), id(i, j2)) = gg.levels[static_cast<std::size_t>(i)].adj().at(j, j2);
    out.inter.push_back(s.sparse());
  }
  return out;
}

/// Σ_{grades summing to L} Π |V_i^{(l_i)}| over levels available in the factors.
inline Index convolution_size(const std::vector<std::vector<Index>>& sizes, Index L) {
  std::function<Index(std::size_t, Index)> rec = [&](std::size_t i, Index rest) -> Index {
    if (i + 1 == sizes.size()) {
      return rest < static_cast<Index>(sizes[i].size()) ? sizes[i][static_cast<std::size_t>(rest)]
                                                        : 0;
    }
    Index total = 0;
    for (Index m = 0; m <= rest && m < static_cast<Index>(sizes[i].size()); ++m) {
      total += sizes[i][static_cast<std::size_t>(m)] * rec(i + 1, rest - m);
    }
    return total;
  };
  return rec(0, L);
}

/// Brute-force isomorphism search for small graphs: a permutation p with
/// permute(a, p) == b, if any.
inline bool isomorphic(const skel::SparseMatrix& a, const skel::SparseMatrix& b) {
  if (a.rows() != b.rows() || a.nnz() != b.nnz()) return false;
  std::vector<Index> p(static_cast<std::size_t>(a.rows()));
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<Index>(i);
  do {
    bool ok = true;
    for (const auto& t : a.entries()) {
      if (b.at(p[static_cast<std::size_t>(t.row)], p[static_cast<std::size_t>(t.col)]) != t.value) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

}  // namespace oracle
