#include "skel/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace skel {

namespace {

bool key_less(const Triplet& a, const Triplet& b) {
  return a.row != b.row ? a.row < b.row : a.col < b.col;
}

std::string dims(Index r, Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

// Row start offsets into a canonical entry list.
std::vector<std::size_t> row_starts(const SparseMatrix& a) {
  std::vector<std::size_t> starts(static_cast<std::size_t>(a.rows()) + 1, 0);
  for (const auto& t : a.entries()) ++starts[static_cast<std::size_t>(t.row) + 1];
  std::partial_sum(starts.begin(), starts.end(), starts.begin());
  return starts;
}

}  // namespace

SparseMatrix::SparseMatrix(Index rows, Index cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw DimensionError("negative matrix dimension");
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols,
                                         std::vector<Triplet> entries) {
  SparseMatrix m(rows, cols);
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw DimensionError("entry (" + std::to_string(t.row) + "," +
                           std::to_string(t.col) + ") outside " +
                           dims(rows, cols));
    }
  }
  const bool canonical =
      std::adjacent_find(entries.begin(), entries.end(),
                         [](const Triplet& a, const Triplet& b) {
                           return !key_less(a, b);
                         }) == entries.end();
  if (!canonical) {
    std::stable_sort(entries.begin(), entries.end(), key_less);
    std::vector<Triplet> merged;
    merged.reserve(entries.size());
    for (const auto& t : entries) {
      if (!merged.empty() && merged.back().row == t.row &&
          merged.back().col == t.col) {
        merged.back().value += t.value;
      } else {
        merged.push_back(t);
      }
    }
    entries = std::move(merged);
  }
  std::erase_if(entries, [](const Triplet& t) { return t.value == 0.0; });
  m.entries_ = std::move(entries);
  return m;
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<Triplet> e;
  e.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) e.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(e));
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> values) {
  const auto n = static_cast<Index>(values.size());
  std::vector<Triplet> e;
  for (Index i = 0; i < n; ++i) e.push_back({i, i, values[static_cast<std::size_t>(i)]});
  return from_triplets(n, n, std::move(e));
}

SparseMatrix SparseMatrix::from_dense(Index rows, Index cols,
                                      std::span<const double> row_major) {
  if (static_cast<Index>(row_major.size()) != rows * cols) {
    throw DimensionError("dense buffer does not match " + dims(rows, cols));
  }
  std::vector<Triplet> e;
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      e.push_back({r, c, row_major[static_cast<std::size_t>(r * cols + c)]});
    }
  }
  return from_triplets(rows, cols, std::move(e));
}

double SparseMatrix::at(Index r, Index c) const {
  const Triplet key{r, c, 0.0};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key, key_less);
  if (it != entries_.end() && it->row == r && it->col == c) return it->value;
  return 0.0;
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> d(static_cast<std::size_t>(rows_ * cols_), 0.0);
  for (const auto& t : entries_) d[static_cast<std::size_t>(t.row * cols_ + t.col)] = t.value;
  return d;
}

Permutation::Permutation(std::vector<Index> forward) : forward_(std::move(forward)) {
  std::vector<bool> seen(forward_.size(), false);
  for (Index v : forward_) {
    if (v < 0 || v >= size() || seen[static_cast<std::size_t>(v)]) {
      throw std::invalid_argument("permutation is not a bijection");
    }
    seen[static_cast<std::size_t>(v)] = true;
  }
}

Permutation Permutation::identity(Index n) {
  std::vector<Index> f(static_cast<std::size_t>(n));
  std::iota(f.begin(), f.end(), Index{0});
  return Permutation(std::move(f));
}

Permutation Permutation::inverse() const {
  std::vector<Index> inv(forward_.size());
  for (std::size_t i = 0; i < forward_.size(); ++i) {
    inv[static_cast<std::size_t>(forward_[i])] = static_cast<Index>(i);
  }
  return Permutation(std::move(inv));
}

Permutation Permutation::compose(const Permutation& other) const {
  if (other.size() != size()) throw DimensionError("permutation order mismatch");
  std::vector<Index> f(forward_.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = (*this)(other.forward_[i]);
  return Permutation(std::move(f));
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
  const auto sa = row_starts(a);
  const auto sb = row_starts(b);
  const auto ea = a.entries();
  const auto eb = b.entries();
  std::vector<Triplet> out;
  out.reserve(static_cast<std::size_t>(a.nnz() * b.nnz()));
  // Row-group iteration emits entries already in canonical order.
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index r = 0; r < b.rows(); ++r) {
      for (auto p = sa[static_cast<std::size_t>(i)]; p < sa[static_cast<std::size_t>(i) + 1]; ++p) {
        for (auto q = sb[static_cast<std::size_t>(r)]; q < sb[static_cast<std::size_t>(r) + 1]; ++q) {
          out.push_back({i * b.rows() + r, ea[p].col * b.cols() + eb[q].col,
                         ea[p].value * eb[q].value});
        }
      }
    }
  }
  return SparseMatrix::from_triplets(a.rows() * b.rows(), a.cols() * b.cols(),
                                     std::move(out));
}

SparseMatrix kron_sum(const SparseMatrix& a, const SparseMatrix& b) {
  if (!a.is_square() || !b.is_square()) {
    throw DimensionError("kron_sum requires square operands, got " +
                         dims(a.rows(), a.cols()) + " and " +
                         dims(b.rows(), b.cols()));
  }
  return add(kron(a, SparseMatrix::identity(b.rows())),
             kron(SparseMatrix::identity(a.rows()), b));
}

SparseMatrix permute(const SparseMatrix& a, const Permutation& p) {
  if (!a.is_square() || p.size() != a.rows()) {
    throw DimensionError("permutation of order " + std::to_string(p.size()) +
                         " applied to " + dims(a.rows(), a.cols()));
  }
  return permute(a, p, p);
}

SparseMatrix permute(const SparseMatrix& a, const Permutation& rows,
                     const Permutation& cols) {
  if (rows.size() != a.rows() || cols.size() != a.cols()) {
    throw DimensionError("permutation orders do not match " +
                         dims(a.rows(), a.cols()));
  }
  std::vector<Triplet> out;
  out.reserve(static_cast<std::size_t>(a.nnz()));
  for (const auto& t : a.entries()) out.push_back({rows(t.row), cols(t.col), t.value});
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(out));
}

SparseMatrix block_assemble(const BlockMap& blocks,
                            std::span<const Index> row_sizes,
                            std::span<const Index> col_sizes) {
  std::vector<Index> row_off(row_sizes.size() + 1, 0);
  std::vector<Index> col_off(col_sizes.size() + 1, 0);
  std::partial_sum(row_sizes.begin(), row_sizes.end(), row_off.begin() + 1);
  std::partial_sum(col_sizes.begin(), col_sizes.end(), col_off.begin() + 1);
  std::vector<Triplet> out;
  for (const auto& [key, block] : blocks) {
    const auto [bi, bj] = key;
    if (bi < 0 || bj < 0 || bi >= static_cast<Index>(row_sizes.size()) ||
        bj >= static_cast<Index>(col_sizes.size())) {
      throw DimensionError("block (" + std::to_string(bi) + "," +
                           std::to_string(bj) + ") outside block grid");
    }
    const auto ui = static_cast<std::size_t>(bi);
    const auto uj = static_cast<std::size_t>(bj);
    if (block.rows() != row_sizes[ui] || block.cols() != col_sizes[uj]) {
      throw DimensionError("block (" + std::to_string(bi) + "," +
                           std::to_string(bj) + ") is " +
                           dims(block.rows(), block.cols()) + ", expected " +
                           dims(row_sizes[ui], col_sizes[uj]));
    }
    for (const auto& t : block.entries()) {
      out.push_back({t.row + row_off[ui], t.col + col_off[uj], t.value});
    }
  }
  return SparseMatrix::from_triplets(row_off.back(), col_off.back(), std::move(out));
}

SparseMatrix submatrix(const SparseMatrix& a, Index r0, Index nr, Index c0,
                       Index nc) {
  if (r0 < 0 || c0 < 0 || nr < 0 || nc < 0 || r0 + nr > a.rows() ||
      c0 + nc > a.cols()) {
    throw DimensionError("submatrix window outside " + dims(a.rows(), a.cols()));
  }
  std::vector<Triplet> out;
  for (const auto& t : a.entries()) {
    if (t.row >= r0 && t.row < r0 + nr && t.col >= c0 && t.col < c0 + nc) {
      out.push_back({t.row - r0, t.col - c0, t.value});
    }
  }
  return SparseMatrix::from_triplets(nr, nc, std::move(out));
}

SparseMatrix transpose(const SparseMatrix& a) {
  std::vector<Triplet> out;
  out.reserve(static_cast<std::size_t>(a.nnz()));
  for (const auto& t : a.entries()) out.push_back({t.col, t.row, t.value});
  return SparseMatrix::from_triplets(a.cols(), a.rows(), std::move(out));
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("add: " + dims(a.rows(), a.cols()) + " vs " +
                         dims(b.rows(), b.cols()));
  }
  std::vector<Triplet> out(a.entries().begin(), a.entries().end());
  out.insert(out.end(), b.entries().begin(), b.entries().end());
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(out));
}

SparseMatrix scale(const SparseMatrix& a, double s) {
  std::vector<Triplet> out(a.entries().begin(), a.entries().end());
  for (auto& t : out) t.value *= s;
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(out));
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("multiply: " + dims(a.rows(), a.cols()) + " * " +
                         dims(b.rows(), b.cols()));
  }
  const auto sb = row_starts(b);
  const auto eb = b.entries();
  std::vector<Triplet> out;
  std::map<Index, double> acc;
  Index current = -1;
  auto flush = [&] {
    for (const auto& [c, v] : acc) out.push_back({current, c, v});
    acc.clear();
  };
  for (const auto& t : a.entries()) {
    if (t.row != current) {
      flush();
      current = t.row;
    }
    for (auto q = sb[static_cast<std::size_t>(t.col)]; q < sb[static_cast<std::size_t>(t.col) + 1]; ++q) {
      acc[eb[q].col] += t.value * eb[q].value;
    }
  }
  flush();
  return SparseMatrix::from_triplets(a.rows(), b.cols(), std::move(out));
}

SparseMatrix entrywise_max(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("entrywise_max: " + dims(a.rows(), a.cols()) + " vs " +
                         dims(b.rows(), b.cols()));
  }
  std::vector<Triplet> out;
  out.reserve(static_cast<std::size_t>(a.nnz() + b.nnz()));
  const auto ea = a.entries();
  const auto eb = b.entries();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ea.size() || j < eb.size()) {
    if (j == eb.size() || (i < ea.size() && key_less(ea[i], eb[j]))) {
      out.push_back({ea[i].row, ea[i].col, std::max(ea[i].value, 0.0)});
      ++i;
    } else if (i == ea.size() || key_less(eb[j], ea[i])) {
      out.push_back({eb[j].row, eb[j].col, std::max(eb[j].value, 0.0)});
      ++j;
    } else {
      out.push_back({ea[i].row, ea[i].col, std::max(ea[i].value, eb[j].value)});
      ++i;
      ++j;
    }
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(out));
}

SparseMatrix pattern(const SparseMatrix& a) {
  std::vector<Triplet> out(a.entries().begin(), a.entries().end());
  for (auto& t : out) t.value = 1.0;
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(out));
}

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x) {
  if (static_cast<Index>(x.size()) != a.cols()) {
    throw DimensionError("spmv: vector of length " + std::to_string(x.size()) +
                         " against " + dims(a.rows(), a.cols()));
  }
  std::vector<double> y(static_cast<std::size_t>(a.rows()), 0.0);
  for (const auto& t : a.entries()) {
    y[static_cast<std::size_t>(t.row)] += t.value * x[static_cast<std::size_t>(t.col)];
  }
  return y;
}

std::vector<double> row_sums(const SparseMatrix& a) {
  std::vector<double> s(static_cast<std::size_t>(a.rows()), 0.0);
  for (const auto& t : a.entries()) s[static_cast<std::size_t>(t.row)] += t.value;
  return s;
}

bool is_symmetric(const SparseMatrix& a) {
  return a.is_square() && transpose(a) == a;
}

bool pattern_subset(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  const auto eb = b.entries();
  std::size_t j = 0;
  for (const auto& t : a.entries()) {
    while (j < eb.size() && key_less(eb[j], t)) ++j;
    if (j == eb.size() || eb[j].row != t.row || eb[j].col != t.col) return false;
  }
  return true;
}

double max_abs_diff(const SparseMatrix& a, const SparseMatrix& b) {
  const auto d = add(a, scale(b, -1.0));
  double m = 0.0;
  for (const auto& t : d.entries()) m = std::max(m, std::abs(t.value));
  return m;
}

}  // namespace skel
