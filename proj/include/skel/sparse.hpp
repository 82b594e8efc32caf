#pragma once

// Coordinate-triplet sparse matrices and the small set of structural
// operations (Kronecker product/sum, permutation, block assembly) that the
// graph, lineage and skeletal-product code is written against.

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace skel {

using Index = std::int64_t;

struct Triplet {
  Index row = 0;
  Index col = 0;
  double value = 0.0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Real sparse matrix stored as canonical triplets: unique (row, col) keys in
/// row-major order with no stored zeros. Equality is exact on dims and entries.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols);

  /// Builds a canonical matrix; duplicate keys are summed and exact zeros are
  /// dropped afterwards. Throws DimensionError on out-of-range indices.
  static SparseMatrix from_triplets(Index rows, Index cols,
                                    std::vector<Triplet> entries);
  static SparseMatrix identity(Index n);
  static SparseMatrix diagonal(std::span<const double> values);
  static SparseMatrix from_dense(Index rows, Index cols,
                                 std::span<const double> row_major);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index nnz() const noexcept { return static_cast<Index>(entries_.size()); }
  bool is_square() const noexcept { return rows_ == cols_; }
  std::span<const Triplet> entries() const noexcept { return entries_; }

  /// Value at (r, c), zero when not stored.
  double at(Index r, Index c) const;

  std::vector<double> to_dense() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Triplet> entries_;
};

/// Bijection on [0, n). Applying p to a matrix moves entry (i, j) to
/// (p(i), p(j)).
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<Index> forward);

  static Permutation identity(Index n);

  Index size() const noexcept { return static_cast<Index>(forward_.size()); }
  Index operator()(Index i) const { return forward_.at(static_cast<std::size_t>(i)); }
  std::span<const Index> forward() const noexcept { return forward_; }

  Permutation inverse() const;
  /// (this ∘ other)(i) = this(other(i)).
  Permutation compose(const Permutation& other) const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<Index> forward_;
};

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b);
/// a ⊗ I + I ⊗ b for square a, b.
SparseMatrix kron_sum(const SparseMatrix& a, const SparseMatrix& b);

SparseMatrix permute(const SparseMatrix& a, const Permutation& p);
/// Rectangular relabelling: entry (i, j) moves to (rows(i), cols(j)).
SparseMatrix permute(const SparseMatrix& a, const Permutation& rows,
                     const Permutation& cols);

using BlockMap = std::map<std::pair<Index, Index>, SparseMatrix>;

/// Places blocks at offsets given by prefix sums of the row/column sizes.
/// Absent blocks are zero.
SparseMatrix block_assemble(const BlockMap& blocks,
                            std::span<const Index> row_sizes,
                            std::span<const Index> col_sizes);

/// Copy of the rows [r0, r0+nr) x cols [c0, c0+nc) window.
SparseMatrix submatrix(const SparseMatrix& a, Index r0, Index nr, Index c0,
                       Index nc);

SparseMatrix transpose(const SparseMatrix& a);
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix scale(const SparseMatrix& a, double s);
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix entrywise_max(const SparseMatrix& a, const SparseMatrix& b);
/// Same sparsity with every stored value replaced by 1.
SparseMatrix pattern(const SparseMatrix& a);

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x);
std::vector<double> row_sums(const SparseMatrix& a);

bool is_symmetric(const SparseMatrix& a);
/// True when every stored key of a is also stored in b (same dims required).
bool pattern_subset(const SparseMatrix& a, const SparseMatrix& b);
double max_abs_diff(const SparseMatrix& a, const SparseMatrix& b);

}  // namespace skel
