#pragma once

// Thickening and skeletal products of graded graphs.
//
// A product vertex is a tuple of factor vertices (l_i, j_i). Its level is
// Σ l_i for the plain products, or Σ f_i(l_i) for shaped ones. Level L lists
// its blocks (l_1, ..., l_n) in lexicographic order; inside a block the
// factor indices are packed row-major, j_1·|V_2|·…·|V_n| + … + j_n, which is
// the order kron produces.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skel/lineage.hpp"

namespace skel {

enum class ProductKind { box, cross, strong };
enum class NwayMode { hat, tilde };

std::string_view kind_name(ProductKind k) noexcept;
ProductKind parse_kind(std::string_view s);

struct ProductOptions {
  /// Highest product level emitted. Defaults to the highest level whose
  /// blocks are all available from the factors (min of the factor tops for
  /// the summed grading).
  std::optional<Index> max_level;
  /// Use the factors' P weights in place of S in the inter-level maps.
  bool prolong_weights = false;
};

struct ProductBlock {
  std::vector<Index> factor_levels;
  Index size = 0;
  Index offset = 0;
};

/// Maps a factor level to its contribution to the product level.
using LevelMap = std::function<Index(Index)>;

class ProductVertexCodec {
 public:
  /// Grading Σ l_i. factor_sizes[i][l] = |V_i^{(l)}|.
  static ProductVertexCodec summed(std::vector<std::vector<Index>> factor_sizes,
                                   std::optional<Index> max_level = std::nullopt);
  /// Grading Σ f_i(l_i); each f_i must be nondecreasing and unbounded.
  static ProductVertexCodec shaped(std::vector<std::vector<Index>> factor_sizes,
                                   std::vector<LevelMap> maps,
                                   std::optional<Index> max_level = std::nullopt);

  Index num_levels() const noexcept { return static_cast<Index>(levels_.size()); }
  Index top_level() const noexcept { return num_levels() - 1; }
  std::size_t num_factors() const noexcept { return factor_sizes_.size(); }
  Index factor_size(std::size_t factor, Index level) const;
  const std::vector<ProductBlock>& blocks(Index level) const;
  Index level_size(Index level) const;
  std::vector<Index> level_sizes() const;
  /// True when some block of this level needs factor levels beyond the
  /// supplied tops.
  bool partial(Index level) const { return partial_.at(static_cast<std::size_t>(level)); }

  std::optional<std::size_t> find_block(Index level, std::span<const Index> factor_levels) const;
  Index encode(Index level, std::span<const Index> factor_levels,
               std::span<const Index> factor_indices) const;

  struct Decoded {
    std::vector<Index> factor_levels;
    std::vector<Index> factor_indices;
  };
  Decoded decode(Index level, Index j) const;

 private:
  std::vector<std::vector<Index>> factor_sizes_;
  std::vector<std::vector<ProductBlock>> levels_;
  std::vector<bool> partial_;
};

/// Level l of the result is the flat assembly of input levels 0..l; the
/// inter-level map links copy i at level l to copy i at level l+1 through
/// G^{(i)}. Vertex order: inner level ascending, then j.
GradedGraph thicken(const GradedGraph& gg);

/// Binary skeletal products written directly from their block formulas.
GradedGraph skel_product(const GradedGraph& a, const GradedGraph& b, ProductKind kind,
                         const ProductOptions& opt = {});
GradedGraph skel_cross(const GradedGraph& a, const GradedGraph& b, const ProductOptions& opt = {});
GradedGraph skel_box(const GradedGraph& a, const GradedGraph& b, const ProductOptions& opt = {});
GradedGraph skel_strong(const GradedGraph& a, const GradedGraph& b, const ProductOptions& opt = {});

/// n-way product over the full factor index space, keeping an edge when its
/// level change is within one; tilde mode additionally requires the nonzero
/// per-factor level steps to alternate in sign. Mode only affects the cross
/// part.
GradedGraph skel_nway(std::span<const GradedGraph> factors, ProductKind kind, NwayMode mode,
                      const ProductOptions& opt = {});
GradedGraph skel_nway_cross(std::span<const GradedGraph> factors, NwayMode mode,
                            const ProductOptions& opt = {});

struct Rational {
  Index num = 1;
  Index den = 1;

  /// ⌈(num/den)·l⌉ in exact integer arithmetic.
  Index ceil_times(Index l) const;
  std::string str() const;
};

/// Accepts "p", "p/q" or a plain decimal such as "0.5".
Rational parse_rational(std::string_view s);

/// Level of block (l1, l2) is ⌈ρ1 l1⌉ + ⌈ρ2 l2⌉.
GradedGraph skel_dilated(const GradedGraph& a, const GradedGraph& b, ProductKind kind,
                         Rational rho1, Rational rho2, const ProductOptions& opt = {});
/// Level of block (l1, l2) is f1(l1) + f2(l2).
GradedGraph skel_shaped(const GradedGraph& a, const GradedGraph& b, ProductKind kind,
                        LevelMap f1, LevelMap f2, const ProductOptions& opt = {});

/// Block-matrix construction: Kronecker product (cross), sum (box) or their
/// entrywise max (strong) of the flat assemblies of both factors truncated at
/// top, regrouped by product level, with blocks more than one level apart
/// discarded.
GradedGraph appendix_oracle(const GradedGraph& a, const GradedGraph& b, ProductKind kind,
                            Index top);

/// Level l = G1_l op G2_l, inter = S1_l ⊗ S2_l.
GradedGraph naive_levelwise(const GradedGraph& a, const GradedGraph& b, ProductKind kind);

/// Codec matching the vertex order skel_product uses for these factors.
ProductVertexCodec product_codec(const GradedGraph& a, const GradedGraph& b,
                                 const ProductOptions& opt = {});

/// Applies one permutation per level to levels, inter maps and prolongations.
GradedGraph relabel(const GradedGraph& gg, std::span<const Permutation> per_level);

/// Sends level-`level` ids of `from` to ids of `to`, where factor i of
/// `from` is factor order[i] of `to`.
Permutation factor_order_permutation(const ProductVertexCodec& from, const ProductVertexCodec& to,
                                     std::span<const std::size_t> order, Index level);

/// ((A B) C) ids → ids of the flat three-factor codec.
Permutation left_nested_permutation(const ProductVertexCodec& inner_ab,
                                    const ProductVertexCodec& outer,
                                    const ProductVertexCodec& flat, Index level);
/// (A (B C)) ids → ids of the flat three-factor codec.
Permutation right_nested_permutation(const ProductVertexCodec& inner_bc,
                                     const ProductVertexCodec& outer,
                                     const ProductVertexCodec& flat, Index level);
/// Ids of A·(B ⊕ C) → ids of (A·B) ⊕ (A·C) at one level.
Permutation distributive_product_permutation(const ProductVertexCodec& a_bc,
                                             const ProductVertexCodec& ab,
                                             const ProductVertexCodec& ac, Index level);

/// Per-level wrappers of the permutations above.
std::vector<Permutation> factor_order_permutations(const ProductVertexCodec& from,
                                                   const ProductVertexCodec& to,
                                                   std::span<const std::size_t> order);

}  // namespace skel
