#pragma once

// Graded graphs: per-level graphs G_l joined by inter-level maps S_l stored
// coarse-to-fine as |V_{l+1}| x |V_l| (column = coarse vertex), with optional
// prolongation weights P_l on the same pattern.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "skel/graph.hpp"

namespace skel {

struct GradedGraph {
  std::string name;
  std::vector<Graph> levels;
  std::vector<SparseMatrix> inter;
  /// Empty, or one matrix per entry of inter.
  std::vector<SparseMatrix> prolong;
  nlohmann::json metadata = nlohmann::json::object();

  Index num_levels() const noexcept { return static_cast<Index>(levels.size()); }
  /// Index of the finest level (num_levels() - 1).
  Index top_level() const noexcept { return num_levels() - 1; }
  Index level_size(Index l) const { return levels.at(static_cast<std::size_t>(l)).order(); }
  std::vector<Index> level_sizes() const;
};

/// Levels, inter maps and prolongations equal as triplets; name and metadata
/// are ignored.
bool same_structure(const GradedGraph& a, const GradedGraph& b);

/// Flat ids for (level, j) pairs: level blocks contiguous, level ascending.
class VertexCodec {
 public:
  VertexCodec() = default;
  explicit VertexCodec(std::vector<Index> level_sizes);

  Index num_levels() const noexcept { return static_cast<Index>(sizes_.size()); }
  Index size() const noexcept { return offsets_.empty() ? 0 : offsets_.back(); }
  Index level_size(Index l) const { return sizes_.at(static_cast<std::size_t>(l)); }
  Index offset(Index l) const { return offsets_.at(static_cast<std::size_t>(l)); }
  Index encode(Index level, Index j) const;
  std::pair<Index, Index> decode(Index flat) const;
  std::span<const Index> sizes() const noexcept { return sizes_; }

 private:
  std::vector<Index> sizes_;
  std::vector<Index> offsets_;  // size() + 1 entries
};

/// Diagonal blocks G_l, block (l+1, l) = S_l and block (l, l+1) = S_lᵀ.
Graph assemble_flat(const GradedGraph& gg);
/// Per-vertex level label in the assemble_flat order.
std::vector<Index> flat_levels(const GradedGraph& gg);

struct Diagnostic {
  enum class Kind { dimension, grading, pattern, orthonormality, symmetry };
  Kind kind = Kind::dimension;
  Index level = -1;
  double deviation = 0.0;
  std::string message;
};

std::string_view kind_name(Diagnostic::Kind k) noexcept;

struct LevelCensus {
  Index level = 0;
  Index vertices = 0;
  Index edges = 0;
  /// Stored entries of S_{level} (to the next level); 0 at the top.
  Index inter_nnz = 0;
};

struct ValidationReport {
  std::vector<Diagnostic> issues;
  std::vector<LevelCensus> census;

  bool ok() const noexcept { return issues.empty(); }
};

/// Orthonormality tolerance on max |PᵀP − I|.
inline constexpr double kOrthoTolerance = 1e-12;

ValidationReport validate(const GradedGraph& gg);

/// Reports every stored entry of a flat graph joining vertices whose level
/// labels differ by two or more.
std::vector<Diagnostic> validate_grading(const Graph& flat,
                                         std::span<const Index> level_of);

/// Lineage generators with doubling level sizes 2^l (grid2d: 4^l) and
/// pair-aggregation prolongations of weight 1/√2. Level 0 is one vertex with
/// a self-loop unless root_loop is false.
GradedGraph gen_path_lineage(Index top, bool root_loop = true);
GradedGraph gen_complete_lineage(Index top, bool root_loop = true);
GradedGraph gen_grid2d_lineage(Index top, bool root_loop = true);
/// Every level is one looped vertex; S and P are [1].
GradedGraph gen_nhat_lineage(Index top);
/// Dispatch on "path" | "complete" | "grid2d" | "nhat".
GradedGraph gen_lineage(std::string_view generator, Index top, bool root_loop = true);

/// 2n x n map with column p feeding rows 2p and 2p+1.
SparseMatrix pair_aggregation(Index coarse);

GradedGraph truncate(const GradedGraph& gg, Index top);
/// Levelwise disjoint union; both inputs must have the same level count.
GradedGraph oplus_levelwise(const GradedGraph& a, const GradedGraph& b);

struct GrowthBound {
  double base = 2.0;
  double eps = 0.01;
  double scale = 1.0;

  /// scale · base^(l^(1+eps))
  double at(Index l) const;
};

struct LevelGrowth {
  Index level = 0;
  Index vertices = 0;
  Index edges = 0;
  Index inter_nnz = 0;
  double bound = 0.0;
  bool violated = false;
};

struct GrowthProfile {
  std::vector<LevelGrowth> levels;
  /// max over l ≥ 1 of |V_l|^(1/l).
  double base = 0.0;
  std::optional<Index> first_violation;
};

GrowthProfile growth_profile(const GradedGraph& gg, const GrowthBound& bound);
/// Same check from level sizes alone (edges and inter counts left at 0).
GrowthProfile growth_profile(std::span<const Index> level_sizes,
                             const GrowthBound& bound);

}  // namespace skel
