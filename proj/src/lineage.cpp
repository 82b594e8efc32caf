#include "skel/lineage.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace skel {

namespace {

std::string level_tag(Index l) { return "level " + std::to_string(l); }

std::string dims(const SparseMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

GradedGraph pair_lineage(std::string name, Index top, bool root_loop,
                         Graph (*level_graph)(Index)) {
  if (top < 0) throw std::invalid_argument("lineage top level must be >= 0");
  GradedGraph gg;
  gg.name = std::move(name);
  const double w = 1.0 / std::sqrt(2.0);
  for (Index l = 0; l <= top; ++l) {
    if (l == 0) {
      gg.levels.push_back(root_loop ? loop_vertex() : empty_graph(1));
    } else {
      gg.levels.push_back(level_graph(Index{1} << l));
    }
    if (l < top) {
      auto s = pair_aggregation(Index{1} << l);
      gg.prolong.push_back(scale(s, w));
      gg.inter.push_back(std::move(s));
    }
  }
  return gg;
}

}  // namespace

std::vector<Index> GradedGraph::level_sizes() const {
  std::vector<Index> out;
  out.reserve(levels.size());
  for (const auto& g : levels) out.push_back(g.order());
  return out;
}

bool same_structure(const GradedGraph& a, const GradedGraph& b) {
  return a.levels == b.levels && a.inter == b.inter && a.prolong == b.prolong;
}

VertexCodec::VertexCodec(std::vector<Index> level_sizes) : sizes_(std::move(level_sizes)) {
  offsets_.resize(sizes_.size() + 1, 0);
  for (std::size_t l = 0; l < sizes_.size(); ++l) {
    if (sizes_[l] < 0) throw std::invalid_argument("negative level size");
    offsets_[l + 1] = offsets_[l] + sizes_[l];
  }
}

Index VertexCodec::encode(Index level, Index j) const {
  if (level < 0 || level >= num_levels() || j < 0 || j >= level_size(level)) {
    throw std::out_of_range("vertex (" + std::to_string(level) + ", " + std::to_string(j) +
                            ") outside codec");
  }
  return offsets_[static_cast<std::size_t>(level)] + j;
}

std::pair<Index, Index> VertexCodec::decode(Index flat) const {
  if (flat < 0 || flat >= size()) throw std::out_of_range("flat id outside codec");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), flat);
  const auto l = static_cast<Index>(it - offsets_.begin()) - 1;
  return {l, flat - offsets_[static_cast<std::size_t>(l)]};
}

Graph assemble_flat(const GradedGraph& gg) {
  const auto sizes = gg.level_sizes();
  BlockMap blocks;
  for (Index l = 0; l < gg.num_levels(); ++l) {
    blocks.emplace(std::pair{l, l}, gg.levels[static_cast<std::size_t>(l)].adj());
  }
  for (Index l = 0; l < static_cast<Index>(gg.inter.size()); ++l) {
    const auto& s = gg.inter[static_cast<std::size_t>(l)];
    blocks.emplace(std::pair{l + 1, l}, s);
    blocks.emplace(std::pair{l, l + 1}, transpose(s));
  }
  return Graph(block_assemble(blocks, sizes, sizes));
}

std::vector<Index> flat_levels(const GradedGraph& gg) {
  std::vector<Index> out;
  for (Index l = 0; l < gg.num_levels(); ++l) out.insert(out.end(), gg.level_size(l), l);
  return out;
}

std::string_view kind_name(Diagnostic::Kind k) noexcept {
  switch (k) {
    case Diagnostic::Kind::dimension:
      return "dimension";
    case Diagnostic::Kind::grading:
      return "grading";
    case Diagnostic::Kind::pattern:
      return "pattern";
    case Diagnostic::Kind::orthonormality:
      return "orthonormality";
    case Diagnostic::Kind::symmetry:
      return "symmetry";
  }
  return "unknown";
}

ValidationReport validate(const GradedGraph& gg) {
  using K = Diagnostic::Kind;
  ValidationReport rep;
  const Index n = gg.num_levels();
  if (n == 0) {
    rep.issues.push_back({K::dimension, -1, 0.0, "graded graph has no levels"});
    return rep;
  }
  bool undirected = true;
  for (Index l = 0; l < n; ++l) {
    const auto& g = gg.levels[static_cast<std::size_t>(l)];
    if (!g.undirected()) {
      undirected = false;
      rep.issues.push_back({K::symmetry, l, 0.0, level_tag(l) + ": directed level graph"});
    }
    LevelCensus c{l, g.order(), g.edge_count(), 0};
    if (l < static_cast<Index>(gg.inter.size())) {
      c.inter_nnz = gg.inter[static_cast<std::size_t>(l)].nnz();
    }
    rep.census.push_back(c);
  }

  bool dims_ok = true;
  if (static_cast<Index>(gg.inter.size()) != n - 1) {
    dims_ok = false;
    rep.issues.push_back({K::dimension, -1, 0.0,
                          "expected " + std::to_string(n - 1) + " inter-level maps, found " +
                              std::to_string(gg.inter.size())});
  }
  if (!gg.prolong.empty() && gg.prolong.size() != gg.inter.size()) {
    dims_ok = false;
    rep.issues.push_back({K::dimension, -1, 0.0,
                          "expected " + std::to_string(gg.inter.size()) +
                              " prolongations, found " + std::to_string(gg.prolong.size())});
  }
  const Index pairs = std::min<Index>(n - 1, static_cast<Index>(gg.inter.size()));
  for (Index l = 0; l < pairs; ++l) {
    const auto& s = gg.inter[static_cast<std::size_t>(l)];
    if (s.rows() != gg.level_size(l + 1) || s.cols() != gg.level_size(l)) {
      dims_ok = false;
      rep.issues.push_back({K::dimension, l, 0.0,
                            level_tag(l) + ": S is " + dims(s) + ", expected " +
                                std::to_string(gg.level_size(l + 1)) + "x" +
                                std::to_string(gg.level_size(l))});
      continue;
    }
    for (const auto& t : s.entries()) {
      if (t.value < 0.0) {
        rep.issues.push_back({K::pattern, l, t.value, level_tag(l) + ": negative S entry"});
        break;
      }
    }
    if (l >= static_cast<Index>(gg.prolong.size())) continue;
    const auto& p = gg.prolong[static_cast<std::size_t>(l)];
    if (p.rows() != s.rows() || p.cols() != s.cols()) {
      dims_ok = false;
      rep.issues.push_back({K::dimension, l, 0.0,
                            level_tag(l) + ": P is " + dims(p) + ", S is " + dims(s)});
      continue;
    }
    if (!pattern_subset(p, s)) {
      rep.issues.push_back(
          {K::pattern, l, 0.0, level_tag(l) + ": P has entries outside the pattern of S"});
    }
    const auto ptp = multiply(transpose(p), p);
    const double dev = max_abs_diff(ptp, SparseMatrix::identity(p.cols()));
    if (dev > kOrthoTolerance) {
      rep.issues.push_back({K::orthonormality, l, dev,
                            level_tag(l) + ": max |PᵀP - I| = " + std::to_string(dev)});
    }
  }
  if (dims_ok && undirected) {
    const auto flat = assemble_flat(gg);
    const auto lv = flat_levels(gg);
    auto grading = validate_grading(flat, lv);
    rep.issues.insert(rep.issues.end(), grading.begin(), grading.end());
  }
  return rep;
}

std::vector<Diagnostic> validate_grading(const Graph& flat, std::span<const Index> level_of) {
  if (static_cast<Index>(level_of.size()) != flat.order()) {
    throw DimensionError("validate_grading: one level label per vertex required");
  }
  std::vector<Diagnostic> out;
  for (const auto& t : flat.adj().entries()) {
    const Index a = level_of[static_cast<std::size_t>(t.row)];
    const Index b = level_of[static_cast<std::size_t>(t.col)];
    if (std::abs(a - b) >= 2) {
      out.push_back({Diagnostic::Kind::grading, std::min(a, b), static_cast<double>(std::abs(a - b)),
                     "edge " + std::to_string(t.row) + "-" + std::to_string(t.col) +
                         " joins levels " + std::to_string(a) + " and " + std::to_string(b)});
    }
  }
  return out;
}

SparseMatrix pair_aggregation(Index coarse) {
  std::vector<Triplet> e;
  e.reserve(static_cast<std::size_t>(2 * coarse));
  for (Index p = 0; p < coarse; ++p) {
    e.push_back({2 * p, p, 1.0});
    e.push_back({2 * p + 1, p, 1.0});
  }
  return SparseMatrix::from_triplets(2 * coarse, coarse, std::move(e));
}

GradedGraph gen_path_lineage(Index top, bool root_loop) {
  return pair_lineage("path", top, root_loop, path_graph);
}

GradedGraph gen_complete_lineage(Index top, bool root_loop) {
  return pair_lineage("complete", top, root_loop, complete_graph);
}

GradedGraph gen_grid2d_lineage(Index top, bool root_loop) {
  const auto path = gen_path_lineage(top, root_loop);
  GradedGraph gg;
  gg.name = "grid2d";
  for (Index l = 0; l <= top; ++l) {
    const auto& p = path.levels[static_cast<std::size_t>(l)];
    // The root stays a single looped vertex rather than the doubled loop a
    // Kronecker sum would give.
    gg.levels.push_back(l == 0 ? p : box(p, p));
    if (l < top) {
      const auto& s = path.inter[static_cast<std::size_t>(l)];
      const auto& pr = path.prolong[static_cast<std::size_t>(l)];
      gg.inter.push_back(kron(s, s));
      gg.prolong.push_back(kron(pr, pr));
    }
  }
  return gg;
}

GradedGraph gen_nhat_lineage(Index top) {
  if (top < 0) throw std::invalid_argument("lineage top level must be >= 0");
  GradedGraph gg;
  gg.name = "nhat";
  for (Index l = 0; l <= top; ++l) {
    gg.levels.push_back(loop_vertex());
    if (l < top) {
      gg.inter.push_back(SparseMatrix::identity(1));
      gg.prolong.push_back(SparseMatrix::identity(1));
    }
  }
  return gg;
}

GradedGraph gen_lineage(std::string_view generator, Index top, bool root_loop) {
  if (generator == "path") return gen_path_lineage(top, root_loop);
  if (generator == "complete") return gen_complete_lineage(top, root_loop);
  if (generator == "grid2d") return gen_grid2d_lineage(top, root_loop);
  if (generator == "nhat") return gen_nhat_lineage(top);
  throw std::invalid_argument("unknown generator '" + std::string(generator) +
                              "' (expected path, complete, grid2d or nhat)");
}

GradedGraph truncate(const GradedGraph& gg, Index top) {
  if (top < 0 || top > gg.top_level()) {
    throw std::out_of_range("truncate: level " + std::to_string(top) + " not available");
  }
  GradedGraph out;
  out.name = gg.name;
  out.metadata = gg.metadata;
  const auto n = static_cast<std::ptrdiff_t>(top);
  out.levels.assign(gg.levels.begin(), gg.levels.begin() + n + 1);
  out.inter.assign(gg.inter.begin(), gg.inter.begin() + n);
  if (!gg.prolong.empty()) out.prolong.assign(gg.prolong.begin(), gg.prolong.begin() + n);
  return out;
}

GradedGraph oplus_levelwise(const GradedGraph& a, const GradedGraph& b) {
  if (a.num_levels() != b.num_levels()) {
    throw DimensionError("oplus_levelwise: level counts differ");
  }
  GradedGraph out;
  out.name = a.name + "+" + b.name;
  const bool with_p = !a.prolong.empty() && !b.prolong.empty();
  auto diag2 = [](const SparseMatrix& x, const SparseMatrix& y) {
    const Index rs[] = {x.rows(), y.rows()};
    const Index cs[] = {x.cols(), y.cols()};
    BlockMap m;
    m.emplace(std::pair<Index, Index>{0, 0}, x);
    m.emplace(std::pair<Index, Index>{1, 1}, y);
    return block_assemble(m, rs, cs);
  };
  for (Index l = 0; l < a.num_levels(); ++l) {
    const auto u = static_cast<std::size_t>(l);
    out.levels.push_back(oplus(a.levels[u], b.levels[u]));
    if (l + 1 < a.num_levels()) {
      out.inter.push_back(diag2(a.inter[u], b.inter[u]));
      if (with_p) out.prolong.push_back(diag2(a.prolong[u], b.prolong[u]));
    }
  }
  return out;
}

double GrowthBound::at(Index l) const {
  return scale * std::pow(base, std::pow(static_cast<double>(l), 1.0 + eps));
}

GrowthProfile growth_profile(std::span<const Index> level_sizes, const GrowthBound& bound) {
  if (level_sizes.size() < 2) throw std::invalid_argument("growth_profile needs at least 2 levels");
  GrowthProfile out;
  for (std::size_t l = 0; l < level_sizes.size(); ++l) {
    LevelGrowth g;
    g.level = static_cast<Index>(l);
    g.vertices = level_sizes[l];
    g.bound = bound.at(g.level);
    g.violated = static_cast<double>(g.vertices) > g.bound;
    if (g.violated && !out.first_violation) out.first_violation = g.level;
    if (l >= 1) {
      out.base = std::max(out.base, std::pow(static_cast<double>(g.vertices),
                                             1.0 / static_cast<double>(l)));
    }
    out.levels.push_back(g);
  }
  return out;
}

GrowthProfile growth_profile(const GradedGraph& gg, const GrowthBound& bound) {
  const auto sizes = gg.level_sizes();
  auto out = growth_profile(sizes, bound);
  for (Index l = 0; l < gg.num_levels(); ++l) {
    auto& g = out.levels[static_cast<std::size_t>(l)];
    g.edges = gg.levels[static_cast<std::size_t>(l)].edge_count();
    if (l < static_cast<Index>(gg.inter.size())) g.inter_nnz = gg.inter[static_cast<std::size_t>(l)].nnz();
  }
  return out;
}

}  // namespace skel
