#include "skel/skeletal.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <tuple>

namespace skel {

using nlohmann::json;

namespace {

std::size_t at(Index i) { return static_cast<std::size_t>(i); }

const SparseMatrix& level_adj(const GradedGraph& g, Index l) { return g.levels.at(at(l)).adj(); }

const SparseMatrix& coarse_to_fine(const GradedGraph& g, Index coarse, bool weighted) {
  if (weighted) {
    if (g.prolong.empty()) {
      throw std::invalid_argument("prolongation weights requested but factor '" + g.name +
                                  "' has no P maps");
    }
    return g.prolong.at(at(coarse));
  }
  return g.inter.at(at(coarse));
}

/// Factor contribution for an edge from a level-`col` vertex to a level-`row`
/// vertex: G on the same level, S going up, Sᵀ going down.
SparseMatrix factor_step(const GradedGraph& g, Index row, Index col, bool weighted) {
  if (row == col) return level_adj(g, row);
  if (row == col + 1) return coarse_to_fine(g, col, weighted);
  return transpose(coarse_to_fine(g, row, weighted));
}

SparseMatrix kron_all(const std::vector<SparseMatrix>& ms) {
  SparseMatrix out = ms.front();
  for (std::size_t i = 1; i < ms.size(); ++i) out = kron(out, ms[i]);
  return out;
}

bool alternating(std::span<const Index> d) {
  Index prev = 0;
  for (Index x : d) {
    if (x == 0) continue;
    if (x == prev) return false;
    prev = x;
  }
  return true;
}

/// Block of the n-way product between a column block and a row block.
/// Returns an empty optional when the block is structurally zero.
std::optional<SparseMatrix> nway_block(std::span<const GradedGraph> f,
                                       std::span<const Index> rows, std::span<const Index> cols,
                                       ProductKind kind, NwayMode mode, bool weighted) {
  const std::size_t n = f.size();
  std::vector<Index> d(n);
  std::size_t moving = 0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = rows[i] - cols[i];
    if (d[i] < -1 || d[i] > 1) return std::nullopt;
    if (d[i] != 0) ++moving;
  }

  std::optional<SparseMatrix> cross_part;
  if (kind != ProductKind::box && (mode == NwayMode::hat || alternating(d))) {
    std::vector<SparseMatrix> ms;
    for (std::size_t i = 0; i < n; ++i) ms.push_back(factor_step(f[i], rows[i], cols[i], weighted));
    cross_part = kron_all(ms);
  }
  std::optional<SparseMatrix> box_part;
  if (kind != ProductKind::cross && moving <= 1) {
    if (moving == 0) {
      SparseMatrix acc = level_adj(f[0], rows[0]);
      for (std::size_t i = 1; i < n; ++i) acc = kron_sum(acc, level_adj(f[i], rows[i]));
      box_part = std::move(acc);
    } else {
      std::vector<SparseMatrix> ms;
      for (std::size_t i = 0; i < n; ++i) {
        ms.push_back(d[i] == 0 ? SparseMatrix::identity(f[i].level_size(rows[i]))
                               : factor_step(f[i], rows[i], cols[i], weighted));
      }
      box_part = kron_all(ms);
    }
  }
  if (cross_part && box_part) return entrywise_max(*box_part, *cross_part);
  if (cross_part) return cross_part;
  return box_part;
}

std::vector<Index> block_sizes(const std::vector<ProductBlock>& blocks) {
  std::vector<Index> out;
  for (const auto& b : blocks) out.push_back(b.size);
  return out;
}

json block_table(const ProductVertexCodec& codec) {
  json levels = json::array();
  for (Index l = 0; l < codec.num_levels(); ++l) {
    json row = json::array();
    for (const auto& b : codec.blocks(l)) row.push_back(b.factor_levels);
    levels.push_back(row);
  }
  return levels;
}

json product_metadata(const ProductVertexCodec& codec, std::string_view kind,
                      std::span<const GradedGraph> factors, bool weighted) {
  json m;
  m["kind"] = kind;
  json names = json::array();
  for (const auto& f : factors) names.push_back(f.name);
  m["factors"] = names;
  m["maxLevel"] = codec.top_level();
  json partial = json::array();
  for (Index l = 0; l < codec.num_levels(); ++l) {
    if (codec.partial(l)) partial.push_back(l);
  }
  m["partialLevels"] = partial;
  m["blocks"] = block_table(codec);
  m["prolongWeights"] = weighted;
  return m;
}

std::string join_names(std::span<const GradedGraph> fs, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (i) out += sep;
    out += fs[i].name;
  }
  return out;
}

/// Generic assembly over any codec using nway_block for every block pair.
GradedGraph assemble_product(std::span<const GradedGraph> f, const ProductVertexCodec& codec,
                             ProductKind kind, NwayMode mode, bool weighted) {
  GradedGraph out;
  for (Index L = 0; L < codec.num_levels(); ++L) {
    const auto& bl = codec.blocks(L);
    const auto sizes = block_sizes(bl);
    BlockMap m;
    for (std::size_t r = 0; r < bl.size(); ++r) {
      for (std::size_t c = 0; c < bl.size(); ++c) {
        auto blk = nway_block(f, bl[r].factor_levels, bl[c].factor_levels, kind, mode, false);
        if (blk && blk->nnz() > 0) m.emplace(std::pair{Index(r), Index(c)}, std::move(*blk));
      }
    }
    out.levels.emplace_back(block_assemble(m, sizes, sizes));
    if (L + 1 == codec.num_levels()) break;
    const auto& up = codec.blocks(L + 1);
    const auto up_sizes = block_sizes(up);
    BlockMap s;
    for (std::size_t r = 0; r < up.size(); ++r) {
      for (std::size_t c = 0; c < bl.size(); ++c) {
        auto blk = nway_block(f, up[r].factor_levels, bl[c].factor_levels, kind, mode, weighted);
        if (blk && blk->nnz() > 0) s.emplace(std::pair{Index(r), Index(c)}, std::move(*blk));
      }
    }
    out.inter.push_back(block_assemble(s, up_sizes, sizes));
  }
  return out;
}

std::vector<std::vector<Index>> sizes_of(std::span<const GradedGraph> f) {
  std::vector<std::vector<Index>> out;
  for (const auto& g : f) out.push_back(g.level_sizes());
  return out;
}

}  // namespace

std::string_view kind_name(ProductKind k) noexcept {
  switch (k) {
    case ProductKind::box:
      return "box";
    case ProductKind::cross:
      return "cross";
    case ProductKind::strong:
      return "strong";
  }
  return "unknown";
}

ProductKind parse_kind(std::string_view s) {
  if (s == "box") return ProductKind::box;
  if (s == "cross") return ProductKind::cross;
  if (s == "strong") return ProductKind::strong;
  throw std::invalid_argument("unknown product kind '" + std::string(s) + "'");
}

// ---- codec ---------------------------------------------------------------

ProductVertexCodec ProductVertexCodec::summed(std::vector<std::vector<Index>> factor_sizes,
                                              std::optional<Index> max_level) {
  std::vector<LevelMap> maps(factor_sizes.size(), [](Index l) { return l; });
  return shaped(std::move(factor_sizes), std::move(maps), max_level);
}

ProductVertexCodec ProductVertexCodec::shaped(std::vector<std::vector<Index>> factor_sizes,
                                              std::vector<LevelMap> maps,
                                              std::optional<Index> max_level) {
  const std::size_t n = factor_sizes.size();
  if (n < 2) throw std::invalid_argument("product codec needs at least two factors");
  if (maps.size() != n) throw std::invalid_argument("one level map per factor required");
  for (const auto& s : factor_sizes) {
    if (s.empty()) throw std::invalid_argument("factor with no levels");
  }

  std::vector<Index> base(n);
  for (std::size_t i = 0; i < n; ++i) {
    base[i] = maps[i](0);
    if (base[i] < 0) throw std::invalid_argument("level map must be nonnegative");
  }
  const Index base_sum = std::accumulate(base.begin(), base.end(), Index{0});

  // First level reached by a block needing a factor level beyond its top.
  Index first_partial = std::numeric_limits<Index>::max();
  for (std::size_t i = 0; i < n; ++i) {
    const auto top = static_cast<Index>(factor_sizes[i].size()) - 1;
    first_partial = std::min(first_partial, maps[i](top + 1) - base[i] + base_sum);
  }
  const Index top = max_level.value_or(first_partial - 1);
  if (top < 0) throw std::invalid_argument("product has no complete levels");

  // Candidate levels per factor: everything whose contribution still fits.
  constexpr Index kScanLimit = Index{1} << 20;
  std::vector<std::vector<std::pair<Index, Index>>> cand(n);  // (l_i, f_i(l_i))
  for (std::size_t i = 0; i < n; ++i) {
    Index prev = base[i];
    for (Index l = 0;; ++l) {
      if (l > kScanLimit) throw std::invalid_argument("level map does not grow");
      const Index v = maps[i](l);
      if (v < prev) throw std::invalid_argument("level map must be nondecreasing");
      prev = v;
      if (v - base[i] + base_sum > top) break;
      cand[i].emplace_back(l, v);
    }
  }

  ProductVertexCodec c;
  c.factor_sizes_ = std::move(factor_sizes);
  c.levels_.resize(at(top + 1));
  c.partial_.assign(at(top + 1), false);
  std::vector<Index> pick(n);
  auto rec = [&](auto&& self, std::size_t i, Index level, bool inside) -> void {
    if (i == n) {
      if (level > top) return;
      if (inside) {
        c.levels_[at(level)].push_back({pick, 0, 0});
      } else {
        c.partial_[at(level)] = true;
      }
      return;
    }
    const auto ftop = static_cast<Index>(c.factor_sizes_[i].size()) - 1;
    for (const auto& [l, v] : cand[i]) {
      pick[i] = l;
      self(self, i + 1, level + v, inside && l <= ftop);
    }
  };
  rec(rec, 0, 0, true);

  for (auto& blocks : c.levels_) {
    std::sort(blocks.begin(), blocks.end(), [](const ProductBlock& x, const ProductBlock& y) {
      return x.factor_levels < y.factor_levels;
    });
    Index off = 0;
    for (auto& b : blocks) {
      b.size = 1;
      for (std::size_t i = 0; i < n; ++i) b.size *= c.factor_size(i, b.factor_levels[i]);
      b.offset = off;
      off += b.size;
    }
  }
  return c;
}

Index ProductVertexCodec::factor_size(std::size_t factor, Index level) const {
  return factor_sizes_.at(factor).at(at(level));
}

const std::vector<ProductBlock>& ProductVertexCodec::blocks(Index level) const {
  return levels_.at(at(level));
}

Index ProductVertexCodec::level_size(Index level) const {
  const auto& b = blocks(level);
  return b.empty() ? 0 : b.back().offset + b.back().size;
}

std::vector<Index> ProductVertexCodec::level_sizes() const {
  std::vector<Index> out;
  for (Index l = 0; l < num_levels(); ++l) out.push_back(level_size(l));
  return out;
}

std::optional<std::size_t> ProductVertexCodec::find_block(
    Index level, std::span<const Index> factor_levels) const {
  if (level < 0 || level >= num_levels()) return std::nullopt;
  const auto& bl = blocks(level);
  const std::vector<Index> key(factor_levels.begin(), factor_levels.end());
  const auto it = std::lower_bound(bl.begin(), bl.end(), key,
                                   [](const ProductBlock& b, const std::vector<Index>& k) {
                                     return b.factor_levels < k;
                                   });
  if (it == bl.end() || it->factor_levels != key) return std::nullopt;
  return static_cast<std::size_t>(it - bl.begin());
}

Index ProductVertexCodec::encode(Index level, std::span<const Index> factor_levels,
                                 std::span<const Index> factor_indices) const {
  const auto b = find_block(level, factor_levels);
  if (!b || factor_indices.size() != num_factors()) {
    throw std::out_of_range("no such block at level " + std::to_string(level));
  }
  Index j = 0;
  for (std::size_t i = 0; i < num_factors(); ++i) {
    const Index radix = factor_size(i, factor_levels[i]);
    if (factor_indices[i] < 0 || factor_indices[i] >= radix) {
      throw std::out_of_range("factor index out of range");
    }
    j = j * radix + factor_indices[i];
  }
  return blocks(level)[*b].offset + j;
}

ProductVertexCodec::Decoded ProductVertexCodec::decode(Index level, Index j) const {
  const auto& bl = blocks(level);
  if (j < 0 || j >= level_size(level)) throw std::out_of_range("product vertex out of range");
  const auto it = std::upper_bound(bl.begin(), bl.end(), j, [](Index x, const ProductBlock& b) {
    return x < b.offset;
  });
  const auto& b = *(it - 1);
  Decoded d{b.factor_levels, std::vector<Index>(num_factors())};
  Index rest = j - b.offset;
  for (std::size_t i = num_factors(); i-- > 0;) {
    const Index radix = factor_size(i, b.factor_levels[i]);
    d.factor_indices[i] = rest % radix;
    rest /= radix;
  }
  return d;
}

// ---- thickening ----------------------------------------------------------

GradedGraph thicken(const GradedGraph& gg) {
  const auto sizes = gg.level_sizes();
  GradedGraph out;
  out.name = "thicken(" + gg.name + ")";
  for (Index l = 0; l < gg.num_levels(); ++l) {
    out.levels.push_back(assemble_flat(truncate(gg, l)));
    if (l == gg.top_level()) break;
    const std::span<const Index> rows(sizes.data(), at(l + 2));
    const std::span<const Index> cols(sizes.data(), at(l + 1));
    BlockMap m;
    for (Index i = 0; i <= l; ++i) m.emplace(std::pair{i, i}, level_adj(gg, i));
    out.inter.push_back(block_assemble(m, rows, cols));
  }
  out.metadata = {{"operation", "thicken"}, {"source", gg.name}};
  return out;
}

// ---- binary products from the block formulas ------------------------------

ProductVertexCodec product_codec(const GradedGraph& a, const GradedGraph& b,
                                 const ProductOptions& opt) {
  return ProductVertexCodec::summed({a.level_sizes(), b.level_sizes()}, opt.max_level);
}

GradedGraph skel_product(const GradedGraph& a, const GradedGraph& b, ProductKind kind,
                         const ProductOptions& opt) {
  const auto codec = product_codec(a, b, opt);
  const bool w = opt.prolong_weights;
  const bool want_cross = kind != ProductKind::box;
  const bool want_box = kind != ProductKind::cross;
  auto combine = [&](std::optional<SparseMatrix> bx, std::optional<SparseMatrix> cr) {
    if (bx && cr) return entrywise_max(*bx, *cr);
    return bx ? *bx : *cr;
  };

  GradedGraph out;
  for (Index L = 0; L < codec.num_levels(); ++L) {
    const auto& bl = codec.blocks(L);
    const auto sizes = block_sizes(bl);
    BlockMap m;
    for (std::size_t k = 0; k < bl.size(); ++k) {
      const Index l1 = bl[k].factor_levels[0];
      const Index l2 = bl[k].factor_levels[1];
      const auto& g1 = level_adj(a, l1);
      const auto& g2 = level_adj(b, l2);
      std::optional<SparseMatrix> bx, cr;
      if (want_box) bx = kron_sum(g1, g2);
      if (want_cross) cr = kron(g1, g2);
      m.emplace(std::pair{Index(k), Index(k)}, combine(bx, cr));
      // Cross edges between (l1, l2) and (l1+1, l2-1).
      const Index next[] = {l1 + 1, l2 - 1};
      const auto k2 = want_cross ? codec.find_block(L, next) : std::nullopt;
      if (k2) {
        auto between = kron(transpose(a.inter.at(at(l1))), b.inter.at(at(l2 - 1)));
        m.emplace(std::pair{Index(*k2), Index(k)}, transpose(between));
        m.emplace(std::pair{Index(k), Index(*k2)}, std::move(between));
      }
    }
    out.levels.emplace_back(block_assemble(m, sizes, sizes));
    if (L + 1 == codec.num_levels()) break;

    const auto& up = codec.blocks(L + 1);
    BlockMap s;
    for (std::size_t k = 0; k < bl.size(); ++k) {
      const Index c1 = bl[k].factor_levels[0];
      const Index c2 = bl[k].factor_levels[1];
      const Index n1 = a.level_size(c1);
      const Index n2 = b.level_size(c2);
      const Index step1[] = {c1 + 1, c2};
      if (const auto r = codec.find_block(L + 1, step1)) {
        const auto& s1 = coarse_to_fine(a, c1, w);
        std::optional<SparseMatrix> bx, cr;
        if (want_box) bx = kron(s1, SparseMatrix::identity(n2));
        if (want_cross) cr = kron(s1, level_adj(b, c2));
        s.emplace(std::pair{Index(*r), Index(k)}, combine(bx, cr));
      }
      const Index step2[] = {c1, c2 + 1};
      if (const auto r = codec.find_block(L + 1, step2)) {
        const auto& s2 = coarse_to_fine(b, c2, w);
        std::optional<SparseMatrix> bx, cr;
        if (want_box) bx = kron(SparseMatrix::identity(n1), s2);
        if (want_cross) cr = kron(level_adj(a, c1), s2);
        s.emplace(std::pair{Index(*r), Index(k)}, combine(bx, cr));
      }
    }
    out.inter.push_back(block_assemble(s, block_sizes(up), sizes));
  }
  const GradedGraph fs[] = {a, b};
  out.name = a.name + "_" + std::string(kind_name(kind)) + "_" + b.name;
  out.metadata = product_metadata(codec, kind_name(kind), fs, w);
  return out;
}

GradedGraph skel_cross(const GradedGraph& a, const GradedGraph& b, const ProductOptions& opt) {
  return skel_product(a, b, ProductKind::cross, opt);
}

GradedGraph skel_box(const GradedGraph& a, const GradedGraph& b, const ProductOptions& opt) {
  return skel_product(a, b, ProductKind::box, opt);
}

GradedGraph skel_strong(const GradedGraph& a, const GradedGraph& b, const ProductOptions& opt) {
  return skel_product(a, b, ProductKind::strong, opt);
}

// ---- n-way and shaped products --------------------------------------------

GradedGraph skel_nway(std::span<const GradedGraph> factors, ProductKind kind, NwayMode mode,
                      const ProductOptions& opt) {
  if (factors.size() < 2) throw std::invalid_argument("n-way product needs at least two factors");
  const auto codec = ProductVertexCodec::summed(sizes_of(factors), opt.max_level);
  auto out = assemble_product(factors, codec, kind, mode, opt.prolong_weights);
  const std::string mode_name = mode == NwayMode::hat ? "hat" : "tilde";
  out.name = std::string(kind_name(kind)) + "_" + mode_name + "(" + join_names(factors, ",") + ")";
  out.metadata = product_metadata(codec, kind_name(kind), factors, opt.prolong_weights);
  out.metadata["mode"] = mode_name;
  return out;
}

GradedGraph skel_nway_cross(std::span<const GradedGraph> factors, NwayMode mode,
                            const ProductOptions& opt) {
  return skel_nway(factors, ProductKind::cross, mode, opt);
}

Index Rational::ceil_times(Index l) const {
  const Index p = num * l;
  return p >= 0 ? (p + den - 1) / den : -((-p) / den);
}

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational parse_rational(std::string_view s) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("not a positive rational: '" + std::string(s) + "'");
  };
  auto parse_int = [&](std::string_view t, Index& v) {
    if (t.empty()) return false;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    return r.ec == std::errc() && r.ptr == t.data() + t.size();
  };
  Rational q;
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    if (!parse_int(s.substr(0, slash), q.num) || !parse_int(s.substr(slash + 1), q.den)) {
      return fail();
    }
  } else if (const auto dot = s.find('.'); dot != std::string_view::npos) {
    const auto whole = s.substr(0, dot);
    const auto frac = s.substr(dot + 1);
    Index w = 0, f = 0;
    if ((!whole.empty() && !parse_int(whole, w)) || !parse_int(frac, f) || frac.size() > 15) {
      return fail();
    }
    q.den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) q.den *= 10;
    q.num = w * q.den + f;
  } else if (!parse_int(s, q.num)) {
    return fail();
  }
  if (q.num <= 0 || q.den <= 0) return fail();
  const Index g = std::gcd(q.num, q.den);
  q.num /= g;
  q.den /= g;
  return q;
}

GradedGraph skel_shaped(const GradedGraph& a, const GradedGraph& b, ProductKind kind, LevelMap f1,
                        LevelMap f2, const ProductOptions& opt) {
  const GradedGraph fs[] = {a, b};
  const auto codec = ProductVertexCodec::shaped(sizes_of(fs), {std::move(f1), std::move(f2)},
                                                opt.max_level);
  auto out = assemble_product(fs, codec, kind, NwayMode::hat, opt.prolong_weights);
  out.name = a.name + "_" + std::string(kind_name(kind)) + "_shaped_" + b.name;
  out.metadata = product_metadata(codec, kind_name(kind), fs, opt.prolong_weights);
  out.metadata["grading"] = "shaped";
  return out;
}

GradedGraph skel_dilated(const GradedGraph& a, const GradedGraph& b, ProductKind kind,
                         Rational rho1, Rational rho2, const ProductOptions& opt) {
  if (rho1.num <= 0 || rho1.den <= 0 || rho2.num <= 0 || rho2.den <= 0) {
    throw std::invalid_argument("dilation rates must be positive");
  }
  auto out = skel_shaped(
      a, b, kind, [rho1](Index l) { return rho1.ceil_times(l); },
      [rho2](Index l) { return rho2.ceil_times(l); }, opt);
  out.name = a.name + "_" + std::string(kind_name(kind)) + "_dilated_" + b.name;
  out.metadata["grading"] = "dilated";
  out.metadata["rho"] = {rho1.str(), rho2.str()};
  return out;
}

// ---- block-matrix construction --------------------------------------------

GradedGraph appendix_oracle(const GradedGraph& a, const GradedGraph& b, ProductKind kind,
                            Index top) {
  if (top < 0) throw std::invalid_argument("appendix_oracle: negative top level");
  const auto ta = truncate(a, std::min(top, a.top_level()));
  const auto tb = truncate(b, std::min(top, b.top_level()));
  const auto fa = assemble_flat(ta).adj();
  const auto fb = assemble_flat(tb).adj();

  SparseMatrix full;
  switch (kind) {
    case ProductKind::cross:
      full = kron(fa, fb);
      break;
    case ProductKind::box:
      full = kron_sum(fa, fb);
      break;
    case ProductKind::strong:
      full = entrywise_max(kron_sum(fa, fb), kron(fa, fb));
      break;
  }

  // Sort product vertices by (level, l1, j1, j2) and gather.
  const auto la = flat_levels(ta);
  const auto lb = flat_levels(tb);
  const auto sa = ta.level_sizes();
  const auto sb = tb.level_sizes();
  std::vector<Index> off_a(sa.size(), 0), off_b(sb.size(), 0);
  for (std::size_t l = 1; l < sa.size(); ++l) off_a[l] = off_a[l - 1] + sa[l - 1];
  for (std::size_t l = 1; l < sb.size(); ++l) off_b[l] = off_b[l - 1] + sb[l - 1];
  const Index na = fa.rows();
  const Index nb = fb.rows();

  using Key = std::tuple<Index, Index, Index, Index, Index>;
  std::vector<Key> keys;
  keys.reserve(at(na * nb));
  for (Index u = 0; u < na; ++u) {
    for (Index w = 0; w < nb; ++w) {
      const Index l1 = la[at(u)];
      const Index l2 = lb[at(w)];
      keys.emplace_back(l1 + l2, l1, u - off_a[at(l1)], w - off_b[at(l2)], u * nb + w);
    }
  }
  std::sort(keys.begin(), keys.end());
  std::vector<Index> fwd(keys.size());
  std::vector<Index> level_of(keys.size());
  std::vector<Index> count(at(top + 2), 0);
  for (std::size_t r = 0; r < keys.size(); ++r) {
    const Index L = std::get<0>(keys[r]);
    fwd[at(std::get<4>(keys[r]))] = static_cast<Index>(r);
    level_of[r] = L;
    if (L <= top) ++count[at(L)];
  }
  const auto gathered = permute(full, Permutation(std::move(fwd)));

  std::vector<Triplet> kept;
  for (const auto& t : gathered.entries()) {
    if (std::abs(level_of[at(t.row)] - level_of[at(t.col)]) < 2) kept.push_back(t);
  }
  const auto sparsified =
      SparseMatrix::from_triplets(gathered.rows(), gathered.cols(), std::move(kept));

  GradedGraph out;
  Index off = 0;
  for (Index L = 0; L <= top; ++L) {
    const Index n = count[at(L)];
    out.levels.emplace_back(submatrix(sparsified, off, n, off, n));
    if (L < top) {
      out.inter.push_back(submatrix(sparsified, off + n, count[at(L + 1)], off, n));
    }
    off += n;
  }
  out.name = "oracle_" + a.name + "_" + std::string(kind_name(kind)) + "_" + b.name;
  out.metadata = {{"kind", kind_name(kind)}, {"construction", "block-matrix"}};
  return out;
}

GradedGraph naive_levelwise(const GradedGraph& a, const GradedGraph& b, ProductKind kind) {
  const Index top = std::min(a.top_level(), b.top_level());
  GradedGraph out;
  out.name = "naive_" + a.name + "_" + std::string(kind_name(kind)) + "_" + b.name;
  for (Index l = 0; l <= top; ++l) {
    const auto& g1 = a.levels[at(l)];
    const auto& g2 = b.levels[at(l)];
    switch (kind) {
      case ProductKind::box:
        out.levels.push_back(box(g1, g2));
        break;
      case ProductKind::cross:
        out.levels.push_back(cross(g1, g2));
        break;
      case ProductKind::strong:
        out.levels.push_back(strong(g1, g2));
        break;
    }
    if (l < top) out.inter.push_back(kron(a.inter[at(l)], b.inter[at(l)]));
  }
  out.metadata = {{"kind", kind_name(kind)}, {"construction", "levelwise"}};
  return out;
}

// ---- relabelling witnesses -------------------------------------------------

GradedGraph relabel(const GradedGraph& gg, std::span<const Permutation> per_level) {
  if (static_cast<Index>(per_level.size()) != gg.num_levels()) {
    throw DimensionError("relabel: one permutation per level required");
  }
  GradedGraph out;
  out.name = gg.name;
  out.metadata = gg.metadata;
  for (Index l = 0; l < gg.num_levels(); ++l) {
    const auto& g = gg.levels[at(l)];
    out.levels.emplace_back(permute(g.adj(), per_level[at(l)]), g.undirected());
  }
  for (std::size_t l = 0; l < gg.inter.size(); ++l) {
    out.inter.push_back(permute(gg.inter[l], per_level[l + 1], per_level[l]));
  }
  for (std::size_t l = 0; l < gg.prolong.size(); ++l) {
    out.prolong.push_back(permute(gg.prolong[l], per_level[l + 1], per_level[l]));
  }
  return out;
}

Permutation factor_order_permutation(const ProductVertexCodec& from, const ProductVertexCodec& to,
                                     std::span<const std::size_t> order, Index level) {
  const std::size_t n = from.num_factors();
  if (order.size() != n || to.num_factors() != n) {
    throw DimensionError("factor_order_permutation: factor counts differ");
  }
  std::vector<Index> fwd(at(from.level_size(level)));
  std::vector<Index> lv(n), ix(n);
  for (Index j = 0; j < from.level_size(level); ++j) {
    const auto d = from.decode(level, j);
    for (std::size_t i = 0; i < n; ++i) {
      lv[order[i]] = d.factor_levels[i];
      ix[order[i]] = d.factor_indices[i];
    }
    fwd[at(j)] = to.encode(level, lv, ix);
  }
  return Permutation(std::move(fwd));
}

std::vector<Permutation> factor_order_permutations(const ProductVertexCodec& from,
                                                   const ProductVertexCodec& to,
                                                   std::span<const std::size_t> order) {
  std::vector<Permutation> out;
  for (Index l = 0; l < from.num_levels(); ++l) {
    out.push_back(factor_order_permutation(from, to, order, l));
  }
  return out;
}

Permutation left_nested_permutation(const ProductVertexCodec& inner_ab,
                                    const ProductVertexCodec& outer,
                                    const ProductVertexCodec& flat, Index level) {
  std::vector<Index> fwd(at(outer.level_size(level)));
  for (Index j = 0; j < outer.level_size(level); ++j) {
    const auto d = outer.decode(level, j);
    const auto ab = inner_ab.decode(d.factor_levels[0], d.factor_indices[0]);
    const Index lv[] = {ab.factor_levels[0], ab.factor_levels[1], d.factor_levels[1]};
    const Index ix[] = {ab.factor_indices[0], ab.factor_indices[1], d.factor_indices[1]};
    fwd[at(j)] = flat.encode(level, lv, ix);
  }
  return Permutation(std::move(fwd));
}

Permutation right_nested_permutation(const ProductVertexCodec& inner_bc,
                                     const ProductVertexCodec& outer,
                                     const ProductVertexCodec& flat, Index level) {
  std::vector<Index> fwd(at(outer.level_size(level)));
  for (Index j = 0; j < outer.level_size(level); ++j) {
    const auto d = outer.decode(level, j);
    const auto bc = inner_bc.decode(d.factor_levels[1], d.factor_indices[1]);
    const Index lv[] = {d.factor_levels[0], bc.factor_levels[0], bc.factor_levels[1]};
    const Index ix[] = {d.factor_indices[0], bc.factor_indices[0], bc.factor_indices[1]};
    fwd[at(j)] = flat.encode(level, lv, ix);
  }
  return Permutation(std::move(fwd));
}

Permutation distributive_product_permutation(const ProductVertexCodec& a_bc,
                                             const ProductVertexCodec& ab,
                                             const ProductVertexCodec& ac, Index level) {
  std::vector<Index> fwd(at(a_bc.level_size(level)));
  for (Index j = 0; j < a_bc.level_size(level); ++j) {
    const auto d = a_bc.decode(level, j);
    const Index l2 = d.factor_levels[1];
    const Index nb = ab.factor_size(1, l2);
    const Index x = d.factor_indices[1];
    if (x < nb) {
      const Index ix[] = {d.factor_indices[0], x};
      fwd[at(j)] = ab.encode(level, d.factor_levels, ix);
    } else {
      const Index ix[] = {d.factor_indices[0], x - nb};
      fwd[at(j)] = ab.level_size(level) + ac.encode(level, d.factor_levels, ix);
    }
  }
  return Permutation(std::move(fwd));
}

}  // namespace skel
