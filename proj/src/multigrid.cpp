#include "skel/multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "skel/lineage.hpp"
#include "skel/matrix_market.hpp"

namespace skel {

namespace {

std::size_t at(Index i) { return static_cast<std::size_t>(i); }

using kernels::axpy;
using kernels::norm2;
using kernels::residual;
using kernels::spmv;

SparseMatrix tridiag(Index n) {
  std::vector<Triplet> e;
  for (Index i = 0; i < n; ++i) {
    e.push_back({i, i, 2.0});
    if (i > 0) e.push_back({i, i - 1, -1.0});
    if (i + 1 < n) e.push_back({i, i + 1, -1.0});
  }
  return SparseMatrix::from_triplets(n, n, std::move(e));
}

SparseMatrix galerkin(const SparseMatrix& p, const SparseMatrix& a) {
  return multiply(transpose(p), multiply(a, p));
}

/// nnz of A ⊗ I + I ⊗ B when both have full nonzero diagonals.
Index box_nnz(const SparseMatrix& a, const SparseMatrix& b) {
  return a.nnz() * b.rows() + a.rows() * b.nnz() - a.rows() * b.rows();
}

std::vector<double> zeros(Index n) { return std::vector<double>(at(n), 0.0); }

}  // namespace

std::string_view bc_name(BoundaryCondition bc) noexcept {
  switch (bc) {
    case BoundaryCondition::bc1:
      return "bc1";
    case BoundaryCondition::bc2:
      return "bc2";
    case BoundaryCondition::zero:
      break;
  }
  return "zero";
}

BoundaryCondition parse_bc(std::string_view s) {
  if (s == "1" || s == "bc1") return BoundaryCondition::bc1;
  if (s == "2" || s == "bc2") return BoundaryCondition::bc2;
  if (s == "0" || s == "zero") return BoundaryCondition::zero;
  throw std::invalid_argument("unknown boundary condition '" + std::string(s) + "'");
}

SparseMatrix DirichletProblem::box_operator(int i1, int i2) const {
  return kron_sum(factor_ops[0].at(at(i1)), factor_ops[1].at(at(i2)));
}

SparseMatrix odd_pair_aggregation(Index fine) {
  if (fine < 1 || fine % 2 == 0) throw std::invalid_argument("odd_pair_aggregation: odd size required");
  const Index coarse = (fine + 1) / 2;
  const double w = 1.0 / std::sqrt(2.0);
  std::vector<Triplet> e;
  for (Index p = 0; p < coarse; ++p) {
    if (2 * p + 1 < fine) {
      e.push_back({2 * p, p, w});
      e.push_back({2 * p + 1, p, w});
    } else {
      e.push_back({2 * p, p, 1.0});
    }
  }
  return SparseMatrix::from_triplets(fine, coarse, std::move(e));
}

DirichletProblem build_problem(int k, BoundaryCondition bc) {
  if (k < 2 || k > 12) throw std::invalid_argument("build_problem: k must be in [2, 12]");
  DirichletProblem p;
  p.k = k;
  p.bc = bc;
  p.n = (Index{1} << k) - 1;
  const Index n = p.n;

  // Boundary values on the (n+2)² node grid, g[R][C] with R = 0 at the bottom.
  const Index m = n + 2;
  std::vector<double> g(at(m * m), 0.0);
  auto gv = [&](Index r, Index c) -> double& { return g[at(r * m + c)]; };
  if (bc == BoundaryCondition::bc1) {
    for (Index t = 0; t < m; ++t) {
      gv(t, 0) = 1.0;
      gv(0, t) = 1.0;
    }
  } else if (bc == BoundaryCondition::bc2) {
    // Clockwise from the lower-left corner: up, right along the top, down,
    // then left along the bottom.
    Index t = 0;
    auto put = [&](Index r, Index c) { gv(r, c) = (t++ % 2 == 0) ? 1.0 : -1.0; };
    for (Index r = 0; r < m; ++r) put(r, 0);
    for (Index c = 1; c < m; ++c) put(m - 1, c);
    for (Index r = m - 2; r >= 0; --r) put(r, m - 1);
    for (Index c = m - 2; c >= 1; --c) put(0, c);
  }
  p.b.assign(at(n * n), 0.0);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) {
      const Index R = r + 1, C = c + 1;
      p.b[at(r * n + c)] = gv(R - 1, C) + gv(R + 1, C) + gv(R, C - 1) + gv(R, C + 1);
    }
  }

  for (auto d = 0; d < 2; ++d) {
    auto& ops = p.factor_ops[at(d)];
    auto& pro = p.factor_prolong[at(d)];
    ops.assign(at(k + 1), SparseMatrix{});
    pro.assign(at(k), SparseMatrix{});
    ops[at(k)] = tridiag(n);
    for (int i = k - 1; i >= 0; --i) {
      pro[at(i)] = i == k - 1 ? odd_pair_aggregation(n)
                              : scale(pair_aggregation(Index{1} << i), 1.0 / std::sqrt(2.0));
      ops[at(i)] = galerkin(pro[at(i)], ops[at(i + 1)]);
    }
  }
  p.a = p.box_operator(k, k);
  return p;
}

void CycleSpec::validate() const {
  if (gamma != 1 && gamma != 2) throw std::invalid_argument("cycle gamma must be 1 or 2");
  if (pre_smooth < 1 || post_smooth < 1) {
    throw std::invalid_argument("smoothing counts must be at least 1");
  }
}

void gauss_seidel(const CsrMatrix& a, std::span<double> x, std::span<const double> b,
                  int sweeps) {
  if (a.rows != a.cols || at(a.rows) != x.size() || x.size() != b.size()) {
    throw DimensionError("gauss_seidel: dimension mismatch");
  }
  std::vector<double> diag(at(a.rows), 0.0);
  for (Index i = 0; i < a.rows; ++i) {
    for (Index q = a.row_ptr[at(i)]; q < a.row_ptr[at(i) + 1]; ++q) {
      if (a.col_idx[at(q)] == i) diag[at(i)] = a.values[at(q)];
    }
    if (diag[at(i)] == 0.0) {
      throw std::invalid_argument("gauss_seidel: zero diagonal in row " + std::to_string(i));
    }
  }
  for (int s = 0; s < sweeps; ++s) {
    for (Index i = 0; i < a.rows; ++i) {
      double sum = 0.0;
      for (Index q = a.row_ptr[at(i)]; q < a.row_ptr[at(i) + 1]; ++q) {
        const Index j = a.col_idx[at(q)];
        if (j != i) sum += a.values[at(q)] * x[at(j)];
      }
      x[at(i)] = (b[at(i)] - sum) / diag[at(i)];
    }
  }
}

std::vector<double> gauss_seidel(const SparseMatrix& a, std::vector<double> x,
                                 std::span<const double> b, int sweeps) {
  gauss_seidel(to_csr(a), x, b, sweeps);
  return x;
}

DenseSolver::DenseSolver(const SparseMatrix& a) : n_(a.rows()), lu_(a.to_dense()), piv_(at(n_)) {
  if (!a.is_square()) throw DimensionError("DenseSolver: matrix is not square");
  const auto n = at(n_);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t best = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(lu_[r * n + c]) > std::abs(lu_[best * n + c])) best = r;
    }
    if (lu_[best * n + c] == 0.0) throw std::invalid_argument("DenseSolver: singular matrix");
    piv_[c] = static_cast<Index>(best);
    if (best != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_[c * n + j], lu_[best * n + j]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = lu_[r * n + c] / lu_[c * n + c];
      lu_[r * n + c] = f;
      for (std::size_t j = c + 1; j < n; ++j) lu_[r * n + j] -= f * lu_[c * n + j];
    }
  }
}

void DenseSolver::solve(std::span<const double> b, std::span<double> x) const {
  const auto n = at(n_);
  std::vector<double> y(b.begin(), b.end());
  for (std::size_t c = 0; c < n; ++c) std::swap(y[c], y[at(piv_[c])]);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < r; ++j) y[r] -= lu_[r * n + j] * y[j];
  }
  for (std::size_t r = n; r-- > 0;) {
    for (std::size_t j = r + 1; j < n; ++j) y[r] -= lu_[r * n + j] * y[j];
    y[r] /= lu_[r * n + r];
  }
  std::copy(y.begin(), y.end(), x.begin());
}

// ---- Gauss–Seidel -----------------------------------------------------------

GaussSeidelSolver::GaussSeidelSolver(const DirichletProblem& p) : a_(to_csr(p.a)) {}

Index GaussSeidelSolver::step(std::span<double> x, std::span<const double> b) {
  gauss_seidel(a_, x, b, 1);
  return a_.nnz();
}

// ---- classical multigrid ----------------------------------------------------

ClassicalMultigrid::ClassicalMultigrid(const DirichletProblem& p, CycleSpec cycle)
    : spec_(cycle), top_(p.k) {
  spec_.validate();
  levels_.resize(at(top_ + 1));
  for (int i = 1; i <= top_; ++i) {
    auto& lv = levels_[at(i)];
    lv.a = to_csr(p.box_operator(i, i));
    if (i > 1) {
      const auto pr = kron(p.factor_prolong[0][at(i - 1)], p.factor_prolong[1][at(i - 1)]);
      lv.prolong = to_csr(pr);
      lv.restriction = to_csr(transpose(pr));
    }
  }
  coarse_ = DenseSolver(p.box_operator(1, 1));
}

Index ClassicalMultigrid::cycle(int level, std::span<double> x, std::span<const double> b) {
  const auto& lv = levels_[at(level)];
  if (level == 1) {
    coarse_.solve(b, x);
    return lv.a.nnz();
  }
  Index work = 0;
  gauss_seidel(lv.a, x, b, spec_.pre_smooth);
  work += spec_.pre_smooth * lv.a.nnz();
  auto r = zeros(lv.a.rows);
  residual(lv.a, x, b, r);
  auto rc = zeros(lv.restriction.rows);
  spmv(lv.restriction, r, rc);
  auto c = zeros(lv.restriction.rows);
  for (int g = 0; g < spec_.gamma; ++g) work += cycle(level - 1, c, rc);
  auto fine = zeros(lv.a.rows);
  spmv(lv.prolong, c, fine);
  axpy(1.0, fine, x);
  gauss_seidel(lv.a, x, b, spec_.post_smooth);
  work += spec_.post_smooth * lv.a.nnz();
  return work;
}

Index ClassicalMultigrid::census(int level) const {
  const Index nnz = levels_[at(level)].a.nnz();
  if (level == 1) return nnz;
  return (spec_.pre_smooth + spec_.post_smooth) * nnz + spec_.gamma * census(level - 1);
}

Index ClassicalMultigrid::step(std::span<double> x, std::span<const double> b) {
  return cycle(top_, x, b);
}

Index ClassicalMultigrid::step_work() const { return census(top_); }

// ---- recursive skeletal multigrid ---------------------------------------------

SkeletalRecursiveMultigrid::SkeletalRecursiveMultigrid(const DirichletProblem& p,
                                                       CycleSpec cycle, BranchUpdate update)
    : problem_(&p), spec_(cycle), update_(update) {
  spec_.validate();
  for (int i1 = 1; i1 <= p.k; ++i1) {
    for (int i2 = 1; i2 <= p.k; ++i2) {
      nnz_[{i1, i2}] = box_nnz(p.factor_ops[0][at(i1)], p.factor_ops[1][at(i2)]);
    }
  }
}

const SkeletalRecursiveMultigrid::Grid& SkeletalRecursiveMultigrid::grid(int l1, int l2) {
  const auto key = std::pair{l1, l2};
  if (auto it = grids_.find(key); it != grids_.end()) return it->second;
  const auto& p = *problem_;
  Grid g;
  g.a = to_csr(p.box_operator(l1, l2));
  const Index n1 = p.factor_ops[0][at(l1)].rows();
  const Index n2 = p.factor_ops[1][at(l2)].rows();
  if (l1 > 1) {
    const auto pr = kron(p.factor_prolong[0][at(l1 - 1)], SparseMatrix::identity(n2));
    g.down1_p = to_csr(pr);
    g.down1_r = to_csr(transpose(pr));
  }
  if (l2 > 1) {
    const auto pr = kron(SparseMatrix::identity(n1), p.factor_prolong[1][at(l2 - 1)]);
    g.down2_p = to_csr(pr);
    g.down2_r = to_csr(transpose(pr));
  }
  return grids_.emplace(key, std::move(g)).first->second;
}

Index SkeletalRecursiveMultigrid::solve_grid(int l1, int l2, std::span<double> x,
                                             std::span<const double> b) {
  const Grid& g = grid(l1, l2);
  Index work = 0;
  gauss_seidel(g.a, x, b, spec_.pre_smooth);
  work += spec_.pre_smooth * g.a.nnz();

  auto r = zeros(g.a.rows);
  residual(g.a, x, b, r);
  auto correction = zeros(g.a.rows);
  auto branch = [&](const CsrMatrix& restr, const CsrMatrix& prol, int c1, int c2,
                    std::span<const double> res) {
    auto rc = zeros(restr.rows);
    spmv(restr, res, rc);
    auto c = zeros(restr.rows);
    for (int t = 0; t < spec_.gamma; ++t) work += solve_grid(c1, c2, c, rc);
    auto fine = zeros(prol.rows);
    spmv(prol, c, fine);
    return fine;
  };

  if (update_ == BranchUpdate::sequential) {
    if (l1 > 1) {
      axpy(1.0, branch(g.down1_r, g.down1_p, l1 - 1, l2, r), x);
      if (l2 > 1) residual(g.a, x, b, r);
    }
    if (l2 > 1) axpy(1.0, branch(g.down2_r, g.down2_p, l1, l2 - 1, r), x);
  } else {
    if (l1 > 1) axpy(1.0, branch(g.down1_r, g.down1_p, l1 - 1, l2, r), correction);
    if (l2 > 1) axpy(1.0, branch(g.down2_r, g.down2_p, l1, l2 - 1, r), correction);
    axpy(1.0, correction, x);
  }

  gauss_seidel(g.a, x, b, spec_.post_smooth);
  work += spec_.post_smooth * g.a.nnz();
  return work;
}

Index SkeletalRecursiveMultigrid::census(int l1, int l2) const {
  // Memoised: the W-cycle call tree is exponential in l1 + l2.
  std::map<std::pair<int, int>, Index> memo;
  auto rec = [&](auto&& self, int a, int b) -> Index {
    if (auto it = memo.find({a, b}); it != memo.end()) return it->second;
    Index w = (spec_.pre_smooth + spec_.post_smooth) * nnz_.at({a, b});
    if (a > 1) w += spec_.gamma * self(self, a - 1, b);
    if (b > 1) w += spec_.gamma * self(self, a, b - 1);
    memo[{a, b}] = w;
    return w;
  };
  return rec(rec, l1, l2);
}

Index SkeletalRecursiveMultigrid::step(std::span<double> x, std::span<const double> b) {
  return solve_grid(problem_->k, problem_->k, x, b);
}

Index SkeletalRecursiveMultigrid::step_work() const { return census(problem_->k, problem_->k); }

// ---- levelwise skeletal multigrid -------------------------------------------

LevelwiseSkeletalMultigrid::LevelwiseSkeletalMultigrid(const DirichletProblem& p,
                                                       CycleSpec cycle, double correction_weight)
    : k_(p.k), spec_(cycle), weight_(correction_weight) {
  spec_.validate();
  levels_.resize(at(2 * k_ + 1));
  auto n_of = [&](int d, int i) { return p.factor_ops[at(d)][at(i)].rows(); };
  for (int L = 2; L <= 2 * k_; ++L) {
    auto& lv = levels_[at(L)];
    const auto bl = blocks(L);
    std::vector<Index> sizes;
    BlockMap diag;
    for (std::size_t q = 0; q < bl.size(); ++q) {
      const auto [i1, i2] = bl[q];
      sizes.push_back(n_of(0, i1) * n_of(1, i2));
      diag.emplace(std::pair{Index(q), Index(q)}, p.box_operator(i1, i2));
    }
    lv.a_coo = block_assemble(diag, sizes, sizes);
    lv.a = to_csr(lv.a_coo);
    if (L == 2) continue;

    const auto coarse = blocks(L - 1);
    std::vector<Index> coarse_sizes;
    for (const auto& [c1, c2] : coarse) coarse_sizes.push_back(n_of(0, c1) * n_of(1, c2));
    BlockMap transfer;
    for (std::size_t q = 0; q < coarse.size(); ++q) {
      const auto [c1, c2] = coarse[q];
      for (std::size_t r = 0; r < bl.size(); ++r) {
        if (bl[r] == std::pair{c1 + 1, c2}) {
          transfer.emplace(std::pair{Index(r), Index(q)},
                           kron(p.factor_prolong[0][at(c1)], SparseMatrix::identity(n_of(1, c2))));
        } else if (bl[r] == std::pair{c1, c2 + 1}) {
          transfer.emplace(std::pair{Index(r), Index(q)},
                           kron(SparseMatrix::identity(n_of(0, c1)), p.factor_prolong[1][at(c2)]));
        }
      }
    }
    const auto raw = block_assemble(transfer, sizes, coarse_sizes);
    std::vector<double> norm2_col(at(raw.cols()), 0.0);
    for (const auto& t : raw.entries()) norm2_col[at(t.col)] += t.value * t.value;
    for (auto& v : norm2_col) v = v > 0.0 ? 1.0 / std::sqrt(v) : 0.0;
    lv.p_coo = multiply(raw, SparseMatrix::diagonal(norm2_col));
    lv.prolong = to_csr(lv.p_coo);
    lv.restriction = to_csr(transpose(lv.p_coo));
  }
  coarse_ = DenseSolver(levels_[2].a_coo);
}

std::vector<std::pair<int, int>> LevelwiseSkeletalMultigrid::blocks(int level) const {
  std::vector<std::pair<int, int>> out;
  for (int i1 = 1; i1 <= k_; ++i1) {
    const int i2 = level - i1;
    if (i2 >= 1 && i2 <= k_) out.emplace_back(i1, i2);
  }
  return out;
}

const SparseMatrix& LevelwiseSkeletalMultigrid::level_operator(int level) const {
  return levels_.at(at(level)).a_coo;
}

const SparseMatrix& LevelwiseSkeletalMultigrid::level_prolongation(int level) const {
  return levels_.at(at(level)).p_coo;
}

Index LevelwiseSkeletalMultigrid::cycle(int level, std::span<double> x,
                                        std::span<const double> b) {
  const auto& lv = levels_[at(level)];
  if (level == 2) {
    coarse_.solve(b, x);
    return lv.a.nnz();
  }
  Index work = 0;
  gauss_seidel(lv.a, x, b, spec_.pre_smooth);
  work += spec_.pre_smooth * lv.a.nnz();
  auto r = zeros(lv.a.rows);
  residual(lv.a, x, b, r);
  auto rc = zeros(lv.restriction.rows);
  spmv(lv.restriction, r, rc);
  auto c = zeros(lv.restriction.rows);
  for (int g = 0; g < spec_.gamma; ++g) work += cycle(level - 1, c, rc);
  auto fine = zeros(lv.a.rows);
  spmv(lv.prolong, c, fine);
  axpy(weight_, fine, x);
  gauss_seidel(lv.a, x, b, spec_.post_smooth);
  work += spec_.post_smooth * lv.a.nnz();
  return work;
}

Index LevelwiseSkeletalMultigrid::census(int level) const {
  const Index nnz = levels_[at(level)].a.nnz();
  if (level == 2) return nnz;
  return (spec_.pre_smooth + spec_.post_smooth) * nnz + spec_.gamma * census(level - 1);
}

Index LevelwiseSkeletalMultigrid::step(std::span<double> x, std::span<const double> b) {
  return cycle(2 * k_, x, b);
}

Index LevelwiseSkeletalMultigrid::step_work() const { return census(2 * k_); }

// ---- benchmark ---------------------------------------------------------------

void WorkTrace::write_csv(std::ostream& out) const {
  out << "algorithm,cycle,work,residual\n";
  for (const auto& r : rows) {
    out << r.algorithm << ',' << r.step << ',' << format_double(r.work) << ','
        << format_double(r.residual) << '\n';
  }
}

std::string WorkTrace::csv() const {
  std::ostringstream s;
  write_csv(s);
  return s.str();
}

const TraceRow& WorkTrace::final_row(std::string_view algorithm) const {
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (it->algorithm == algorithm) return *it;
  }
  throw std::out_of_range("no trace rows for '" + std::string(algorithm) + "'");
}

namespace {

constexpr std::string_view kAllAlgorithms[] = {
    "gauss_seidel",         "classical_mg_v",       "classical_mg_w",
    "skeletal_recursive_v", "skeletal_recursive_w", "skeletal_levelwise_v",
    "skeletal_levelwise_undamped_v", "skeletal_recursive_additive_v",
};

constexpr std::string_view kDefaultAlgorithms[] = {
    "gauss_seidel", "classical_mg_v", "classical_mg_w", "skeletal_recursive_v",
    "skeletal_levelwise_v",
};

}  // namespace

std::span<const std::string_view> benchmark_algorithms() { return kAllAlgorithms; }

std::span<const std::string_view> default_benchmark_algorithms() { return kDefaultAlgorithms; }

std::unique_ptr<Solver> make_solver(std::string_view algorithm, const DirichletProblem& p,
                                    const BenchOptions& opt) {
  const CycleSpec v{1, opt.pre_smooth, opt.post_smooth};
  const CycleSpec w{2, opt.pre_smooth, opt.post_smooth};
  if (algorithm == "gauss_seidel") return std::make_unique<GaussSeidelSolver>(p);
  if (algorithm == "classical_mg_v") return std::make_unique<ClassicalMultigrid>(p, v);
  if (algorithm == "classical_mg_w") return std::make_unique<ClassicalMultigrid>(p, w);
  if (algorithm == "skeletal_recursive_v") {
    return std::make_unique<SkeletalRecursiveMultigrid>(p, v, BranchUpdate::sequential);
  }
  if (algorithm == "skeletal_recursive_w") {
    return std::make_unique<SkeletalRecursiveMultigrid>(p, w, BranchUpdate::sequential);
  }
  if (algorithm == "skeletal_recursive_additive_v") {
    return std::make_unique<SkeletalRecursiveMultigrid>(p, v, BranchUpdate::additive);
  }
  if (algorithm == "skeletal_levelwise_v") {
    return std::make_unique<LevelwiseSkeletalMultigrid>(p, v);
  }
  if (algorithm == "skeletal_levelwise_undamped_v") {
    return std::make_unique<LevelwiseSkeletalMultigrid>(p, v, 1.0);
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(algorithm) + "'");
}

WorkTrace run_benchmark(const DirichletProblem& p, std::span<const std::string> algorithms,
                        double budget, const BenchOptions& opt) {
  for (const auto& name : algorithms) {
    if (std::find(std::begin(kAllAlgorithms), std::end(kAllAlgorithms), name) ==
        std::end(kAllAlgorithms)) {
      throw std::invalid_argument("unknown algorithm '" + name + "'");
    }
  }
  const auto a = to_csr(p.a);
  const double bnorm = norm2(p.b);
  WorkTrace trace;
  for (const auto& name : algorithms) {
    auto solver = make_solver(name, p, opt);
    std::vector<double> x(p.b.size(), 0.0);
    std::vector<double> r(p.b.size(), 0.0);
    residual(a, x, p.b, r);
    trace.rows.push_back({name, 0, 0.0, norm2(r)});
    if (trace.rows.back().residual <= opt.rel_tolerance * bnorm) continue;

    const Index per_step = solver->step_work();
    Index work = 0;
    for (Index step = 1;; ++step) {
      if (static_cast<double>(work + per_step) > budget) break;
      const Index spent = solver->step(x, p.b);
      if (spent != per_step) throw std::logic_error("work census disagrees with charged work");
      work += spent;
      residual(a, x, p.b, r);
      const double res = norm2(r);
      if (!std::isfinite(res)) break;
      trace.rows.push_back({name, step, static_cast<double>(work), res});
      if (res <= opt.rel_tolerance * bnorm) break;
    }
  }
  return trace;
}

}  // namespace skel
