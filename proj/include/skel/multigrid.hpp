#pragma once

// Dirichlet problems on the unit square, Gauss–Seidel smoothing, classical
// geometric multigrid and the two skeletal variants (recursive semicoarsening
// and levelwise), all charged nnz(smoothing matrix) work units per sweep.
// Transfers, residuals and the coarsest direct solve's setup are free; the
// coarsest solve itself is charged nnz of its matrix.

#include <array>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "skel/kernels.hpp"
#include "skel/sparse.hpp"

namespace skel {

enum class BoundaryCondition { zero, bc1, bc2 };

std::string_view bc_name(BoundaryCondition bc) noexcept;
/// "0" | "1" | "2" | "bc1" | "bc2" | "zero".
BoundaryCondition parse_bc(std::string_view s);

/// Interior of a (2^k+1)² grid, unknown (row, col) stored at row·n + col with
/// row 0 at the bottom. Dimension 1 is the row index (outer Kronecker factor).
struct DirichletProblem {
  int k = 0;
  Index n = 0;
  BoundaryCondition bc = BoundaryCondition::zero;
  /// 5-point operator, diagonal 4 and off-diagonals -1.
  SparseMatrix a;
  std::vector<double> b;
  /// factor_ops[d][i] for i = 0..k: order 2^k − 1 at i = k and 2^i below.
  std::array<std::vector<SparseMatrix>, 2> factor_ops;
  /// factor_prolong[d][i] maps level i to level i+1 (|V_{i+1}| x |V_i|).
  std::array<std::vector<SparseMatrix>, 2> factor_prolong;

  /// A^{[1]}_{i1} ⊗ I + I ⊗ A^{[2]}_{i2}.
  SparseMatrix box_operator(int i1, int i2) const;
};

/// Pair aggregation for an odd-sized fine level: columns p take rows 2p and
/// 2p+1 with weight 1/√2, and the last column keeps its single row at weight 1.
SparseMatrix odd_pair_aggregation(Index fine);

/// Requires 2 ≤ k ≤ 12.
DirichletProblem build_problem(int k, BoundaryCondition bc);

struct CycleSpec {
  int gamma = 1;
  int pre_smooth = 1;
  int post_smooth = 1;

  void validate() const;
};

/// Forward lexicographic sweeps in place. Throws on a zero diagonal.
void gauss_seidel(const CsrMatrix& a, std::span<double> x, std::span<const double> b,
                  int sweeps);
std::vector<double> gauss_seidel(const SparseMatrix& a, std::vector<double> x,
                                 std::span<const double> b, int sweeps);

/// Dense LU with partial pivoting for the coarsest grids.
class DenseSolver {
 public:
  DenseSolver() = default;
  explicit DenseSolver(const SparseMatrix& a);
  void solve(std::span<const double> b, std::span<double> x) const;

 private:
  Index n_ = 0;
  std::vector<double> lu_;
  std::vector<Index> piv_;
};

/// A multigrid-type method applied to the finest system A x = b.
class Solver {
 public:
  virtual ~Solver() = default;
  /// One iteration in place; returns the work units it charged.
  virtual Index step(std::span<double> x, std::span<const double> b) = 0;
  /// Work of one step, known without running it.
  virtual Index step_work() const = 0;
};

class GaussSeidelSolver final : public Solver {
 public:
  explicit GaussSeidelSolver(const DirichletProblem& p);
  Index step(std::span<double> x, std::span<const double> b) override;
  Index step_work() const override { return a_.nnz(); }

 private:
  CsrMatrix a_;
};

/// Coarsens both dimensions at once with P = P^{[1]} ⊗ P^{[2]} down to the
/// 2x2 grid, which is solved directly.
class ClassicalMultigrid final : public Solver {
 public:
  ClassicalMultigrid(const DirichletProblem& p, CycleSpec cycle);
  Index step(std::span<double> x, std::span<const double> b) override;
  Index step_work() const override;

 private:
  struct Level {
    CsrMatrix a;
    CsrMatrix prolong;      // from level-1 to this level
    CsrMatrix restriction;  // transpose of prolong
  };
  Index cycle(int level, std::span<double> x, std::span<const double> b);
  Index census(int level) const;

  CycleSpec spec_;
  int top_ = 0;
  std::vector<Level> levels_;  // index = 1D level number
  DenseSolver coarse_;
};

/// How the two semicoarsened corrections are combined.
enum class BranchUpdate {
  /// Apply the dimension-1 correction, recompute the residual, then run the
  /// dimension-2 branch on it.
  sequential,
  /// Sum both corrections computed from the same residual and add once.
  additive,
};

/// Recursive semicoarsening: from grid (l1, l2) recurse to (l1-1, l2) and
/// (l1, l2-1) with zero initial guess, γ times each; grid (1, 1) only smooths.
class SkeletalRecursiveMultigrid final : public Solver {
 public:
  SkeletalRecursiveMultigrid(const DirichletProblem& p, CycleSpec cycle,
                             BranchUpdate update = BranchUpdate::sequential);
  Index step(std::span<double> x, std::span<const double> b) override;
  Index step_work() const override;
  /// One call on grid (l1, l2) with the given iterate and right-hand side.
  Index solve_grid(int l1, int l2, std::span<double> x, std::span<const double> b);

 private:
  struct Grid {
    CsrMatrix a;
    CsrMatrix down1_p, down1_r;  // (P ⊗ I) and its transpose, to (l1-1, l2)
    CsrMatrix down2_p, down2_r;  // (I ⊗ P) and its transpose, to (l1, l2-1)
  };
  const Grid& grid(int l1, int l2);
  Index census(int l1, int l2) const;

  const DirichletProblem* problem_;
  CycleSpec spec_;
  BranchUpdate update_;
  std::map<std::pair<int, int>, Grid> grids_;
  std::map<std::pair<int, int>, Index> nnz_;
};

/// Classical cycle over the skeletal-box hierarchy: level L is the direct sum
/// of the grids (i1, i2) with i1 + i2 = L and 1 ≤ i1, i2 ≤ k, blocks ordered
/// by i1. Transfers place P^{[1]} ⊗ I and I ⊗ P^{[2]} blocks and normalise
/// every coarse column; coarse operators are the rediscretised grids, not
/// Galerkin products.
class LevelwiseSkeletalMultigrid final : public Solver {
 public:
  /// correction_weight scales every prolongated coarse correction. The
  /// coarse level drops the coupling between blocks (i1-1, i2) and
  /// (i1, i2-1), so both correct the same smooth error; at weight 1 their
  /// sum overshoots about twofold and the cycle diverges. The default
  /// averages them.
  LevelwiseSkeletalMultigrid(const DirichletProblem& p, CycleSpec cycle,
                             double correction_weight = 0.5);
  Index step(std::span<double> x, std::span<const double> b) override;
  Index step_work() const override;

  /// Grid pairs (i1, i2) of hierarchy level L in block order.
  std::vector<std::pair<int, int>> blocks(int level) const;
  const SparseMatrix& level_operator(int level) const;
  const SparseMatrix& level_prolongation(int level) const;
  int top_level() const noexcept { return 2 * k_; }

 private:
  struct Level {
    SparseMatrix a_coo, p_coo;
    CsrMatrix a, prolong, restriction;
  };
  Index cycle(int level, std::span<double> x, std::span<const double> b);
  Index census(int level) const;

  int k_ = 0;
  CycleSpec spec_;
  double weight_ = 0.5;
  std::vector<Level> levels_;  // index = L, used for 2..2k
  DenseSolver coarse_;
};

struct TraceRow {
  std::string algorithm;
  Index step = 0;
  double work = 0.0;
  double residual = 0.0;
};

struct WorkTrace {
  std::vector<TraceRow> rows;

  void write_csv(std::ostream& out) const;
  std::string csv() const;
  /// Last row of the given algorithm; throws if absent.
  const TraceRow& final_row(std::string_view algorithm) const;
};

struct BenchOptions {
  int pre_smooth = 1;
  int post_smooth = 1;
  /// Stop once ‖r‖ ≤ rel_tolerance · ‖b‖.
  double rel_tolerance = 1e-10;
};

/// Known names: gauss_seidel, classical_mg_v, classical_mg_w,
/// skeletal_recursive_v, skeletal_recursive_w, skeletal_levelwise_v,
/// skeletal_levelwise_undamped_v, skeletal_recursive_additive_v.
std::span<const std::string_view> benchmark_algorithms();
std::span<const std::string_view> default_benchmark_algorithms();
std::unique_ptr<Solver> make_solver(std::string_view algorithm, const DirichletProblem& p,
                                    const BenchOptions& opt = {});

/// Runs each algorithm from x = 0, recording the initial residual at work 0
/// and one row per step; a step is skipped if it would exceed the budget.
WorkTrace run_benchmark(const DirichletProblem& p, std::span<const std::string> algorithms,
                        double budget, const BenchOptions& opt = {});

}  // namespace skel
