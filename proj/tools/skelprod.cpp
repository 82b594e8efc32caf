// skelprod: generate lineages, build skeletal products, validate and export
// them, and run the multigrid benchmark.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 validation or oracle failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "skel/graph.hpp"
#include "skel/lineage.hpp"
#include "skel/manifest.hpp"
#include "skel/matrix_market.hpp"
#include "skel/multigrid.hpp"
#include "skel/skeletal.hpp"

namespace fs = std::filesystem;
using namespace skel;

namespace {

constexpr int kUsage = 1;
constexpr int kInvalid = 2;

// Raised for bad input data or a failed check; maps to exit code 2.
struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void print_issues(std::ostream& out, const ValidationReport& rep) {
  for (const auto& d : rep.issues) {
    out << "  " << kind_name(d.kind) << " level " << d.level << ": " << d.message;
    if (d.deviation != 0.0) out << " (deviation " << format_double(d.deviation) << ")";
    out << "\n";
  }
}

GradedGraph load_checked(const fs::path& dir) {
  GradedGraph gg;
  try {
    gg = read_lineage(dir);
  } catch (const std::exception& e) {
    throw CheckFailure(dir.string() + ": " + e.what());
  }
  const auto rep = validate(gg);
  if (!rep.ok()) {
    std::ostringstream msg;
    msg << dir.string() << " is not a valid graded graph:\n";
    print_issues(msg, rep);
    throw CheckFailure(msg.str());
  }
  return gg;
}

std::string join(const std::vector<Index>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

// Writes to path, or to stdout when path is empty or "-".
template <class F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write(out);
  if (!out) throw std::runtime_error("failed writing " + path);
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  std::string generator;
  Index levels = 3;
  std::string out;
  bool no_root_loop = false;
};

int cmd_gen(const GenArgs& a) {
  const auto gg = gen_lineage(a.generator, a.levels, !a.no_root_loop);
  write_lineage(a.out, gg);
  std::cout << gg.name << ": level sizes " << join(gg.level_sizes()) << " -> " << a.out << "\n";
  return 0;
}

// ---- product ----------------------------------------------------------------

struct ProductArgs {
  std::string kind;
  std::vector<std::string> inputs;
  std::string out;
  std::optional<Index> levels;
  bool weighted = false;
  bool oracle_check = false;
  std::vector<std::string> rho{"1", "1"};
  std::string op = "cross";
};

void oracle_compare(const GradedGraph& product, const GradedGraph& a, const GradedGraph& b,
                    ProductKind kind) {
  const auto oracle = appendix_oracle(a, b, kind, product.top_level());
  if (oracle.levels != product.levels || oracle.inter != product.inter) {
    Index bad = -1;
    for (Index l = 0; l < product.num_levels() && bad < 0; ++l) {
      const auto i = static_cast<std::size_t>(l);
      if (i >= oracle.levels.size() || oracle.levels[i] != product.levels[i]) bad = l;
      if (i < product.inter.size() &&
          (i >= oracle.inter.size() || oracle.inter[i] != product.inter[i])) {
        bad = l;
      }
    }
    throw CheckFailure("oracle mismatch at level " + std::to_string(bad));
  }
}

int cmd_product(const ProductArgs& a) {
  std::vector<GradedGraph> f;
  for (const auto& in : a.inputs) f.push_back(load_checked(in));

  ProductOptions opt;
  opt.max_level = a.levels;
  opt.prolong_weights = a.weighted;
  if (a.weighted) {
    for (const auto& g : f) {
      if (g.prolong.empty()) throw CheckFailure(g.name + " carries no prolongation maps");
    }
  }

  const bool nway = a.kind == "nway-hat" || a.kind == "nway-tilde";
  if (!nway && f.size() != 2) {
    throw CLI::ValidationError("product " + a.kind + " takes exactly two inputs");
  }
  if (nway && f.size() < 2) throw CLI::ValidationError("n-way products need at least two inputs");
  if (a.oracle_check && a.weighted) {
    throw CLI::ValidationError("--oracle-check compares 0/1 transfers; drop --weighted");
  }

  GradedGraph result;
  std::optional<ProductKind> checkable;
  if (a.kind == "box" || a.kind == "cross" || a.kind == "strong") {
    const auto kind = parse_kind(a.kind);
    result = skel_product(f[0], f[1], kind, opt);
    checkable = kind;
  } else if (nway) {
    const auto mode = a.kind == "nway-hat" ? NwayMode::hat : NwayMode::tilde;
    result = skel_nway(f, parse_kind(a.op), mode, opt);
    if (f.size() == 2) checkable = parse_kind(a.op);
  } else if (a.kind == "dilated") {
    if (a.rho.size() != 2) throw CLI::ValidationError("--rho takes two values");
    const auto r1 = parse_rational(a.rho[0]);
    const auto r2 = parse_rational(a.rho[1]);
    result = skel_dilated(f[0], f[1], parse_kind(a.op), r1, r2, opt);
    if (r1.num == r1.den && r2.num == r2.den) checkable = parse_kind(a.op);
  } else {
    throw CLI::ValidationError("unknown product kind '" + a.kind + "'");
  }

  if (a.oracle_check) {
    if (!checkable) {
      throw CLI::ValidationError("--oracle-check needs a binary product with unit dilation");
    }
    oracle_compare(result, f[0], f[1], *checkable);
    std::cout << "oracle check passed\n";
  }
  write_lineage(a.out, result);
  std::cout << result.name << ": level sizes " << join(result.level_sizes()) << " -> " << a.out
            << "\n";
  return 0;
}

// ---- thicken / validate / export ------------------------------------------------

int cmd_thicken(const std::string& in, const std::string& out) {
  const auto result = thicken(load_checked(in));
  write_lineage(out, result);
  std::cout << result.name << ": level sizes " << join(result.level_sizes()) << " -> " << out
            << "\n";
  return 0;
}

int cmd_validate(const std::string& in) {
  GradedGraph gg;
  try {
    gg = read_lineage(in);
  } catch (const std::exception& e) {
    throw CheckFailure(in + ": " + e.what());
  }
  const auto rep = validate(gg);
  std::cout << "level,vertices,edges,inter_nnz\n";
  for (const auto& c : rep.census) {
    std::cout << c.level << "," << c.vertices << "," << c.edges << "," << c.inter_nnz << "\n";
  }
  if (!rep.ok()) {
    std::cerr << rep.issues.size() << " issue(s):\n";
    print_issues(std::cerr, rep);
    return kInvalid;
  }
  std::cout << "ok\n";
  return 0;
}

struct ExportArgs {
  std::string input;
  std::string format = "mtx";
  std::optional<Index> level;
  std::string out;
};

int cmd_export(const ExportArgs& a) {
  const auto gg = load_checked(a.input);
  if (a.format == "json") {
    nlohmann::json j;
    j["name"] = gg.name;
    j["numLevels"] = gg.num_levels();
    j["levelSizes"] = gg.level_sizes();
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& g : gg.levels) edges.push_back(g.edge_count());
    j["levelEdges"] = edges;
    nlohmann::json inter = nlohmann::json::array();
    for (const auto& s : gg.inter) inter.push_back(s.nnz());
    j["interNnz"] = inter;
    j["metadata"] = gg.metadata;
    emit(a.out, [&](std::ostream& o) { o << j.dump(2) << "\n"; });
    return 0;
  }

  Graph g;
  if (a.level) {
    if (*a.level < 0 || *a.level > gg.top_level()) {
      throw CLI::ValidationError("--level outside 0.." + std::to_string(gg.top_level()));
    }
    g = gg.levels[static_cast<std::size_t>(*a.level)];
  } else {
    g = assemble_flat(gg);
  }
  const std::string title = a.level ? gg.name + "_level" + std::to_string(*a.level) : gg.name;
  if (a.format == "mtx") {
    emit(a.out, [&](std::ostream& o) { write_matrix_market(o, g.adj(), true); });
  } else if (a.format == "dot") {
    emit(a.out, [&](std::ostream& o) { write_dot(o, g, title); });
  } else if (a.format == "edgelist") {
    emit(a.out, [&](std::ostream& o) { write_edge_list(o, g); });
  } else {
    throw CLI::ValidationError("unknown format '" + a.format + "'");
  }
  return 0;
}

// ---- cnn-structure ------------------------------------------------------------

int cmd_cnn(Index grid_levels, Index feature_levels, const std::string& out) {
  const auto grid = gen_grid2d_lineage(grid_levels);
  const auto feat = gen_complete_lineage(feature_levels);
  ProductOptions opt;
  opt.max_level = std::min(grid_levels, feature_levels);
  auto result = skel_strong(grid, feat, opt);
  result.name = "cnn_" + std::to_string(grid_levels) + "_" + std::to_string(feature_levels);
  write_lineage(out, result);
  const auto dot = fs::path(out) / "top_level.dot";
  emit(dot.string(), [&](std::ostream& o) {
    write_dot(o, result.levels.back(), result.name + "_top");
  });
  std::cout << result.name << ": level sizes " << join(result.level_sizes()) << " -> " << out
            << "\n";
  return 0;
}

// ---- bench ----------------------------------------------------------------------

struct BenchArgs {
  int k = 5;
  std::string bc = "1";
  double budget = 1e6;
  std::vector<std::string> algorithms;
  std::string out;
  bool seedless = false;
  int pre = 1;
  int post = 1;
  double tolerance = 1e-10;
  std::string export_problem;
};

int cmd_bench(const BenchArgs& a) {
  if (a.budget < 0) throw CLI::ValidationError("--budget must be nonnegative");
  const auto problem = build_problem(a.k, parse_bc(a.bc));
  if (!a.export_problem.empty()) {
    fs::create_directories(a.export_problem);
    write_matrix_market(fs::path(a.export_problem) / "A.mtx", problem.a, true);
    emit((fs::path(a.export_problem) / "b.txt").string(), [&](std::ostream& o) {
      for (double v : problem.b) o << format_double(v) << "\n";
    });
  }
  std::vector<std::string> names = a.algorithms;
  if (names.empty()) {
    for (auto n : default_benchmark_algorithms()) names.emplace_back(n);
  }
  BenchOptions opt;
  opt.pre_smooth = a.pre;
  opt.post_smooth = a.post;
  opt.rel_tolerance = a.tolerance;
  const auto trace = run_benchmark(problem, names, a.budget, opt);
  emit(a.out, [&](std::ostream& o) { trace.write_csv(o); });
  if (!a.out.empty() && a.out != "-") {
    for (const auto& n : names) {
      const auto& r = trace.final_row(n);
      std::cout << n << ": cycles " << r.step << ", work " << format_double(r.work)
                << ", residual " << format_double(r.residual) << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph lineages, skeletal products and skeletal multigrid"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Write a generated lineage to a manifest directory");
  g->add_option("generator", gen.generator, "path | complete | grid2d | nhat")
      ->required()
      ->check(CLI::IsMember({"path", "complete", "grid2d", "nhat"}));
  g->add_option("--levels,-L", gen.levels, "Top level index")->check(CLI::NonNegativeNumber);
  g->add_option("--out,-o", gen.out, "Output directory")->required();
  g->add_flag("--no-root-loop", gen.no_root_loop, "Leave the level-0 vertex without a self-loop");

  ProductArgs prod;
  auto* p = app.add_subcommand("product", "Skeletal product of lineage manifests");
  p->add_option("kind", prod.kind, "box | cross | strong | nway-hat | nway-tilde | dilated")
      ->required()
      ->check(CLI::IsMember({"box", "cross", "strong", "nway-hat", "nway-tilde", "dilated"}));
  p->add_option("inputs", prod.inputs, "Input manifest directories")->required();
  p->add_option("--out,-o", prod.out, "Output directory")->required();
  p->add_option("--levels,-L", prod.levels, "Highest product level to emit")
      ->check(CLI::NonNegativeNumber);
  p->add_flag("--weighted", prod.weighted, "Use the factors' P weights in inter-level maps");
  p->add_flag("--oracle-check", prod.oracle_check,
              "Rebuild with the block-matrix construction and fail on mismatch");
  p->add_option("--rho", prod.rho, "Dilation rates for dilated products, e.g. --rho 1 2")
      ->expected(2);
  p->add_option("--op", prod.op, "Underlying product for nway-* and dilated kinds")
      ->check(CLI::IsMember({"box", "cross", "strong"}));

  std::string th_in, th_out;
  auto* t = app.add_subcommand("thicken", "Thickening of a lineage manifest");
  t->add_option("input", th_in, "Input manifest directory")->required();
  t->add_option("--out,-o", th_out, "Output directory")->required();

  std::string val_in;
  auto* v = app.add_subcommand("validate", "Check a manifest and print its level census");
  v->add_option("input", val_in, "Manifest directory")->required();

  ExportArgs ex;
  auto* e = app.add_subcommand("export", "Export a level or the flat assembly");
  e->add_option("input", ex.input, "Manifest directory")->required();
  e->add_option("--format,-f", ex.format, "mtx | dot | edgelist | json")
      ->check(CLI::IsMember({"mtx", "dot", "edgelist", "json"}));
  e->add_option("--level,-l", ex.level, "Level to export (default: flat assembly of all levels)");
  e->add_option("--out,-o", ex.out, "Output file (default: stdout)");

  Index cnn_grid = 2, cnn_feat = 2;
  std::string cnn_out;
  auto* c = app.add_subcommand("cnn-structure",
                               "Grid times complete strong skeletal product plus top-level DOT");
  c->add_option("--grid-levels", cnn_grid, "Top level of the grid lineage")
      ->check(CLI::NonNegativeNumber);
  c->add_option("--feature-levels", cnn_feat, "Top level of the complete-graph lineage")
      ->check(CLI::NonNegativeNumber);
  c->add_option("--out,-o", cnn_out, "Output directory")->required();

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Work-versus-residual multigrid benchmark as CSV");
  b->add_option("--k", bench.k, "Grid has (2^k - 1)^2 interior unknowns")->check(CLI::Range(2, 12));
  b->add_option("--bc", bench.bc, "Boundary condition: 0 | 1 | 2")
      ->check(CLI::IsMember({"0", "1", "2", "zero", "bc1", "bc2"}));
  b->add_option("--budget", bench.budget, "Work budget in nonzero units");
  b->add_option("--algorithms", bench.algorithms, "Comma-separated algorithm names")
      ->delimiter(',');
  b->add_option("--out,-o", bench.out, "CSV file (default: stdout)");
  b->add_flag("--seedless", bench.seedless, "Accepted for scripts; the solvers use no RNG");
  b->add_option("--pre", bench.pre, "Pre-smoothing sweeps")->check(CLI::PositiveNumber);
  b->add_option("--post", bench.post, "Post-smoothing sweeps")->check(CLI::PositiveNumber);
  b->add_option("--tolerance", bench.tolerance, "Stop at residual <= tolerance * |b|");
  b->add_option("--export-problem", bench.export_problem,
                "Also write A.mtx and b.txt to this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*p) return cmd_product(prod);
    if (*t) return cmd_thicken(th_in, th_out);
    if (*v) return cmd_validate(val_in);
    if (*e) return cmd_export(ex);
    if (*c) return cmd_cnn(cnn_grid, cnn_feat, cnn_out);
    if (*b) {
      for (const auto& name : bench.algorithms) {
        bool known = false;
        for (auto n : benchmark_algorithms()) known = known || n == name;
        if (!known) throw CLI::ValidationError("unknown algorithm '" + name + "'");
      }
      return cmd_bench(bench);
    }
  } catch (const CLI::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsage;
  } catch (const CheckFailure& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kInvalid;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
