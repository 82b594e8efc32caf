#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "skel/manifest.hpp"
#include "skel/matrix_market.hpp"
#include "skel/multigrid.hpp"
#include "skel/skeletal.hpp"

using namespace skel;
namespace fs = std::filesystem;

namespace {

const fs::path kScratch = SKELPROD_SCRATCH;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::string& args) {
  fs::create_directories(kScratch);
  const auto out = kScratch / "stdout.txt", err = kScratch / "stderr.txt";
  const std::string cmd = std::string("\"") + SKELPROD_BIN + "\" " + args + " >\"" + out.string() +
                          "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return {WEXITSTATUS(status), slurp(out), slurp(err)};
}

std::string dir(const std::string& name) {
  const auto p = kScratch / name;
  fs::remove_all(p);
  return "\"" + p.string() + "\"";
}

fs::path path(const std::string& name) { return kScratch / name; }

std::map<std::string, std::string> snapshot(const fs::path& d) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(d)) files[e.path().filename().string()] = slurp(e.path());
  return files;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("gen writes manifests") {
  REQUIRE(run("gen path --levels 3 -o " + dir("path3")).code == 0);
  const auto p = read_lineage(path("path3"));
  CHECK(p.level_sizes() == std::vector<Index>{1, 2, 4, 8});
  CHECK(same_structure(p, gen_path_lineage(3)));

  REQUIRE(run("gen nhat --levels 4 -o " + dir("nhat4")).code == 0);
  CHECK(read_lineage(path("nhat4")).level_sizes() == std::vector<Index>(5, 1));

  REQUIRE(run("gen grid2d --levels 2 -o " + dir("grid2")).code == 0);
  CHECK(read_matrix_market(path("grid2") / "level_2.mtx").rows() == 16);

  REQUIRE(run("gen path --levels 2 --no-root-loop -o " + dir("bare")).code == 0);
  CHECK(read_lineage(path("bare")).levels[0].adj().nnz() == 0);
}

TEST_CASE("gen, read and rewrite are byte-identical") {
  for (const char* g : {"path", "complete", "grid2d", "nhat"}) {
    const std::string name = std::string("rt_") + g;
    REQUIRE(run(std::string("gen ") + g + " -L 3 -o " + dir(name)).code == 0);
    const auto before = snapshot(path(name));
    write_lineage(path(name), read_lineage(path(name)));
    CHECK_MESSAGE(snapshot(path(name)) == before, g);
  }
}

TEST_CASE("usage errors exit 1") {
  CHECK(run("").code == 1);
  CHECK(run("gen butterfly -L 2 -o " + dir("bad")).code == 1);
  CHECK(run("gen path -L 2").code == 1);
  CHECK(run("gen path -L 2 --frobnicate -o " + dir("bad")).code == 1);
  CHECK(run("bench --k 3 --algorithms jacobi").code == 1);
  CHECK(run("bench --k 1").code == 1);
  CHECK(run("bench --k 3 --pre 0").code == 1);
  CHECK(run("product sideways a b -o " + dir("bad")).code == 1);
  CHECK(run("export " + dir("missing") + " --format xml").code == 1);
  CHECK(run("export " + dir("missing") + " --format mtx").code == 2);
  CHECK(run("gen path -L 2 -o /proc/forbidden/x").code == 1);
}

TEST_CASE("products and the oracle check") {
  REQUIRE(run("gen path -L 3 -o " + dir("a")).code == 0);
  REQUIRE(run("gen path -L 3 -o " + dir("b")).code == 0);
  const std::string ab = "\"" + path("a").string() + "\" \"" + path("b").string() + "\"";
  for (const char* kind : {"box", "cross", "strong"}) {
    const auto r = run(std::string("product ") + kind + " " + ab + " --oracle-check -o " + dir("prod"));
    CHECK_MESSAGE(r.code == 0, kind, r.err);
    CHECK(r.out.find("oracle check passed") != std::string::npos);
    const auto got = read_lineage(path("prod"));
    const auto pa = gen_path_lineage(3);
    const auto expect = skel_product(pa, pa, parse_kind(kind));
    CHECK(same_structure(got, expect));
  }
  // Sizes: convolution of (1,2,4,8) with itself.
  CHECK(read_lineage(path("prod")).level_sizes() == std::vector<Index>{1, 4, 12, 32});

  REQUIRE(run("product dilated " + ab + " --rho 1 2 -o " + dir("dil")).code == 0);
  const auto dil = read_lineage(path("dil"));
  CHECK(dil.metadata.at("rho") == nlohmann::json::array({"1", "2"}));
  const auto expect_dil = skel_dilated(gen_path_lineage(3), gen_path_lineage(3), ProductKind::cross,
                                       Rational{1, 1}, Rational{2, 1});
  CHECK(same_structure(dil, expect_dil));
  CHECK(dil.metadata == expect_dil.metadata);

  REQUIRE(run("product nway-hat " + ab + " \"" + path("a").string() + "\" -o " + dir("nw")).code == 0);
  CHECK(read_lineage(path("nw")).level_sizes()[1] == 6);

  // A corrupted input is a validation failure.
  fs::remove(path("b") / "level_2.mtx");
  CHECK(run("product box " + ab + " -o " + dir("x")).code == 2);
}

TEST_CASE("thicken nhat") {
  REQUIRE(run("gen nhat -L 4 -o " + dir("nh")).code == 0);
  REQUIRE(run("thicken \"" + path("nh").string() + "\" -o " + dir("nht")).code == 0);
  const auto t = read_lineage(path("nht"));
  CHECK(t.level_sizes() == std::vector<Index>{1, 2, 3, 4, 5});
  CHECK(same_structure(t, thicken(gen_nhat_lineage(4))));
}

TEST_CASE("validate prints a census") {
  REQUIRE(run("gen path -L 2 -o " + dir("v")).code == 0);
  const auto r = run("validate \"" + path("v").string() + "\"");
  CHECK(r.code == 0);
  CHECK(r.out == "level,vertices,edges,inter_nnz\n0,1,1,2\n1,2,1,4\n2,4,3,0\nok\n");

  // Break the prolongation map's orthonormality.
  auto gg = gen_path_lineage(2);
  gg.prolong[1] = scale(gg.prolong[1], 3.0);
  write_lineage(path("v"), gg);
  const auto bad = run("validate \"" + path("v").string() + "\"");
  CHECK(bad.code == 2);
  CHECK_FALSE(bad.err.empty());
}

TEST_CASE("export formats") {
  REQUIRE(run("gen path -L 2 -o " + dir("e")).code == 0);
  const std::string in = "\"" + path("e").string() + "\"";
  auto r = run("export " + in + " --format edgelist --level 2");
  CHECK(r.code == 0);
  CHECK(r.out == "0 1\n1 2\n2 3\n");
  r = run("export " + in + " --format dot --level 1");
  CHECK(r.out.find("0 -- 1;") != std::string::npos);
  r = run("export " + in + " --format mtx -o \"" + path("flat.mtx").string() + "\"");
  CHECK(r.code == 0);
  CHECK(read_matrix_market(path("flat.mtx")) == assemble_flat(gen_path_lineage(2)).adj());
  r = run("export " + in + " --format json");
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("levelSizes") == nlohmann::json::array({1, 2, 4}));
  CHECK(run("export " + in + " --level 9").code == 1);
}

TEST_CASE("cnn structure") {
  REQUIRE(run("cnn-structure --grid-levels 2 --feature-levels 2 -o " + dir("cnn")).code == 0);
  const auto gg = read_lineage(path("cnn"));
  const std::vector<std::vector<Index>> factors{{1, 4, 16}, {1, 2, 4}};
  for (Index l = 0; l <= 2; ++l) CHECK(gg.level_sizes()[l] == oracle::convolution_size(factors, l));
  CHECK(gg.level_sizes() == std::vector<Index>{1, 6, 28});
  // Count vertex statements in the DOT file.
  std::istringstream dot(slurp(path("cnn") / "top_level.dot"));
  std::string line;
  Index vertices = 0;
  while (std::getline(dot, line)) {
    if (line.find("--") == std::string::npos && line.find(';') != std::string::npos) ++vertices;
  }
  CHECK(vertices == gg.level_sizes().back());

  REQUIRE(run("cnn-structure --grid-levels 0 --feature-levels 0 -o " + dir("cnn0")).code == 0);
  CHECK(read_lineage(path("cnn0")).level_sizes() == std::vector<Index>{1});
}

TEST_CASE("bench") {
  const auto a = run("bench --k 5 --bc 1 --budget 1e6 --seedless");
  REQUIRE(a.code == 0);
  const auto b = run("bench --k 5 --bc 1 --budget 1e6 --seedless");
  CHECK(a.out == b.out);

  const auto rows = csv_rows(a.out);
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == std::vector<std::string>{"algorithm", "cycle", "work", "residual"});
  std::map<std::string, double> final_res;
  for (std::size_t i = 1; i < rows.size(); ++i) final_res[rows[i][0]] = std::stod(rows[i][3]);
  CHECK(final_res.size() == default_benchmark_algorithms().size());
  for (const auto& [name, res] : final_res) {
    if (name != "skeletal_recursive_v") CHECK_MESSAGE(final_res["skeletal_recursive_v"] < res, name);
  }

  const auto z = run("bench --k 3 --bc 2 --budget 0");
  REQUIRE(z.code == 0);
  const auto zr = csv_rows(z.out);
  CHECK(zr.size() == default_benchmark_algorithms().size() + 1);
  for (std::size_t i = 1; i < zr.size(); ++i) CHECK(zr[i][1] == "0");

  const auto f = run("bench --k 3 --budget 1e4 --algorithms gauss_seidel,classical_mg_v -o \"" +
                     path("b.csv").string() + "\" --export-problem " + dir("prob"));
  REQUIRE(f.code == 0);
  CHECK(f.out.find("gauss_seidel: cycles") != std::string::npos);
  const auto p = build_problem(3, BoundaryCondition::bc1);
  CHECK(read_matrix_market(path("prob") / "A.mtx") == p.a);
  CHECK(csv_rows(slurp(path("b.csv")))[1][0] == "gauss_seidel");
}

TEST_SUITE_END();
