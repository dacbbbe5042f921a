// Runs the built executable as a user would.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Result {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("meso_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Result run(const std::string& args) {
  const auto out = scratch() / "stdout", err = scratch() / "stderr";
  const std::string cmd = std::string("\"") + MESO_CLI + "\" " + args + " >" + out.string() + " 2>" + err.string();
  const int raw = std::system(cmd.c_str());
  Result r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string data(const std::string& name) { return std::string(MESO_DATA_DIR) + "/" + name; }

std::string path(const std::string& name) { return (scratch() / name).string(); }

}  // namespace

TEST_CASE("metrics") {
  const auto r = run("metrics " + data("table2.json"));
  CHECK(r.status == 0);
  CHECK(r.out.rfind("epsilon=0.0343 d=", 0) == 0);
  CHECK(r.out.find(" N=27") != std::string::npos);
}

TEST_CASE("generate") {
  const auto r = run("generate --n1 1000 --beta 0.09 --material Aluminum -o " + path("gen.json"));
  REQUIRE(r.status == 0);
  const auto m = run("metrics " + path("gen.json"));
  CHECK(m.out.find("N=304") != std::string::npos);
  CHECK(run("generate --n1 1001 -o " + path("bad.json")).status == 2);
  const auto cfg = run("--config " + data("generate_n1_1000.toml") + " generate -o -");
  CHECK(cfg.status == 0);
  CHECK(cfg.out == slurp(path("gen.json")));
}

TEST_CASE("usage errors") {
  const auto r = run("metrics --no-such-flag " + data("table2.json"));
  CHECK(r.status == 2);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run("").status == 2);
  CHECK(run("metrics /nonexistent.json").status == 2);
  CHECK(run("solve " + data("table2.json") + " --method magic").status == 2);
}

TEST_CASE("help documents every subcommand and the units") {
  const auto r = run("--help");
  CHECK(r.status == 0);
  for (const char* sub : {"metrics", "generate", "validate", "solve", "eval-plane", "eval-line",
                          "homog-compare", "check"}) {
    CHECK(r.out.find(sub) != std::string::npos);
  }
  CHECK(r.out.find("GPa") != std::string::npos);
}

TEST_CASE("solve, evaluate and check pipeline") {
  REQUIRE(run("solve " + data("table2.json") + " --method direct -o " + path("c.csv")).status == 0);
  const auto n = run("solve " + data("table2.json") + " --method neumann -o -");
  REQUIRE(n.status == 0);
  CHECK(n.out.rfind("index,cx,cy,cz,method,residual\n", 0) == 0);
  CHECK(n.out.find(",neumann,") != std::string::npos);

  const std::string plane = "eval-plane " + data("table2.json") + " " + path("c.csv") +
                            " --axis z --offset 2.5 --bounds x:1.5:3.5 y:1.5:3.5 --res 40x30 -o ";
  REQUIRE(run(plane + path("p1.csv")).status == 0);
  REQUIRE(run("--threads 1 " + plane + path("p2.csv")).status == 0);
  REQUIRE(run("--threads 3 " + plane + path("p3.csv")).status == 0);
  const auto p1 = slurp(path("p1.csv"));
  CHECK(std::count(p1.begin(), p1.end(), '\n') == 1 + 40 * 30);
  CHECK(p1 == slurp(path("p2.csv")));
  CHECK(p1 == slurp(path("p3.csv")));

  // Without --bounds the plane covers the whole cluster with a margin.
  const auto wide = run("eval-plane " + data("table2.json") + " " + path("c.csv") + " --axis z --offset 2.5 --res 2x2 -o -");
  REQUIRE(wide.status == 0);
  std::istringstream rows(wide.out);
  std::string row;
  std::getline(rows, row);
  double corner[2][2] = {};
  for (int i = 0; i < 4 && std::getline(rows, row); ++i) {
    double x = 0, y = 0;
    char comma = 0;
    std::istringstream(row) >> x >> comma >> y;
    corner[i & 1][0] = x;
    corner[i >> 1][1] = y;
  }
  // Table 2 centres span roughly [1.7, 3.3] on each axis.
  CHECK(corner[0][0] < 1.5);
  CHECK(corner[1][0] > 3.5);
  CHECK(corner[0][1] < 1.5);
  CHECK(corner[1][1] > 3.5);
  const auto half = run("eval-plane " + data("table2.json") + " " + path("c.csv") +
                        " --axis z --offset 2.5 --res 2x2 --bounds x:0:1 -o -");
  REQUIRE(half.status == 0);
  CHECK(half.out.find("\n0,") != std::string::npos);
  CHECK(half.out.find("\n1,") != std::string::npos);

  const auto line = run("eval-line " + data("table2.json") + " " + path("c.csv") +
                        " --from 1.5,2.5,2.5 --to 3.5,2.5,2.5 --samples 11 -o -");
  CHECK(line.status == 0);
  CHECK(std::count(line.out.begin(), line.out.end(), '\n') == 12);

  const auto chk = run("check " + data("table2.json") + " " + path("c.csv") + " --samples 50");
  CHECK(chk.status == 0);
  CHECK(chk.out.find("\"ok\": true") != std::string::npos);

  // Tampered coefficients fail the residual check.
  auto text = slurp(path("c.csv"));
  text.replace(text.find("\n1,") + 3, 1, "9");
  std::ofstream(path("bad.csv")) << text;
  CHECK(run("check " + data("table2.json") + " " + path("bad.csv") + " --samples 50").status == 1);
  CHECK(run("check " + data("table2.json") + " /nonexistent.csv").status == 2);
}

TEST_CASE("validate") {
  CHECK(run("validate " + data("table2.json")).status == 0);
  const auto strict = run("validate " + data("table2.json") + " --ratio 0.1");
  CHECK(strict.status == 1);
  CHECK(strict.out.find("\"ratio\"") != std::string::npos);
}

TEST_CASE("homog-compare") {
  const auto r = run("homog-compare --n1 1000 --samples 21 -o " + path("h.csv"));
  REQUIRE(r.status == 0);
  CHECK(r.out.rfind("sup_gap=", 0) == 0);
  const auto csv = slurp(path("h.csv"));
  CHECK(csv.find("x1,u_minus_wf_system,u_minus_wf_homog") != std::string::npos);
  const auto again = run("homog-compare --n1 1000 --samples 21 -o -");
  CHECK(again.out == csv);
}

TEST_CASE("dump-config reproduces the run") {
  const auto d = run("solve " + data("table2.json") + " --method neumann --tol 1e-11 -o " + path("k.csv") +
                     " --dump-config");
  REQUIRE(d.status == 0);
  CHECK(d.out.find("tol=1e-11") != std::string::npos);
  std::ofstream(path("run.toml")) << d.out;
  const auto again = run("--config " + path("run.toml") + " solve");
  REQUIRE(again.status == 0);
  CHECK(run("--config " + path("run.toml") + " solve --dump-config").out == d.out);
}
