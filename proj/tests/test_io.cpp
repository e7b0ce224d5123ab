#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "rumtest/conetest.hpp"
#include "rumtest/errors.hpp"
#include "rumtest/estimate.hpp"
#include "rumtest/geometry.hpp"
#include "rumtest/io.hpp"
#include "rumtest/simulate.hpp"
#include "support/refs.hpp"

using namespace rumtest;

namespace {

struct TempDir {
  std::string path;
  TempDir() {
    char tmpl[] = "/tmp/rumtest_io_XXXXXX";
    path = mkdtemp(tmpl);
  }
  ~TempDir() { std::system(("rm -rf " + path).c_str()); }
  std::string file(const std::string& name) const { return path + "/" + name; }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  f << content;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Run the installed CLI; returns the exit code and captures stdout.
int run_cli(const std::string& args, const std::string& stdout_path) {
  const std::string cmd = std::string(RUMTEST_CLI_PATH) + " " + args + " > " +
                          stdout_path + " 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  return WEXITSTATUS(raw);
}

const char* kCrossingPrices = "period,p1,p2\n1,1,2\n2,2,1\n";

}  // namespace

TEST_CASE("prices round-trip through CSV") {
  TempDir dir;
  auto b = make_budget_system(testsupport::three_budget_prices(),
                              {"a", "b", "c"});
  io::write_prices_csv(dir.file("p.csv"), b);
  auto back = io::load_prices_csv(dir.file("p.csv"));
  REQUIRE(back.count() == 3);
  CHECK(back.num_goods == 3);
  for (int j = 0; j < 3; ++j) {
    CHECK(back.budgets[j].label == b.budgets[j].label);
    CHECK((back.price(j) - b.price(j)).norm() == 0.0);
  }
}

TEST_CASE("malformed price files give located diagnostics") {
  TempDir dir;
  write_file(dir.file("bad1.csv"), "p1,p2\n1,2\n");
  CHECK_THROWS_AS(io::load_prices_csv(dir.file("bad1.csv")), DataError);
  write_file(dir.file("bad2.csv"), "period,p1,p2\n1,1\n");
  try {
    io::load_prices_csv(dir.file("bad2.csv"));
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  write_file(dir.file("bad3.csv"), "period,p1,p2\n1,1,x\n");
  try {
    io::load_prices_csv(dir.file("bad3.csv"));
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    CHECK(std::string(e.what()).find("column 3") != std::string::npos);
  }
  CHECK_THROWS_AS(io::load_prices_csv(dir.file("missing.csv")), DataError);
}

TEST_CASE("microdata round-trips in patch form") {
  TempDir dir;
  auto cp = crossing_pair();
  Eigen::VectorXd nu(3);
  nu << 0.3, 0.3, 0.4;
  auto d = sample_mixture(cp.types, cp.patches, nu, {40, 50}, 17);
  io::write_microdata_csv(dir.file("m.csv"), d);
  auto back = io::load_microdata_csv(dir.file("m.csv"), cp.budgets, cp.patches);
  CHECK(back.patch == d.patch);
  CHECK(back.w == d.w);
}

TEST_CASE("bundle-form microdata is classified on load") {
  TempDir dir;
  auto cp = crossing_pair();
  // On budget 1 (prices 1,2): (0.9, 0.05) has p2'y = 1.9 > 1, above;
  // scaled bundles are renormalized onto the plane first.
  write_file(dir.file("b.csv"),
             "period,q1,q2,w\n"
             "1,0.9,0.05,0.3\n"
             "1,0.1,0.45,0.4\n"
             "2,0.45,0.1,0.5\n"
             "1,1.8,0.1,0.6\n");
  auto d = io::load_microdata_csv(dir.file("b.csv"), cp.budgets, cp.patches);
  REQUIRE(d.n(0) == 3);
  REQUIRE(d.n(1) == 1);
  const int above0 = cp.patches.patch_index(0, 1);
  const int below0 = cp.patches.patch_index(0, 0);
  CHECK(d.patch[0][0] == above0);
  CHECK(d.patch[0][1] == below0);
  // Row 4 is row 2 scaled by 2: same classification after renormalizing.
  CHECK(d.patch[0][2] == above0);
  CHECK(d.w[0] == std::vector<double>{0.3, 0.4, 0.6});
}

TEST_CASE("microdata with bad patch indices or periods is rejected") {
  TempDir dir;
  auto cp = crossing_pair();
  write_file(dir.file("bad.csv"), "period,patch,w\n1,2,0.5\n");
  CHECK_THROWS_AS(
      io::load_microdata_csv(dir.file("bad.csv"), cp.budgets, cp.patches),
      DataError);
  write_file(dir.file("bad2.csv"), "period,patch,w\n9,0,0.5\n");
  CHECK_THROWS_AS(
      io::load_microdata_csv(dir.file("bad2.csv"), cp.budgets, cp.patches),
      DataError);
  write_file(dir.file("bad3.csv"), "period,patch,w\n1,0\n");
  CHECK_THROWS_AS(
      io::load_microdata_csv(dir.file("bad3.csv"), cp.budgets, cp.patches),
      DataError);
}

TEST_CASE("type matrices round-trip through their compact format") {
  TempDir dir;
  auto b = make_budget_system(testsupport::three_budget_prices());
  auto t = enumerate_patches(b);
  auto a = crawl_A(t, Axiom::Sarp);
  io::write_a_matrix(dir.file("a.txt"), a);
  auto back = io::read_a_matrix(dir.file("a.txt"));
  CHECK(back.columns == a.columns);
  CHECK(back.per_block_counts == a.per_block_counts);
  write_file(dir.file("trunc.txt"), "12 25\n4 4 4\n0 0\n");
  CHECK_THROWS_AS(io::read_a_matrix(dir.file("trunc.txt")), DataError);
}

TEST_CASE("reports carry the schema version") {
  TestResult r;
  r.eta_hat = Eigen::VectorXd::Zero(2);
  auto j = nlohmann::json::parse(io::test_report_json(r, "freq"));
  CHECK(j["schema_version"] == io::kSchemaVersion);
  CHECK(j["estimator"] == "freq");
  CHECK_FALSE(j.contains("boot_stats"));
  r.boot_stats = {0.1, 0.2};
  auto j2 = nlohmann::json::parse(io::test_report_json(r, "freq", true));
  CHECK(j2["boot_stats"].size() == 2);
  auto jb = nlohmann::json::parse(
      io::bounds_report_json("patch:1", 1, BoundResult{0.0, 0.3}));
  CHECK(jb["schema_version"] == io::kSchemaVersion);
  CHECK(jb["target_budget"] == 2);
  CHECK(jb["upper"] == doctest::Approx(0.3));
}

TEST_CASE("cli: patch counts for the two reference systems") {
  TempDir dir;
  write_file(dir.file("p2.csv"), kCrossingPrices);
  REQUIRE(run_cli("patches --prices " + dir.file("p2.csv"),
                  dir.file("out.txt")) == 0);
  auto out = read_file(dir.file("out.txt"));
  CHECK(out.find("I=4") != std::string::npos);
  write_file(dir.file("p3.csv"),
             "period,p1,p2,p3\n1,0.5,0.25,0.25\n2,0.25,0.5,0.25\n"
             "3,0.25,0.25,0.5\n");
  REQUIRE(run_cli("patches --prices " + dir.file("p3.csv"),
                  dir.file("out.txt")) == 0);
  out = read_file(dir.file("out.txt"));
  CHECK(out.find("I=12") != std::string::npos);
  CHECK(out.find("I_1=4") != std::string::npos);
}

TEST_CASE("cli: enumeration agrees across algorithms and exports") {
  TempDir dir;
  write_file(dir.file("p3.csv"),
             "period,p1,p2,p3\n1,0.5,0.25,0.25\n2,0.25,0.5,0.25\n"
             "3,0.25,0.25,0.5\n");
  REQUIRE(run_cli("enumerate --prices " + dir.file("p3.csv") +
                      " --algorithm all --verify --out " + dir.file("a.txt"),
                  dir.file("out.txt")) == 0);
  auto out = read_file(dir.file("out.txt"));
  CHECK(out.find("H=25") != std::string::npos);
  CHECK(out.find("verified: all algorithms agree") != std::string::npos);
  auto a = io::read_a_matrix(dir.file("a.txt"));
  CHECK(a.cols() == 25);
}

TEST_CASE("cli: simulate then test accepts rationalizable data") {
  TempDir dir;
  write_file(dir.file("p2.csv"), kCrossingPrices);
  REQUIRE(run_cli("simulate --prices " + dir.file("p2.csv") +
                      " --dgp mixture --n 400 --seed 3 --out " +
                      dir.file("m.csv"),
                  dir.file("out.txt")) == 0);
  REQUIRE(run_cli("test --prices " + dir.file("p2.csv") + " --data " +
                      dir.file("m.csv") +
                      " --estimator freq --reps 199 --seed 5 --out " +
                      dir.file("r.json"),
                  dir.file("out.txt")) == 0);
  auto j = nlohmann::json::parse(read_file(dir.file("r.json")));
  CHECK(j["schema_version"] == io::kSchemaVersion);
  CHECK(j["p_value"].get<double>() > 0.05);
  CHECK(j["reject"].get<bool>() == false);
}

TEST_CASE("cli: reusing an exported matrix reproduces the statistic") {
  TempDir dir;
  write_file(dir.file("p2.csv"), kCrossingPrices);
  REQUIRE(run_cli("simulate --prices " + dir.file("p2.csv") +
                      " --dgp boundary --n 300 --seed 8 --out " +
                      dir.file("m.csv"),
                  dir.file("out.txt")) == 0);
  REQUIRE(run_cli("enumerate --prices " + dir.file("p2.csv") + " --out " +
                      dir.file("a.txt"),
                  dir.file("out.txt")) == 0);
  const std::string base = "test --prices " + dir.file("p2.csv") + " --data " +
                           dir.file("m.csv") +
                           " --estimator freq --reps 99 --seed 4 --out ";
  REQUIRE(run_cli(base + dir.file("r1.json"), dir.file("out.txt")) == 0);
  REQUIRE(run_cli(base + dir.file("r2.json") + " --a-matrix " +
                      dir.file("a.txt"),
                  dir.file("out.txt")) == 0);
  auto j1 = nlohmann::json::parse(read_file(dir.file("r1.json")));
  auto j2 = nlohmann::json::parse(read_file(dir.file("r2.json")));
  CHECK(j1["J_N"].get<double>() == j2["J_N"].get<double>());
  CHECK(j1["p_value"].get<double>() == j2["p_value"].get<double>());
}

TEST_CASE("cli: malformed input and misuse exit with code 2") {
  TempDir dir;
  write_file(dir.file("p2.csv"), kCrossingPrices);
  write_file(dir.file("bad.csv"), "period,p1\n1,not_a_number\n");
  CHECK(run_cli("patches --prices " + dir.file("bad.csv"),
                dir.file("out.txt")) == 2);
  CHECK(run_cli("patches --no-such-flag", dir.file("out.txt")) == 2);
  CHECK(run_cli("", dir.file("out.txt")) == 2);
  // Control-function estimation without an instrument column.
  write_file(dir.file("noz.csv"),
             "period,patch,w\n1,0,0.5\n1,1,0.6\n2,2,0.4\n2,3,0.7\n");
  CHECK(run_cli("test --prices " + dir.file("p2.csv") + " --data " +
                    dir.file("noz.csv") + " --estimator cf --reps 99",
                dir.file("out.txt")) == 2);
  // Too few replications.
  CHECK(run_cli("test --prices " + dir.file("p2.csv") + " --data " +
                    dir.file("noz.csv") + " --estimator freq --reps 10",
                dir.file("out.txt")) == 2);
}

TEST_CASE("cli: bounds on the crossing pair") {
  TempDir dir;
  write_file(dir.file("p2.csv"), kCrossingPrices);
  write_file(dir.file("pi.txt"), "0.7 0.3\n");
  REQUIRE(run_cli("bounds --prices " + dir.file("p2.csv") + " --pi " +
                      dir.file("pi.txt") +
                      " --target 2 --quantity patch:1 --out " +
                      dir.file("b.json"),
                  dir.file("out.txt")) == 0);
  auto j = nlohmann::json::parse(read_file(dir.file("b.json")));
  CHECK(j["lower"].get<double>() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(j["upper"].get<double>() == doctest::Approx(0.3).epsilon(1e-9));
  // Infeasible restriction: exit 2 without projection, accepted with it.
  // Three symmetric budgets; each observed budget puts all mass on the
  // patch below the other observed one, an impossible two-cycle.
  write_file(dir.file("p3.csv"),
             "period,p1,p2,p3\n"
             "1,0.5,0.25,0.25\n"
             "2,0.25,0.5,0.25\n"
             "3,0.25,0.25,0.5\n");
  write_file(dir.file("badpi.txt"), "1 0 0 0 1 0 0 0\n");
  CHECK(run_cli("bounds --prices " + dir.file("p3.csv") + " --pi " +
                    dir.file("badpi.txt") + " --target 3 --quantity patch:1",
                dir.file("out.txt")) == 2);
  CHECK(run_cli("bounds --prices " + dir.file("p3.csv") + " --pi " +
                    dir.file("badpi.txt") +
                    " --target 3 --quantity patch:1 --project",
                dir.file("out.txt")) == 0);
}

TEST_CASE("cli: binary menus print the reference matrix and test vectors") {
  TempDir dir;
  REQUIRE(run_cli("binary --items 3 --menus 1-2 --menus 2-3 --menus 3-1",
                  dir.file("out.txt")) == 0);
  auto out = read_file(dir.file("out.txt"));
  CHECK(out.find("I=6") != std::string::npos);
  CHECK(out.find("H=6") != std::string::npos);
  CHECK(out.find("1 1 1 0 0 0") != std::string::npos);
  // A triangle-condition violator is flagged as a non-member.
  write_file(dir.file("pi.txt"), "0.9 0.1 0.9 0.1 0.9 0.1\n");
  REQUIRE(run_cli("binary --items 3 --menus 1-2 --menus 2-3 --menus 3-1 "
                  "--pi " +
                      dir.file("pi.txt"),
                  dir.file("out.txt")) == 0);
  out = read_file(dir.file("out.txt"));
  CHECK(out.find("member=0") != std::string::npos);
  write_file(dir.file("pi2.txt"), "0.5 0.5 0.5 0.5 0.5 0.5\n");
  REQUIRE(run_cli("binary --items 3 --menus 1-2 --menus 2-3 --menus 3-1 "
                  "--pi " +
                      dir.file("pi2.txt"),
                  dir.file("out.txt")) == 0);
  out = read_file(dir.file("out.txt"));
  CHECK(out.find("member=1") != std::string::npos);
}
