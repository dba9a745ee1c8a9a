#include "diffeoflow/dff_io.hpp"
#include "diffeoflow/json_text.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace diffeoflow;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  Json json() const { return Json::parse(out); }
};

Run run(const std::string& args) {
  const std::string cmd = std::string(DIFFEOFLOW_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& file) const { return (path / file).string(); }
};

const std::string kGrid = "--dim 1 --half-width 8 --points 513";

}  // namespace

TEST_CASE("classify") {
  const auto zero = run("--command classify --descriptor 0 " + kGrid);
  CHECK(zero.code == 0);
  const auto z = zero.json();
  CHECK(z["report"]["inferred_class"] == "CompactSupport");
  for (const auto& e : z["report"]["entries"]) CHECK(e["value"].get<double>() == 0.0);

  const auto gauss = run("--command classify --descriptor 'exp(-x^2)' " + kGrid);
  CHECK(gauss.code == 0);
  CHECK(gauss.json()["report"]["inferred_class"] == "Schwartz");

  const auto one = run("--command classify --descriptor 1 " + kGrid);
  CHECK(one.code == 0);
  CHECK(one.json()["report"]["inferred_class"] == "BoundedAll");

  const auto wrong = run("--command classify --descriptor 1 --class Schwartz " + kGrid);
  CHECK(wrong.code == 2);
  CHECK(wrong.json()["passed"] == false);

  CHECK(run("--command classify --descriptor 'exp(-x^2)' --half-width 4 --points 17").code == 2);
}

TEST_CASE("compose, invert and conjugate") {
  TempDir dir("diffeoflow_test_cli_group");
  const auto c = run("--command compose --class BoundedAll --descriptor 0.5 --descriptor 0.25 --out " + dir.path.string() +
                     " " + kGrid);
  REQUIRE(c.code == 0);
  const auto result = read_dff(dir / "result.dff");
  CHECK((result.components[0].samples().array() == 0.75).all());
  CHECK(fs::exists(dir / "result.dff.meta.json"));
  CHECK(fs::exists(dir / "compose.json"));
  CHECK(c.json()["result"]["decay_class"] == "BoundedAll");

  // Identity file in, identity file out.
  const auto id = run("--command invert --class CompactSupport --descriptor 0 --out " + dir.path.string() + " " + kGrid);
  REQUIRE(id.code == 0);
  CHECK(id.json()["residual"].get<double>() == 0.0);
  const std::string id_file = dir / "id.dff";
  fs::rename(dir / "result.dff", id_file);
  fs::rename(dir / "result.dff.meta.json", id_file + ".meta.json");
  const auto again = run("--command invert --input " + id_file + " --out " + dir.path.string());
  REQUIRE(again.code == 0);
  CHECK(read_dff(dir / "result.dff").components[0].samples().cwiseAbs().maxCoeff() == 0.0);

  const auto conj = run("--command conjugate --descriptor '0.5*tanh(x)' --descriptor '0.2*exp(-x^2)' " + kGrid);
  REQUIRE(conj.code == 0);
  const auto j = conj.json();
  CHECK(j["outer_class"] == "BoundedAll");
  CHECK(j["inner_class"] == "Schwartz");
  CHECK(j["classified_class"] == "Schwartz");
  CHECK(j["normal"] == true);
}

TEST_CASE("evolve") {
  TempDir dir("diffeoflow_test_cli_evolve");
  const auto zero = run("--command evolve --descriptor 0 --t-final 1 --dt 0.0625 --out " + dir.path.string() + " " + kGrid);
  REQUIRE(zero.code == 0);
  CHECK(zero.json()["final_sup_displacement"].get<double>() == 0.0);
  CHECK(read_dff(dir / "final.dff").components[0].samples().cwiseAbs().maxCoeff() == 0.0);
  std::ifstream csv(dir / "flow.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header.rfind("t,sup_f,sup_df,min_det,sup_bound,sup_measured,gronwall_predicted,gronwall_measured", 0) == 0);

  const auto c = run("--command evolve --descriptor 0.3 --t-final 1 --dt 0.0625 --out " + dir.path.string() + " " + kGrid);
  REQUIRE(c.code == 0);
  const auto final_c = read_dff(dir / "final.dff").components[0].samples();
  CHECK((final_c.array() - 0.3).abs().maxCoeff() <= 1e-15);

  const auto g = run("--command evolve --descriptor '0.5*exp(-x^2)' --t-final 1 " + kGrid);
  REQUIRE(g.code == 0);
  const auto j = g.json();
  CHECK(j["displacement_sup_bound"]["holds"] == true);
  CHECK(j["gronwall_bound"]["holds"] == true);
  CHECK(j["sobolev_tracking"]["holds"] == true);
  CHECK(j["final_class"] == "Schwartz");
  CHECK(j["passed"] == true);

  const auto blown = run("--command evolve --descriptor 'x' --class BoundedAll --t-final 1 --dt 0.0625 " + kGrid);
  CHECK(blown.code == 4);
  CHECK(blown.json()["error"] == "FlowFailure");
}

TEST_CASE("error exit codes") {
  TempDir dir("diffeoflow_test_cli_errors");
  CHECK(run("--command compose --descriptor '-2*x' --descriptor 0 --class BoundedAll " + kGrid).code == 3);
  CHECK(run("--command invert --descriptor '-1.2*x*exp(-x^2)' --class Schwartz " + kGrid).code == 3);

  {
    std::ofstream bad(dir / "bad.dff");
    bad << "{\"format\":\"dff-v1\",\"dim\":1\n1,2,3\n";
  }
  const auto corrupt = run("--command invert --input " + (dir / "bad.dff"));
  CHECK(corrupt.code == 1);
  CHECK(corrupt.json()["error"] == "ParseError");
  const auto corrupt_verify = run("--command verify --criteria 4 --input " + (dir / "bad.dff"));
  CHECK(corrupt_verify.code == 1);
  CHECK(corrupt_verify.json()["error"] == "ParseError");

  CHECK(run("--command invert --input " + (dir / "missing.dff")).code == 1);
  CHECK(run("--command classify --descriptor 'foo(x)' " + kGrid).code == 1);
  CHECK(run("--command compose --descriptor 0 " + kGrid).code == 1);
  CHECK(run("--command frobnicate").code == 1);
  CHECK(run("--command classify --points 8").code == 1);

  const auto tol = run("--command verify --tol 0");
  CHECK(tol.code == 2);
  CHECK(tol.json()["error"] == "InvalidTolerance");
}

TEST_CASE("verify is deterministic") {
  const auto a = run("--command verify --criteria 3,4 --seed 7");
  const auto b = run("--command verify --criteria 3,4 --seed 7");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = a.json();
  CHECK(j["criteria"].size() == 2);
  CHECK(j["passed"] == true);
  CHECK(run("--command verify --criteria 12").code == 1);
}
