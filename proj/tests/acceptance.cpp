// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "diffeoflow/verification.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <string>

using namespace diffeoflow;

namespace {

struct Capture {
  int code = -1;
  std::string out;
};

Capture capture(const std::string& cmd) {
  Capture c;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return c;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) c.out.append(buf, n);
  const int status = pclose(pipe);
  c.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return c;
}

void line(int id, const std::string& name, bool passed, const std::string& summary) {
  std::printf("[%s] criterion %2d  %-32s %s\n", passed ? "PASS" : "FAIL", id, name.c_str(), summary.c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  bool all = true;
  const VerifyConfig config;
  for (int id = 1; id <= 9; ++id) {
    CriterionResult r;
    try {
      r = run_acceptance(config, {id}).front();
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion " + std::to_string(id);
      r.summary = std::string("threw: ") + e.what();
    }
    line(r.id, r.name, r.passed, r.summary);
    all = all && r.passed;
  }

  const std::string cmd = std::string(DIFFEOFLOW_CLI) + " --command verify --seed " + std::to_string(config.seed);
  const auto first = capture(cmd);
  const auto second = capture(cmd);
  const bool same = first.code == 0 && second.code == 0 && !first.out.empty() && first.out == second.out;
  line(10, "determinism", same,
       "two verify runs: exit " + std::to_string(first.code) + "/" + std::to_string(second.code) + ", " +
           std::to_string(first.out.size()) + " bytes, " + (first.out == second.out ? "identical" : "different"));
  all = all && same;

  std::printf("%s\n", all ? "all criteria passed" : "some criteria failed");
  return all ? 0 : 1;
}
