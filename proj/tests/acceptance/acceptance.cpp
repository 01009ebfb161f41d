// Acceptance suite: one PASS/FAIL line per criterion.
//
// Criteria 1-13 run in-process. Criterion 14 runs `gibbsconv verify-all --seed 42`
// twice and compares bytes and exit codes.

#include <array>
#include <cstdio>
#include <iostream>
#include <string>
#include <sys/wait.h>

#include "gibbsconv/verify.hpp"

namespace {

struct RunOutput {
  std::string text;
  int exit_code;
};

RunOutput run(const std::string& cmd) {
  RunOutput out{"", -1};
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return out;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.text.append(buf.data(), n);
  const int status = pclose(pipe);
  out.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

}  // namespace

int main() {
  using namespace gibbsconv;
  bool all = true;
  for (const auto& fn : all_criteria()) {
    CriterionResult r{0, "", false, ""};
    try {
      r = fn();
    } catch (const std::exception& e) {
      r.details = std::string("threw: ") + e.what();
    }
    all = all && r.pass;
    std::cout << format_criterion(r) << std::endl;
  }

  const std::string cmd = std::string("\"") + GIBBSCONV_CLI + "\" verify-all --seed 42 --format json";
  const RunOutput first = run(cmd);
  const RunOutput second = run(cmd);
  const bool identical = first.text == second.text && !first.text.empty();
  const bool same_code = first.exit_code == second.exit_code;
  const bool pass14 = identical && same_code && first.exit_code == 0;
  all = all && pass14;
  CriterionResult r14{14, "deterministic verify-all", pass14,
                      std::string("outputs byte-identical: ") + (identical ? "yes" : "no") + " (" +
                          std::to_string(first.text.size()) + " bytes); exit codes " +
                          std::to_string(first.exit_code) + ", " + std::to_string(second.exit_code) +
                          " (must both be 0)"};
  std::cout << format_criterion(r14) << std::endl;
  std::cout << (all ? "acceptance: all criteria passed" : "acceptance: some criteria FAILED") << std::endl;
  return all ? 0 : 1;
}
