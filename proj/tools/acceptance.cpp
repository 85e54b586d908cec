// Runs the builtin scenarios behind each acceptance criterion and prints one
// line per criterion: verdict, headline measurement, and time against limit.
#include <chrono>
#include <cstdio>
#include <iostream>

#include "cli_support.hpp"

using namespace amenact;
using namespace amenact::cli;

namespace {

struct Criterion {
  const char* id;
  const char* what;
  std::vector<const char*> scenarios;
  const char* headline;  // label prefix of the check reported on the line
  double seconds;
};

const std::vector<Criterion> kCriteria{
    {"C1", "multiplication by 4: 2^n and 4*3^(n-1) counts", {"example-4x"}, "X4: closed count", 5},
    {"C2", "Bernoulli shifts log 2, truncating shift 0", {"bernoulli-n", "bernoulli-z", "truncating-shift"}, "X: tail", 2},
    {"C3", "restriction to 2Z gives 2 log 3", {"restriction-even"}, "e0+e1: ratio", 2},
    {"C4", "addition over (Z/4)^(Z) with B = 2A", {"addition-z4"}, "|T_F(X)| =", 2},
    {"C5", "identity x shift on Z^2: log 2/(2n+1)", {"quotient-vanishing"}, "e0: tail", 2},
    {"C6", "card_pi ratios 1/2 and 5/(2n+1)", {"card-pi-half", "card-pi-mod5"}, "card_pi: tail", 1},
    {"C7", "Fubini for doubling times a trivial factor", {"fubini-doubling"}, "|H_S(f)", 10},
    {"C8", "semidirect box defects", {"semidirect-defect"}, "delta_{4,400}", 5},
    {"C9", "greedy tiling of [0,100)^2 at eps 1/10", {"tiling-square"}, "witness is", 5},
    {"C10", "trajectory sizes = cotrajectory indices, order <= 64", {"bridge-sweep"}, "|T_F", 60},
    {"C11", "annihilator laws, order <= 512", {"duality-sweep"}, "(B^perp)", 30},
    {"C12", "randomized property suite, 200 cases each", {"lemma-properties"}, "", 60},
};

}  // namespace

int main() {
  int failed = 0;
  for (const auto& c : kCriteria) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::size_t checks = 0, passed = 0;
    std::string headline, failure;
    for (const char* name : c.scenarios) {
      try {
        const auto r = run_scenario(load_scenario(name));
        for (const auto& k : r.checks) {
          ++checks;
          passed += k.passed;
          if (!k.passed && failure.empty()) failure = std::string(name) + ": " + k.label + ": " + k.detail;
          if (headline.empty() && *c.headline && k.label.find(c.headline) != std::string::npos) headline = k.detail;
        }
        if (checks == 0) failure = std::string(name) + ": no checks";
      } catch (const std::exception& e) {
        failure = std::string(name) + ": " + e.what();
      }
    }
    if (!*c.headline) headline = std::to_string(passed) + " properties";
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ok = failure.empty() && checks > 0 && secs < c.seconds;
    if (failure.empty() && secs >= c.seconds) failure = "time limit exceeded";
    failed += !ok;
    std::printf("%-4s %s  %s | checks %zu/%zu | %s | %.2f s < %.0f s%s%s\n", c.id, ok ? "PASS" : "FAIL", c.what, passed,
                checks, headline.c_str(), secs, c.seconds, failure.empty() ? "" : " | ", failure.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, kCriteria.size());
  return failed == 0 ? 0 : 1;
}
