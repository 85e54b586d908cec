#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "cli_support.hpp"

using namespace amenact;
using namespace amenact::cli;

namespace {

int run(const std::string& file, const std::string& out, std::optional<std::size_t> prefix, std::size_t budget,
        double log_base) {
  RunOptions opt;
  opt.prefix = prefix;
  opt.budget = budget;
  opt.log_base = log_base;
  ScenarioResult r;
  try {
    r = run_scenario(load_scenario(file), opt);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kSchema;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const WindowEscape& e) {
    std::cerr << "window escape (raise the window or the budget): " << e.what() << "\n";
    return kBudget;
  }
  write_outputs(r, out);
  std::cout << r.name << " (" << r.kind << "): " << r.title << "\n";
  for (const auto& c : r.checks) std::cout << "  " << (c.passed ? "PASS " : "FAIL ") << c.label << ": " << c.detail << "\n";
  for (const auto& [name, t] : r.tables) std::cout << "  wrote " << (std::filesystem::path(out) / (r.name + "-" + name + ".csv")).string() << "\n";
  for (const auto& [name, s] : r.plots) std::cout << "  wrote " << (std::filesystem::path(out) / (r.name + "-" + name + ".svg")).string() << "\n";
  if (const auto* f = r.first_failure()) {
    std::cerr << "assertion failed: " << f->label << ": " << f->detail << "\n";
    return kAssertion;
  }
  return kOk;
}

void list() {
  std::cout << std::size(kBuiltins) << " built-in scenarios\n";
  for (const auto& b : kBuiltins) {
    const auto j = Json::parse(b.text);
    std::printf("  %-20s %-18s %s\n", std::string(b.name).c_str(), j.value("kind", "").c_str(), j.value("title", "").c_str());
  }
}

int describe(const std::string& kind) {
  for (const auto& k : scenario_kinds()) {
    if (k.name != kind) continue;
    std::cout << k.name << ": " << k.summary << "\n";
    for (const auto& [key, what] : k.fields) std::printf("  %-24s %s\n", key.c_str(), what.c_str());
    return kOk;
  }
  std::cerr << "unknown kind \"" << kind << "\"; kinds are:";
  for (const auto& k : scenario_kinds()) std::cerr << " " << k.name;
  std::cerr << "\n";
  return kSchema;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact entropy and Folner computations for monoid actions"};
  app.require_subcommand(1);

  std::string file, out = "amenact-out";
  std::optional<std::size_t> prefix;
  std::size_t budget = kDefaultElementBudget;
  double log_base = 0;
  auto* run_cmd = app.add_subcommand("run", "run a scenario file or a builtin by name");
  run_cmd->add_option("file", file, "scenario file or builtin name")->required();
  run_cmd->add_option("--out", out, "output directory")->capture_default_str();
  run_cmd->add_option("--prefix", prefix, "number of net indices, overriding the file")->check(CLI::PositiveNumber);
  run_cmd->add_option("--budget", budget, "element budget for set computations")->capture_default_str()->check(CLI::PositiveNumber);
  run_cmd->add_option("--log-base", log_base, "logarithm base for displayed ratios (default natural)")->check(CLI::Range(1.000001, 1e9));

  app.add_subcommand("list", "list built-in scenarios");
  std::string kind;
  auto* describe_cmd = app.add_subcommand("describe", "show the fields of a scenario kind");
  describe_cmd->add_option("kind", kind)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kSchema;
  }
  if (*run_cmd) return run(file, out, prefix, budget, log_base);
  if (*describe_cmd) return describe(kind);
  list();
  return kOk;
}
