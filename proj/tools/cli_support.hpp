#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "amenact/scenario.hpp"
#include "builtins.hpp"

namespace amenact::cli {

enum ExitCode { kOk = 0, kAssertion = 1, kSchema = 2, kBudget = 3 };

inline std::optional<std::string_view> builtin(std::string_view name) {
  for (const auto& b : kBuiltins)
    if (b.name == name) return b.text;
  return std::nullopt;
}

/// Parses a scenario from a file path, or from a builtin of that name when no
/// such file exists. Throws SchemaError.
inline Json load_scenario(const std::string& source) {
  std::string text;
  if (std::filesystem::exists(source)) {
    std::ifstream in(source, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  } else if (auto b = builtin(source)) {
    text = std::string(*b);
  } else {
    throw SchemaError("no scenario file or builtin named \"" + source + "\"");
  }
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(source + ": parse error: " + e.what());
  }
}

inline void write_outputs(const ScenarioResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, table] : r.tables) std::ofstream(dir / (r.name + "-" + name + ".csv"), std::ios::binary) << table.str();
  for (const auto& [name, svg] : r.plots) std::ofstream(dir / (r.name + "-" + name + ".svg"), std::ios::binary) << svg;
}

}  // namespace amenact::cli
