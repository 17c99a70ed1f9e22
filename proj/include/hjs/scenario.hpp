#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hjs/model.hpp"
#include "hjs/scfun.hpp"

namespace hjs {

using ScenarioDoc = nlohmann::json;

inline const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names{"fundamental", "regularize", "characteristic", "mountainpass", "verify"};
  return names;
}

struct Scenario {
  ScenarioDoc doc;
  std::string hash;    // FNV-1a 64 of the canonical (sorted-key) dump, hex
  std::string source;  // file path
};

/// Applies "a.b.c=value"; the value is parsed as JSON, falling back to a string.
void apply_override(ScenarioDoc& doc, const std::string& assignment);

/// Rejects unknown keys, wrong types and non-positive times. Messages name the field.
void validate_scenario(const ScenarioDoc& doc);

/// Reads, applies overrides in order, validates and hashes.
Scenario load_scenario(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
Scenario scenario_from_json(ScenarioDoc doc, const std::vector<std::string>& overrides = {});

std::string fnv1a_hex(const std::string& text);

LagrangianModel build_model(const ScenarioDoc& model_section);
SemiconcaveFn build_u(const ScenarioDoc& u_section, int dim);

Vector vector_field(const ScenarioDoc& node, const std::string& name);
Matrix matrix_field(const ScenarioDoc& node, int dim, const std::string& name);

}  // namespace hjs
