#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hjs/catalog.hpp"
#include "hjs/serialize.hpp"

namespace hjs {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumerical = 3, kExitProperty = 4 };

struct RunOptions {
  std::string task;
  std::filesystem::path scenario;
  std::vector<std::string> overrides;  // "key.path=value", applied after the file
  int jobs = 0;                        // <= 0: hardware concurrency
  std::optional<std::uint64_t> seed;   // beats the scenario seed
  std::optional<std::filesystem::path> out;  // beats output.dir
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;
  Json manifest;  // also written to <out>/manifest.json when the output directory is known
  std::filesystem::path out_dir;
};

/// Parses, validates, executes one task and writes its outputs and manifest. Never throws.
RunOutcome run(const RunOptions& options);

/// Runs every property check on the selected catalog entries. pass is false when any check fails.
struct VerifyReport {
  Json report;
  bool pass = true;
};
VerifyReport verify_all(const std::vector<std::string>& entries, std::uint64_t seed, int jobs);

/// Same checks on one entry; the report fragment has name, pass and a property list.
Json verify_entry(const CatalogEntry& entry, std::uint64_t seed);

}  // namespace hjs
