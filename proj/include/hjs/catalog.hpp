#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hjs/scenario.hpp"

namespace hjs {

/// A built-in (model, u) pair with the metadata the verify task needs.
struct CatalogEntry {
  std::string name;
  std::string description;
  ScenarioDoc model;  // same layout as the scenario "model" section
  ScenarioDoc u;      // same layout as the scenario "u" section
  Box region;
  Vector anchor;                 // base point for convolution, trace and mountain-pass checks
  std::optional<double> level;   // u solves H(x,Du) = level in the viscosity sense
  std::vector<Vector> kinks;     // extra viscosity test points
  double derivative_t = 0.4;
  std::vector<double> monotone_times{0.4, 0.2, 0.1, 0.05};
  std::vector<double> limit_times{0.2, 0.1, 0.05, 0.02};
  double critical_t = 0.5;
  double trace_t1 = 0.2;
  int trace_steps = 16;
  double mountain_t = 0.5;
};

const std::vector<CatalogEntry>& catalog();
/// Throws ValidationError listing the known names.
const CatalogEntry& catalog_entry(const std::string& name);
std::vector<std::string> catalog_names();

}  // namespace hjs
