#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "hjs/action.hpp"
#include "hjs/mpass.hpp"
#include "hjs/operators.hpp"
#include "hjs/scfun.hpp"
#include "hjs/singular.hpp"

namespace hjs {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

Json to_json(const Vector& v);
Json to_json(const std::vector<Vector>& vs);
Json to_json(const ActionResult& r, bool include_curve = false);
Json to_json(const DerivativeCheck& c);
Json to_json(const Superdifferential& sd);
Json to_json(const ConvolutionResult& r);
Json to_json(const ConvexityReport& r);
Json to_json(const CharacteristicTrace& tr);
Json to_json(const MountainPassResult& r);
Json to_json(const Classification& c);

/// Rows of numbers written with 17 significant digits.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> block_breaks;  // row indices before which the .dat mirror inserts a blank line
};

Table curve_table(const LagrangianModel& model, const Curve& curve);
Table trace_table(const CharacteristicTrace& trace);
Table field_table(const LasryLionsField& field, const GridSpec& grid);
Table path_table(const MountainPassResult& r, const BarrierProblem& problem);

void write_csv(const std::filesystem::path& path, const Table& table);
/// gnuplot-friendly mirror: '#'-prefixed header, whitespace separated, blank
/// lines between grid scan lines.
void write_dat(const std::filesystem::path& path, const Table& table);
void write_json(const std::filesystem::path& path, const Json& doc);

std::string format_number(double x);

}  // namespace hjs
