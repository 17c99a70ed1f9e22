#include "hjs/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace hjs {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_json(const std::vector<Vector>& vs) {
  Json a = Json::array();
  for (const Vector& v : vs) a.push_back(to_json(v));
  return a;
}

Json to_json(const ActionResult& r, bool include_curve) {
  Json j;
  j["x"] = to_json(r.x);
  j["y"] = to_json(r.y);
  j["t"] = r.t;
  j["value"] = r.value;
  j["grad_x"] = to_json(r.grad_x);
  j["grad_y"] = to_json(r.grad_y);
  j["grad_t"] = r.grad_t;
  j["energy"] = r.energy;
  j["energy_stddev"] = r.energy_stddev;
  j["el_residual"] = r.el_residual;
  j["multimodal"] = r.multimodal;
  if (include_curve) {
    j["curve"]["nodes"] = to_json(r.minimizer.nodes);
    j["curve"]["velocities"] = to_json(r.minimizer.velocities);
    j["curve"]["dual_arc"] = to_json(r.minimizer.dual_arc);
  }
  return j;
}

Json to_json(const DerivativeCheck& c) {
  Json j;
  j["analytic"] = {{"grad_x", to_json(c.analytic.grad_x)},
                   {"grad_y", to_json(c.analytic.grad_y)},
                   {"grad_t", c.analytic.grad_t}};
  j["finite_difference"] = {{"grad_x", to_json(c.finite_difference.grad_x)},
                            {"grad_y", to_json(c.finite_difference.grad_y)},
                            {"grad_t", c.finite_difference.grad_t}};
  j["max_relative_error"] = c.max_relative_error;
  j["pass"] = c.pass;
  return j;
}

Json to_json(const Superdifferential& sd) {
  Json j;
  j["x"] = to_json(sd.x);
  j["limiting"] = to_json(sd.limiting);
  j["hull_vertices"] = to_json(sd.hull_vertices);
  j["diameter"] = sd.diameter;
  j["stable"] = sd.stable;
  j["cluster_tol"] = sd.cluster_tol;
  return j;
}

Json to_json(const ConvolutionResult& r) {
  Json j;
  j["x"] = to_json(r.x);
  j["t"] = r.t;
  j["value"] = r.value;
  j["extremizer"] = to_json(r.extremizer);
  j["gradient"] = r.gradient ? to_json(*r.gradient) : Json();
  j["concavity_certificate"] = r.concavity_certificate;
  j["localized"] = r.localized;
  j["unique"] = r.unique;
  j["search_radius"] = r.search_radius;
  j["alternatives"] = to_json(r.alternatives);
  return j;
}

Json to_json(const ConvexityReport& r) {
  return Json{{"t", r.t},           {"samples", r.samples}, {"violations", r.violations},
              {"min_q", r.min_q},   {"c1_hat", r.c1_hat},   {"c2_hat", r.c2_hat},
              {"curvature_hat", r.curvature_hat}, {"noise_tolerance", r.noise_tolerance}};
}

Json to_json(const CharacteristicTrace& tr) {
  Json j;
  j["x0"] = to_json(tr.x0);
  j["steps"] = tr.times.empty() ? 0 : tr.times.size() - 1;
  j["t1"] = tr.times.empty() ? 0.0 : tr.times.back();
  j["noncriticality"] = tr.noncriticality;
  j["lipschitz"] = tr.lipschitz;
  j["singular_fraction"] = tr.singular_fraction;
  j["initially_singular"] = tr.initially_singular;
  j["first_regular"] = tr.first_regular;
  double worst = 0.0;
  for (double d : tr.defects) worst = std::max(worst, d);
  j["max_inclusion_defect"] = worst;
  int localized = 0;
  for (bool b : tr.localized) localized += b ? 1 : 0;
  j["localized_points"] = localized;
  return j;
}

Json to_json(const Classification& c) {
  Json j;
  j["kind"] = c.kind;
  j["diameter"] = c.diameter;
  if (c.kind == "regular") {
    j["calibration_defect"] = c.calibration_defect;
    j["junction_mismatch"] = c.junction_mismatch;
  }
  return j;
}

Json to_json(const MountainPassResult& r) {
  Json j;
  j["pair"] = {r.i, r.j};
  j["endpoints"] = {to_json(r.start), to_json(r.end)};
  j["b"] = r.b;
  j["critical_point"] = to_json(r.critical_point);
  j["critical_value"] = r.critical_value;
  j["min_value"] = r.min_value;
  j["certificate"] = r.certificate;
  j["certified"] = r.certified;
  j["collapsed"] = r.collapsed;
  j["iterations"] = r.iterations;
  j["classification"] = r.classification ? to_json(*r.classification) : Json();
  return j;
}

namespace {

std::vector<std::string> axis_names(const std::string& prefix, Eigen::Index n) {
  std::vector<std::string> out;
  for (Eigen::Index i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

void append(std::vector<double>& row, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v(i));
}

void add_columns(Table& t, const std::string& prefix, Eigen::Index n) {
  for (auto& c : axis_names(prefix, n)) t.columns.push_back(c);
}

}  // namespace

Table curve_table(const LagrangianModel& model, const Curve& curve) {
  Table t;
  const Eigen::Index n = model.dim();
  t.columns = {"s"};
  add_columns(t, "x", n);
  add_columns(t, "v", n);
  add_columns(t, "p", n);
  t.columns.push_back("energy");
  const auto energies = energy_profile(model, curve);
  for (std::size_t i = 0; i < curve.nodes.size(); ++i) {
    std::vector<double> row{curve.time(i)};
    append(row, curve.nodes[i]);
    append(row, curve.velocities[i]);
    append(row, curve.dual_arc[i]);
    row.push_back(energies[i]);
    t.rows.push_back(row);
  }
  return t;
}

Table trace_table(const CharacteristicTrace& trace) {
  Table t;
  const Eigen::Index n = trace.x0.size();
  t.columns = {"t"};
  add_columns(t, "y", n);
  t.columns.insert(t.columns.end(), {"diameter", "defect", "energy", "singular"});
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    std::vector<double> row{trace.times[i]};
    append(row, trace.points[i]);
    row.push_back(trace.diameters[i]);
    row.push_back(trace.defects[i]);
    row.push_back(trace.energies[i]);
    row.push_back(trace.singular[i] ? 1.0 : 0.0);
    t.rows.push_back(row);
  }
  return t;
}

Table field_table(const LasryLionsField& field, const GridSpec& grid) {
  Table t;
  const Eigen::Index n = grid.box.dim();
  add_columns(t, "x", n);
  t.columns.push_back("value");
  add_columns(t, "g", n);
  add_columns(t, "fd_g", n);
  for (std::size_t k = 0; k < field.points.size(); ++k) {
    if (n > 1 && k > 0 && k % static_cast<std::size_t>(grid.resolution[0]) == 0) t.block_breaks.push_back(k);
    std::vector<double> row;
    append(row, field.points[k]);
    row.push_back(field.values[k]);
    append(row, field.gradients[k]);
    append(row, field.fd_gradients[k]);
    t.rows.push_back(row);
  }
  return t;
}

Table path_table(const MountainPassResult& r, const BarrierProblem& problem) {
  Table t;
  const Eigen::Index n = r.start.size();
  t.columns = {"index"};
  add_columns(t, "y", n);
  t.columns.push_back("phi");
  for (std::size_t k = 0; k < r.path.size(); ++k) {
    std::vector<double> row{static_cast<double>(k)};
    append(row, r.path[k]);
    row.push_back(barrier_eval(problem, r.path[k]));
    t.rows.push_back(row);
  }
  return t;
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const Table& table) {
  auto out = open_for_write(path);
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
}

void write_dat(const std::filesystem::path& path, const Table& table) {
  auto out = open_for_write(path);
  out << '#';
  for (const auto& c : table.columns) out << ' ' << c;
  out << '\n';
  std::size_t next_break = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (next_break < table.block_breaks.size() && table.block_breaks[next_break] == r) {
      out << '\n';
      ++next_break;
    }
    for (std::size_t c = 0; c < table.rows[r].size(); ++c) out << (c ? " " : "") << format_number(table.rows[r][c]);
    out << '\n';
  }
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  auto out = open_for_write(path);
  out << doc.dump(2) << '\n';
}

}  // namespace hjs
