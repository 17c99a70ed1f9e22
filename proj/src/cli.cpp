#include "hjs/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <set>

#include "hjs/action.hpp"
#include "hjs/mpass.hpp"
#include "hjs/operators.hpp"
#include "hjs/parallel.hpp"
#include "hjs/scfun.hpp"
#include "hjs/singular.hpp"

namespace hjs {

namespace {

namespace fs = std::filesystem;

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json optional_number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

// ---------------------------------------------------------------------------
// scenario resolution

struct Problem {
  LagrangianModel model;
  SemiconcaveFn u;
  Box region;
  Vector anchor;
  std::optional<double> level;
};

Problem resolve_problem(const ScenarioDoc& doc) {
  const CatalogEntry* entry = nullptr;
  if (doc.contains("catalog") && doc["catalog"].is_string()) entry = &catalog_entry(doc["catalog"]);
  if (!doc.contains("model") && !entry) throw ValidationError("model section is required (or name a catalog entry)");
  if (!doc.contains("u") && !entry) throw ValidationError("u section is required (or name a catalog entry)");
  LagrangianModel model = build_model(doc.contains("model") ? doc["model"] : entry->model);
  const int dim = model.dim();
  SemiconcaveFn u = build_u(doc.contains("u") ? doc["u"] : entry->u, dim);
  if (u.dim() != dim) throw ValidationError("u dimension does not match model.dim");
  const bool same_pair = entry && !doc.contains("model") && !doc.contains("u");
  Box region = same_pair ? entry->region : Box{Vector::Constant(dim, -1.0), Vector::Constant(dim, 1.0)};
  Vector anchor = same_pair ? entry->anchor : Vector::Zero(dim);
  std::optional<double> level = same_pair ? entry->level : std::nullopt;
  return Problem{std::move(model), std::move(u), std::move(region), std::move(anchor), level};
}

ScenarioDoc task_section(const ScenarioDoc& doc, const std::string& task) {
  if (doc.contains("task") && doc["task"].contains(task)) return doc["task"][task];
  return ScenarioDoc::object();
}

Vector point_param(const ScenarioDoc& section, const std::string& key, const std::string& path, const Vector& fallback) {
  if (!section.contains(key)) return fallback;
  Vector v = vector_field(section[key], path);
  if (v.size() != fallback.size())
    throw ValidationError(path + " must have length " + std::to_string(fallback.size()));
  return v;
}

int int_param(const ScenarioDoc& section, const std::string& key, const std::string& path, int fallback, int min_value) {
  const int v = section.value(key, fallback);
  if (v < min_value) throw ValidationError(path + " must be >= " + std::to_string(min_value));
  return v;
}

struct Output {
  fs::path dir;
  std::set<std::string> formats;
  std::vector<std::string> files;

  bool wants(const std::string& f) const { return formats.count(f) > 0; }

  void json(const std::string& name, const Json& doc) {
    if (!wants("json")) return;
    write_json(dir / name, doc);
    files.push_back(name);
  }
  void table(const std::string& stem, const Table& t) {
    if (wants("csv")) {
      write_csv(dir / (stem + ".csv"), t);
      files.push_back(stem + ".csv");
    }
    if (wants("dat")) {
      write_dat(dir / (stem + ".dat"), t);
      files.push_back(stem + ".dat");
    }
  }
};

Json header(const std::string& task, const Scenario& scenario, std::uint64_t seed) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["task"] = task;
  j["scenario_hash"] = scenario.hash;
  j["seed"] = seed;
  return j;
}

// ---------------------------------------------------------------------------
// tasks

void task_fundamental(const Scenario& sc, const Problem& pb, std::uint64_t seed, Output& out) {
  const auto sec = task_section(sc.doc, "fundamental");
  const int n = pb.model.dim();
  const Vector x = point_param(sec, "x", "task.fundamental.x", Vector::Zero(n));
  const Vector y = point_param(sec, "y", "task.fundamental.y", Vector::Constant(n, 0.5));
  const double t = sec.value("t", 1.0);
  ActionOptions opts;
  opts.nodes = int_param(sec, "nodes", "task.fundamental.nodes", opts.nodes, 4);
  opts.restarts = int_param(sec, "restarts", "task.fundamental.restarts", opts.restarts, 1);
  opts.substeps = int_param(sec, "substeps", "task.fundamental.substeps", opts.substeps, 1);
  opts.el_tolerance = sec.value("el_tolerance", opts.el_tolerance);
  opts.seed = seed;
  const ActionResult result = minimize_action(pb.model, x, y, t, opts);
  Json doc = header("fundamental", sc, seed);
  doc["model"] = pb.model.form_name();
  doc["result"] = to_json(result);
  if (pb.model.position_independent()) {
    const ActionKernel closed(pb.model);
    doc["closed_form_value"] = closed.value(x, y, t);
  }
  if (sec.value("check_derivatives", true)) {
    const DerivativeCheck check = action_derivatives(pb.model, result, opts);
    doc["derivative_check"] = to_json(check);
  }
  out.json("result.json", doc);
  out.table("curve", curve_table(pb.model, result.minimizer));
}

void task_regularize(const Scenario& sc, const Problem& pb, std::uint64_t seed, int jobs, Output& out) {
  const auto sec = task_section(sc.doc, "regularize");
  const int n = pb.model.dim();
  const double t = sec.value("t", 0.1);
  GridSpec grid;
  grid.box.lower = point_param(sec, "lower", "task.regularize.lower", pb.region.lower);
  grid.box.upper = point_param(sec, "upper", "task.regularize.upper", pb.region.upper);
  if ((grid.box.upper - grid.box.lower).minCoeff() <= 0.0)
    throw ValidationError("task.regularize.upper must exceed task.regularize.lower componentwise");
  const int default_res = n == 1 ? 41 : (n == 2 ? 21 : 9);
  if (sec.contains("resolution")) {
    for (const auto& r : sec["resolution"]) {
      if (!r.is_number_integer() || r.get<int>() < 1)
        throw ValidationError("task.regularize.resolution entries must be positive integers");
      grid.resolution.push_back(r.get<int>());
    }
    if (static_cast<int>(grid.resolution.size()) != n)
      throw ValidationError("task.regularize.resolution must have length " + std::to_string(n));
  } else {
    grid.resolution.assign(n, default_res);
  }
  ConvolveOptions copt;
  copt.localized = sec.value("localized", true);
  copt.search_radius = sec.value("search_radius", 0.0);
  copt.seed = seed;
  const ActionKernel kernel(pb.model);
  const LasryLionsField field = lasry_lions_field(pb.u, kernel, t, grid, copt, jobs);

  Json doc = header("regularize", sc, seed);
  doc["t"] = t;
  doc["nodes"] = field.points.size();
  doc["resolution"] = grid.resolution;
  doc["lower"] = to_json(grid.box.lower);
  doc["upper"] = to_json(grid.box.upper);
  doc["semiconcavity_constant"] = field.upper_bound;
  doc["semiconvexity_bound"] = optional_number(field.lower_bound);
  doc["max_second_difference"] = optional_number(field.max_second_difference);
  doc["min_second_difference"] = optional_number(field.min_second_difference);
  doc["violations"] = field.violations;
  doc["localized_count"] = field.localized_count;
  out.json("regularize.json", doc);
  out.table("field", field_table(field, grid));
}

Json velocity_json(const InitialVelocityReport& r) {
  Json j;
  j["estimate"] = to_json(r.estimate);
  j["expected"] = to_json(r.expected);
  j["gap"] = r.gap;
  j["relative_gap"] = r.relative_gap;
  return j;
}

Json noncriticality_json(const NoncriticalityReport& r) {
  Json j;
  j["distance"] = r.distance;
  j["injectivity_checked"] = r.injectivity_checked;
  j["injective"] = r.injective;
  j["min_pair_distance"] = r.min_pair_distance;
  j["required_separation"] = r.required_separation;
  return j;
}

TraceOptions trace_options(std::uint64_t seed, int jobs) {
  TraceOptions o;
  o.convolve.seed = seed;
  o.superdiff.seed = seed;
  o.jobs = jobs;
  return o;
}

void task_characteristic(const Scenario& sc, const Problem& pb, std::uint64_t seed, int jobs, Output& out) {
  const auto sec = task_section(sc.doc, "characteristic");
  const Vector x0 = point_param(sec, "x0", "task.characteristic.x0", pb.anchor);
  const double t1 = sec.value("t1", 0.2);
  const int nsteps = int_param(sec, "nsteps", "task.characteristic.nsteps", 32, 1);
  TraceOptions topt = trace_options(seed, jobs);
  topt.sing_tol = sec.value("sing_tol", 0.0);
  topt.convolve.search_radius = sec.value("search_radius", 0.0);
  const ActionKernel kernel(pb.model);
  const HamiltonianView hv(pb.model);
  const CharacteristicTrace trace = propagate_singularity(pb.u, kernel, x0, t1, nsteps, topt);
  const Superdifferential sd = estimate_superdifferential(pb.u, x0, topt.superdiff);

  Json doc = header("characteristic", sc, seed);
  doc["trace"] = to_json(trace);
  doc["superdifferential"] = to_json(sd);
  if (trace.times.size() >= 5) doc["initial_velocity"] = velocity_json(initial_velocity_check(trace, hv, sd));
  doc["noncriticality"] = noncriticality_json(noncriticality_check(pb.u, hv, x0, &trace, topt.superdiff));
  out.json("characteristic.json", doc);
  out.table("trace", trace_table(trace));
}

Json minimizer_json(const GlobalMinimizer& m) {
  Json j;
  j["point"] = to_json(m.point);
  j["covector"] = to_json(m.covector);
  j["value"] = m.value;
  j["fixed_point_gap"] = m.fixed_point_gap;
  return j;
}

void task_mountainpass(const Scenario& sc, const Problem& pb, std::uint64_t seed, int jobs, Output& out) {
  const auto sec = task_section(sc.doc, "mountainpass");
  const Vector x = point_param(sec, "x", "task.mountainpass.x", pb.anchor);
  const double t = sec.value("t", 0.5);
  MountainPassOptions mopt;
  mopt.path_nodes = int_param(sec, "path_nodes", "task.mountainpass.path_nodes", mopt.path_nodes, 3);
  mopt.iters = int_param(sec, "iters", "task.mountainpass.iters", mopt.iters, 1);
  mopt.superdiff.seed = seed;
  const ActionKernel kernel(pb.model);
  const BarrierProblem problem = make_barrier_problem(pb.u, kernel, x, t, mopt.superdiff);
  const auto minimizers = global_minimizers(problem);

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < static_cast<int>(minimizers.size()); ++i)
    for (int j = i + 1; j < static_cast<int>(minimizers.size()); ++j) pairs.emplace_back(i, j);
  std::vector<MountainPassResult> passes(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t k) {
    MountainPassResult r = mountain_pass(problem, minimizers, pairs[k].first, pairs[k].second, mopt);
    r.classification = classify_dichotomy(r, problem, mopt.superdiff);
    passes[k] = std::move(r);
  });

  Json doc = header("mountainpass", sc, seed);
  doc["x"] = to_json(x);
  doc["t"] = t;
  doc["covectors"] = to_json(problem.covectors);
  Json mins = Json::array();
  for (const auto& m : minimizers) mins.push_back(minimizer_json(m));
  doc["minimizers"] = mins;
  Json arr = Json::array();
  for (const auto& r : passes) arr.push_back(to_json(r));
  doc["passes"] = arr;
  if (minimizers.size() < 2) doc["note"] = "fewer than two global minimizers; no mountain pass to compute";
  out.json("mountainpass.json", doc);
  for (const auto& r : passes) out.table("path_" + std::to_string(r.i) + "_" + std::to_string(r.j), path_table(r, problem));
}

// ---------------------------------------------------------------------------
// verification

Json property(const std::string& name, bool pass, Json metrics, bool skipped = false, const std::string& note = "") {
  Json j;
  j["name"] = name;
  j["pass"] = skipped ? true : pass;
  j["skipped"] = skipped;
  if (!note.empty()) j["note"] = note;
  j["metrics"] = std::move(metrics);
  return j;
}

template <class Body>
Json guarded(const std::string& name, Body body) {
  try {
    return body();
  } catch (const Error& e) {
    Json m;
    m["error"] = e.what();
    return property(name, false, m);
  }
}

}  // namespace

Json verify_entry(const CatalogEntry& entry, std::uint64_t seed) {
  const LagrangianModel model = build_model(entry.model);
  const SemiconcaveFn u = build_u(entry.u, model.dim());
  const int n = model.dim();
  const ActionKernel kernel(model);
  const HamiltonianView hv(model);
  ConvolveOptions copt;
  copt.seed = seed;
  SuperdiffOptions sdopt;
  sdopt.seed = seed;

  Json props = Json::array();
  double t0 = 0.0;

  props.push_back(guarded("semiconcavity", [&] {
    const auto r = semiconcavity_check(u, entry.region, u.constant(), 500, seed);
    Json m;
    m["C"] = u.constant();
    m["triples"] = r.triples;
    m["worst_midpoint"] = r.worst_midpoint;
    m["worst_proximal"] = r.worst_proximal;
    m["tolerance"] = r.tolerance;
    return property("semiconcavity", r.pass, m);
  }));

  props.push_back(guarded("viscosity", [&] {
    if (!entry.level) return property("viscosity", true, Json::object(), true, "u is not declared a viscosity solution");
    const auto r = viscosity_check(u, hv, entry.region, 200, *entry.level, seed, entry.kinks);
    Json m;
    m["level"] = *entry.level;
    m["samples"] = r.samples;
    m["subsolution_defect"] = optional_number(r.subsolution_defect);
    m["supersolution_defect"] = optional_number(r.supersolution_defect);
    m["tolerance"] = r.tolerance;
    return property("viscosity", r.pass, m);
  }));

  props.push_back(guarded("kernel_convexity", [&] {
    t0 = determine_t0(kernel, entry.anchor, 400, seed);
    const auto r = verify_convexity(kernel, entry.anchor, t0, 200, seed);
    Json m = to_json(r);
    return property("kernel_convexity", r.violations == 0, m);
  }));

  props.push_back(guarded("action_derivatives", [&] {
    Vector x = entry.anchor + Vector::Constant(n, 0.1);
    Vector y = entry.anchor;
    y(0) -= 0.2;
    ActionOptions aopt;
    aopt.seed = seed;
    const auto result = minimize_action(model, x, y, entry.derivative_t, aopt);
    const auto check = action_derivatives(model, result, aopt);
    const bool energy_ok = result.energy_stddev <= 1e-5 * (1.0 + std::abs(result.energy));
    Json m;
    m["value"] = result.value;
    m["max_relative_error"] = check.max_relative_error;
    m["energy"] = result.energy;
    m["energy_stddev"] = result.energy_stddev;
    if (kernel.closed_form()) m["closed_form_value"] = kernel.value(x, y, entry.derivative_t);
    return property("action_derivatives", check.pass && energy_ok, m);
  }));

  props.push_back(guarded("monotone_in_time", [&] {
    const auto r = verify_P3(u, kernel, entry.anchor, entry.monotone_times, copt);
    Json m;
    m["times"] = r.times;
    m["values"] = r.values;
    m["worst_decrease"] = r.worst_decrease;
    m["gap"] = r.gap;
    m["extrapolated_gap"] = r.extrapolated_gap;
    if (r.skipped) return property("monotone_in_time", true, m, true, r.note);
    return property("monotone_in_time", r.monotone && r.extrapolated_gap <= 1e-2, m);
  }));

  props.push_back(guarded("critical_points", [&] {
    const auto A = model.kinetic_matrix();
    if (!A || model.form_name() != "quadratic")
      return property("critical_points", true, Json::object(), true, "needs a quadratic kinetic Lagrangian");
    const auto r = verify_P5(u, *A, u.constant(), entry.critical_t, entry.region, 4, seed, {entry.anchor});
    Json m;
    m["t"] = entry.critical_t;
    m["kappa"] = r.kappa;
    m["guaranteed"] = r.guaranteed;
    Json pts = Json::array();
    for (const auto& c : r.critical_points) {
      Json p;
      p["point"] = to_json(c.point);
      p["extremizer"] = to_json(c.extremizer);
      p["u_value"] = c.u_value;
      p["convolved_value"] = c.convolved_value;
      p["preserved"] = c.preserved;
      pts.push_back(p);
    }
    m["critical_points"] = pts;
    m["converse_points"] = to_json(r.converse_points);
    m["converse_failures"] = r.converse_failures;
    if (!r.guaranteed) return property("critical_points", true, m, true, r.note);
    return property("critical_points", r.pass, m);
  }));

  props.push_back(guarded("gradient_limit", [&] {
    const auto r = gradient_limit_p0(u, kernel, entry.anchor, entry.limit_times, copt);
    Json m;
    m["times"] = r.times;
    m["gradients"] = to_json(r.gradients);
    m["limit"] = to_json(r.limit);
    m["p0"] = to_json(r.p0);
    m["gap"] = r.gap;
    return property("gradient_limit", r.pass, m);
  }));

  const bool singular_anchor = [&] {
    try {
      return is_singular(u, entry.anchor, 0.0, sdopt);
    } catch (const Error&) {
      return false;
    }
  }();

  props.push_back(guarded("characteristic", [&] {
    if (!singular_anchor) return property("characteristic", true, Json::object(), true, "anchor is not singular");
    const TraceOptions topt = trace_options(seed, 1);
    const auto trace = propagate_singularity(u, kernel, entry.anchor, entry.trace_t1, entry.trace_steps, topt);
    const auto sd = estimate_superdifferential(u, entry.anchor, sdopt);
    const auto vel = initial_velocity_check(trace, hv, sd);
    const auto nc = noncriticality_check(u, hv, entry.anchor, &trace, sdopt);
    const double max_defect = trace.defects.empty() ? 0.0 : *std::max_element(trace.defects.begin(), trace.defects.end());
    const bool stays_singular = trace.singular_fraction == 1.0;
    const bool velocity_ok = vel.expected.norm() > 1e-9 ? vel.relative_gap <= 0.05 : vel.gap <= 0.05;
    const bool starts_at_x0 = (trace.points.front() - entry.anchor).norm() <= 1e-12;
    // persistence is only asserted when the minimal-energy velocity is nonzero
    const bool persistence_ok = nc.distance > 1e-6 ? stays_singular : true;
    Json m;
    m["steps"] = entry.trace_steps;
    m["t1"] = entry.trace_t1;
    m["end_point"] = to_json(trace.points.back());
    m["singular_fraction"] = trace.singular_fraction;
    m["max_inclusion_defect"] = max_defect;
    m["initial_velocity"] = velocity_json(vel);
    m["noncriticality"] = noncriticality_json(nc);
    const bool pass = starts_at_x0 && persistence_ok && max_defect <= 1e-2 && velocity_ok && nc.injective;
    return property("characteristic", pass, m);
  }));

  props.push_back(guarded("mountain_pass", [&] {
    if (!entry.level || !singular_anchor)
      return property("mountain_pass", true, Json::object(), true, "needs a singular point of a viscosity solution");
    const auto problem = make_barrier_problem(u, kernel, entry.anchor, entry.mountain_t, sdopt);
    const auto mins = global_minimizers(problem);
    Json m;
    m["t"] = entry.mountain_t;
    Json mj = Json::array();
    double worst_fixed_point = 0.0;
    for (const auto& g : mins) {
      Json gj = minimizer_json(g);
      // φ_t(z) + level·t = u(x) at the foot of a calibrated curve
      const double gap = std::abs(g.value + *entry.level * entry.mountain_t - u(entry.anchor));
      gj["level_corrected_gap"] = gap;
      worst_fixed_point = std::max(worst_fixed_point, gap);
      mj.push_back(gj);
    }
    m["minimizers"] = mj;
    if (mins.size() < 2) return property("mountain_pass", false, m, false, "fewer than two global minimizers");
    MountainPassOptions mopt;
    mopt.superdiff = sdopt;
    auto r = mountain_pass(problem, mins, 0, 1, mopt);
    r.classification = classify_dichotomy(r, problem, sdopt);
    m["result"] = to_json(r);
    const double max_min = std::max(mins[0].value, mins[1].value);
    const bool ordered = r.b >= max_min - 1e-9 && r.b >= r.min_value;
    return property("mountain_pass", ordered && r.certified && worst_fixed_point <= 1e-6, m);
  }));

  Json j;
  j["name"] = entry.name;
  j["description"] = entry.description;
  j["t0"] = t0;
  bool pass = true;
  for (const auto& p : props) pass = pass && p["pass"].get<bool>();
  j["pass"] = pass;
  j["properties"] = props;
  return j;
}

VerifyReport verify_all(const std::vector<std::string>& entries, std::uint64_t seed, int jobs) {
  if (entries.empty()) throw ValidationError("catalog selection is empty");
  std::vector<const CatalogEntry*> selected;
  for (const auto& name : entries) selected.push_back(&catalog_entry(name));
  std::vector<Json> results(selected.size());
  parallel_for(selected.size(), jobs, [&](std::size_t i) { results[i] = verify_entry(*selected[i], seed); });
  VerifyReport out;
  out.report["schema_version"] = kSchemaVersion;
  out.report["task"] = "verify";
  out.report["seed"] = seed;
  Json arr = Json::array();
  int failed = 0;
  for (auto& r : results) {
    if (!r["pass"].get<bool>()) ++failed;
    arr.push_back(std::move(r));
  }
  out.pass = failed == 0;
  out.report["entries"] = arr;
  out.report["failed_entries"] = failed;
  out.report["pass"] = out.pass;
  return out;
}

namespace {

std::vector<std::string> verify_selection(const ScenarioDoc& doc) {
  ScenarioDoc sel;
  const auto sec = task_section(doc, "verify");
  if (sec.contains("entries")) sel = sec["entries"];
  else if (doc.contains("catalog")) sel = doc["catalog"];
  else return catalog_names();
  if (sel.is_string()) {
    if (sel == "all") return catalog_names();
    return {sel.get<std::string>()};
  }
  if (!sel.is_array()) throw ValidationError("task.verify.entries must be a name, \"all\" or a list of names");
  std::vector<std::string> names;
  for (const auto& s : sel) {
    if (!s.is_string()) throw ValidationError("task.verify.entries must contain names");
    names.push_back(s.get<std::string>());
  }
  if (names.empty()) throw ValidationError("task.verify.entries: catalog selection is empty");
  return names;
}

}  // namespace

RunOutcome run(const RunOptions& options) {
  RunOutcome outcome;
  Json manifest;
  manifest["schema_version"] = kSchemaVersion;
  manifest["tool"] = "hjs";
  manifest["version"] = kToolVersion;
  manifest["task"] = options.task;
  manifest["started_at"] = utc_now();

  Output out;
  bool have_dir = false;
  try {
    if (std::find(task_names().begin(), task_names().end(), options.task) == task_names().end())
      throw ValidationError("unknown task '" + options.task + "'");
    const Scenario sc = load_scenario(options.scenario, options.overrides);
    manifest["scenario"] = {{"path", sc.source}, {"hash", sc.hash}};
    const std::uint64_t seed = options.seed ? *options.seed : sc.doc.value("seed", std::uint64_t{0});
    manifest["seed"] = seed;
    const int jobs = options.jobs;

    out.formats = {"json", "csv", "dat"};
    if (sc.doc.contains("output") && sc.doc["output"].contains("formats")) {
      out.formats.clear();
      for (const auto& f : sc.doc["output"]["formats"]) out.formats.insert(f.get<std::string>());
    }
    if (options.out) out.dir = *options.out;
    else if (sc.doc.contains("output") && sc.doc["output"].contains("dir")) out.dir = sc.doc["output"]["dir"].get<std::string>();
    else out.dir = "hjs_out";

    // Everything that can fail validation happens before the directory is created.
    std::optional<Problem> pb;
    std::vector<std::string> entries;
    if (options.task == "verify") entries = verify_selection(sc.doc);
    else pb = resolve_problem(sc.doc);

    std::error_code ec;
    fs::create_directories(out.dir, ec);
    if (ec) throw ValidationError("cannot create output directory " + out.dir.string() + ": " + ec.message());
    have_dir = true;
    outcome.out_dir = out.dir;

    if (options.task == "verify") {
      const VerifyReport report = verify_all(entries, seed, jobs);
      Json t0 = Json::object();
      for (const auto& e : report.report["entries"]) t0[e["name"].get<std::string>()] = e["t0"];
      manifest["t0"] = t0;
      Json doc = report.report;
      doc["scenario_hash"] = sc.hash;
      out.json("report.json", doc);
      manifest["status"] = {{"verify", report.pass ? "pass" : "property-violation"}};
      if (!report.pass) {
        outcome.exit_code = kExitProperty;
        outcome.message = std::to_string(report.report["failed_entries"].get<int>()) + " catalog entries have failing properties";
      }
    } else {
      try {
        const ActionKernel kernel(pb->model);
        manifest["t0"] = determine_t0(kernel, pb->anchor, 400, seed);
      } catch (const NumericalError& e) {
        manifest["t0"] = nullptr;
        manifest["t0_error"] = e.what();
      }
      if (options.task == "fundamental") task_fundamental(sc, *pb, seed, out);
      else if (options.task == "regularize") task_regularize(sc, *pb, seed, jobs, out);
      else if (options.task == "characteristic") task_characteristic(sc, *pb, seed, jobs, out);
      else task_mountainpass(sc, *pb, seed, jobs, out);
      manifest["status"] = {{options.task, "ok"}};
    }
    for (const auto& f : out.files)
      if (!fs::exists(out.dir / f)) throw NumericalError("declared output " + f + " was not written");
  } catch (const ValidationError& e) {
    outcome.exit_code = kExitValidation;
    outcome.message = e.what();
    manifest["status"] = {{options.task, "validation-error"}};
  } catch (const NumericalError& e) {
    outcome.exit_code = kExitNumerical;
    outcome.message = e.what();
    manifest["status"] = {{options.task, "numerical-failure"}};
  } catch (const std::exception& e) {
    outcome.exit_code = kExitNumerical;
    outcome.message = e.what();
    manifest["status"] = {{options.task, "numerical-failure"}};
  }
  manifest["exit_code"] = outcome.exit_code;
  if (!outcome.message.empty()) manifest["message"] = outcome.message;
  manifest["files"] = out.files;
  manifest["finished_at"] = utc_now();
  if (have_dir) {
    try {
      write_json(out.dir / "manifest.json", manifest);
    } catch (const std::exception& e) {
      if (outcome.exit_code == kExitOk) {
        outcome.exit_code = kExitNumerical;
        outcome.message = e.what();
      }
    }
  }
  outcome.manifest = std::move(manifest);
  return outcome;
}

}  // namespace hjs
