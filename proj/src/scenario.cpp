#include "hjs/scenario.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hjs {

namespace {

enum class Kind { Number, Integer, Boolean, String, Array, Object, Any };

struct Field {
  Kind kind;
  bool positive = false;  // numbers: must be > 0
};

using Schema = std::map<std::string, Field>;

const Schema& model_schema() {
  static const Schema s{{"form", {Kind::String}},     {"dim", {Kind::Integer}},     {"A", {Kind::Any}},
                        {"potential", {Kind::String}}, {"drift", {Kind::Array}},   {"lagrangian", {Kind::String}},
                        {"theta", {Kind::String}},    {"c0", {Kind::Number}},      {"c1", {Kind::String}}};
  return s;
}

const Schema& u_schema() {
  static const Schema s{{"form", {Kind::String}},   {"center", {Kind::Array}},  {"axes", {Kind::Array}},
                        {"weight", {Kind::Number}}, {"normals", {Kind::Array}}, {"offsets", {Kind::Array}},
                        {"points", {Kind::Array}},  {"expression", {Kind::String}}, {"C", {Kind::Number}}};
  return s;
}

const std::map<std::string, Schema>& task_schemas() {
  static const std::map<std::string, Schema> s{
      {"fundamental",
       {{"x", {Kind::Array}}, {"y", {Kind::Array}}, {"t", {Kind::Number, true}}, {"nodes", {Kind::Integer}},
        {"restarts", {Kind::Integer}}, {"substeps", {Kind::Integer}}, {"el_tolerance", {Kind::Number, true}},
        {"check_derivatives", {Kind::Boolean}}}},
      {"regularize",
       {{"t", {Kind::Number, true}}, {"lower", {Kind::Array}}, {"upper", {Kind::Array}}, {"resolution", {Kind::Array}},
        {"localized", {Kind::Boolean}}, {"search_radius", {Kind::Number, true}}}},
      {"characteristic",
       {{"x0", {Kind::Array}}, {"t1", {Kind::Number, true}}, {"nsteps", {Kind::Integer}},
        {"sing_tol", {Kind::Number, true}}, {"search_radius", {Kind::Number, true}}}},
      {"mountainpass",
       {{"x", {Kind::Array}}, {"t", {Kind::Number, true}}, {"path_nodes", {Kind::Integer}},
        {"iters", {Kind::Integer}}}},
      {"verify", {{"entries", {Kind::Any}}}},
  };
  return s;
}

bool matches(const ScenarioDoc& v, Kind kind) {
  switch (kind) {
    case Kind::Number: return v.is_number();
    case Kind::Integer: return v.is_number_integer();
    case Kind::Boolean: return v.is_boolean();
    case Kind::String: return v.is_string();
    case Kind::Array: return v.is_array();
    case Kind::Object: return v.is_object();
    case Kind::Any: return true;
  }
  return false;
}

const char* kind_name(Kind kind) {
  switch (kind) {
    case Kind::Number: return "a number";
    case Kind::Integer: return "an integer";
    case Kind::Boolean: return "a boolean";
    case Kind::String: return "a string";
    case Kind::Array: return "an array";
    case Kind::Object: return "an object";
    case Kind::Any: return "any value";
  }
  return "";
}

void check_section(const ScenarioDoc& section, const Schema& schema, const std::string& prefix) {
  if (!section.is_object()) throw ValidationError(prefix + ": expected an object");
  for (auto it = section.begin(); it != section.end(); ++it) {
    const std::string path = prefix + "." + it.key();
    const auto f = schema.find(it.key());
    if (f == schema.end()) throw ValidationError("unknown key '" + path + "'");
    if (!matches(it.value(), f->second.kind))
      throw ValidationError(path + " must be " + kind_name(f->second.kind));
    if (f->second.positive && !(it.value().get<double>() > 0.0)) throw ValidationError(path + " must be > 0");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void apply_override(ScenarioDoc& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ValidationError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  ScenarioDoc value;
  try {
    value = ScenarioDoc::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    value = text;
  }
  ScenarioDoc* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ValidationError("override key '" + key + "' has an empty component");
    if (!node->is_object()) {
      if (!node->is_null()) throw ValidationError("override key '" + key + "' descends into a non-object");
      *node = ScenarioDoc::object();
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

void validate_scenario(const ScenarioDoc& doc) {
  if (!doc.is_object()) throw ValidationError("scenario: top level must be an object");
  static const std::set<std::string> top{"model", "u", "catalog", "task", "seed", "output"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!top.count(it.key())) throw ValidationError("unknown key '" + it.key() + "'");
  if (doc.contains("model")) check_section(doc["model"], model_schema(), "model");
  if (doc.contains("u")) check_section(doc["u"], u_schema(), "u");
  if (doc.contains("seed") && !(doc["seed"].is_number_unsigned() || (doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0)))
    throw ValidationError("seed must be a non-negative integer");
  if (doc.contains("catalog") && !(doc["catalog"].is_string() || doc["catalog"].is_array()))
    throw ValidationError("catalog must be a name or a list of names");
  if (doc.contains("output")) {
    check_section(doc["output"], Schema{{"dir", {Kind::String}}, {"formats", {Kind::Array}}}, "output");
    if (doc["output"].contains("formats"))
      for (const auto& f : doc["output"]["formats"])
        if (!f.is_string() || (f != "json" && f != "csv" && f != "dat"))
          throw ValidationError("output.formats entries must be \"json\", \"csv\" or \"dat\"");
  }
  if (doc.contains("task")) {
    const auto& task = doc["task"];
    if (!task.is_object()) throw ValidationError("task: expected an object");
    for (auto it = task.begin(); it != task.end(); ++it) {
      const auto s = task_schemas().find(it.key());
      if (s == task_schemas().end()) throw ValidationError("unknown key 'task." + it.key() + "'");
      check_section(it.value(), s->second, "task." + it.key());
    }
  }
  if (doc.contains("model")) {
    const auto& m = doc["model"];
    if (!m.contains("form")) throw ValidationError("model.form is required");
    const std::string form = m["form"];
    if (form != "quadratic" && form != "mechanical" && form != "custom")
      throw ValidationError("model.form must be quadratic, mechanical or custom");
    if (m.contains("dim") && (m["dim"].get<int>() < 1 || m["dim"].get<int>() > 3))
      throw ValidationError("model.dim must be 1, 2 or 3");
    if (form == "custom" && !m.contains("lagrangian")) throw ValidationError("model.lagrangian is required for custom");
  }
  if (doc.contains("u")) {
    const auto& u = doc["u"];
    if (!u.contains("form")) throw ValidationError("u.form is required");
    const std::string form = u["form"];
    if (form != "neg_abs" && form != "min_of_planes" && form != "neg_distance_to_set" && form != "expression")
      throw ValidationError("u.form must be neg_abs, min_of_planes, neg_distance_to_set or expression");
    if (u.contains("C") && u["C"].get<double>() < 0.0) throw ValidationError("u.C must be >= 0");
  }
}

Scenario scenario_from_json(ScenarioDoc doc, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) apply_override(doc, o);
  validate_scenario(doc);
  Scenario s;
  s.doc = std::move(doc);
  s.hash = fnv1a_hex(s.doc.dump());
  return s;
}

Scenario load_scenario(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  ScenarioDoc doc;
  try {
    doc = ScenarioDoc::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("scenario " + path.string() + " is not valid JSON: " + e.what());
  }
  Scenario s = scenario_from_json(std::move(doc), overrides);
  s.source = path.string();
  return s;
}

Vector vector_field(const ScenarioDoc& node, const std::string& name) {
  if (!node.is_array()) throw ValidationError(name + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) throw ValidationError(name + " must be an array of numbers");
    v(static_cast<Eigen::Index>(i)) = node[i].get<double>();
  }
  return v;
}

Matrix matrix_field(const ScenarioDoc& node, int dim, const std::string& name) {
  if (node.is_number()) return node.get<double>() * Matrix::Identity(dim, dim);
  if (!node.is_array() || static_cast<int>(node.size()) != dim)
    throw ValidationError(name + " must be a number, a diagonal of length dim, or a dim x dim matrix");
  if (node[0].is_number()) return vector_field(node, name).asDiagonal();
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const Vector row = vector_field(node[i], name);
    if (row.size() != dim) throw ValidationError(name + " must be dim x dim");
    m.row(i) = row.transpose();
  }
  return m;
}

LagrangianModel build_model(const ScenarioDoc& m) {
  const std::string form = m.at("form");
  int dim = m.value("dim", 0);
  if (dim == 0 && m.contains("drift")) dim = static_cast<int>(m["drift"].size());
  if (dim == 0 && m.contains("A") && m["A"].is_array()) dim = static_cast<int>(m["A"].size());
  if (dim == 0) dim = 1;
  if (dim < 1 || dim > 3) throw ValidationError("model.dim must be 1, 2 or 3");
  const Matrix A = m.contains("A") ? matrix_field(m["A"], dim, "model.A") : Matrix::Identity(dim, dim);
  LagrangianModel model = [&] {
    if (form == "quadratic") return LagrangianModel::quadratic(A);
    if (form == "mechanical") {
      const Vector drift = m.contains("drift") ? vector_field(m["drift"], "model.drift") : Vector::Zero(dim);
      if (drift.size() != dim) throw ValidationError("model.drift must have length dim");
      return LagrangianModel::mechanical(A, m.value("potential", std::string("0")), drift);
    }
    return LagrangianModel::custom(dim, m.at("lagrangian").get<std::string>());
  }();
  if (m.contains("theta")) model.witness().theta = Expression::parse(m["theta"], {"r"});
  if (m.contains("c0")) model.witness().c0 = m["c0"].get<double>();
  if (m.contains("c1")) {
    auto names = position_variable_names(dim);
    names.push_back("R");
    model.witness().c1 = Expression::parse(m["c1"], names);
  }
  return model;
}

SemiconcaveFn build_u(const ScenarioDoc& u, int dim) {
  const std::string form = u.at("form");
  auto check = [&](const Vector& v, const std::string& name) {
    if (v.size() != dim) throw ValidationError(name + " must have length " + std::to_string(dim));
    return v;
  };
  SemiconcaveFn fn = [&] {
    if (form == "neg_abs") {
      const Vector center = u.contains("center") ? check(vector_field(u["center"], "u.center"), "u.center") : Vector::Zero(dim);
      std::vector<int> axes;
      if (u.contains("axes"))
        for (const auto& a : u["axes"]) {
          if (!a.is_number_integer()) throw ValidationError("u.axes must be integers");
          axes.push_back(a.get<int>());
        }
      return SemiconcaveFn::neg_abs(center, axes, u.value("weight", 1.0));
    }
    if (form == "min_of_planes") {
      if (!u.contains("normals")) throw ValidationError("u.normals is required for min_of_planes");
      std::vector<Vector> normals;
      for (const auto& a : u["normals"]) normals.push_back(check(vector_field(a, "u.normals"), "u.normals"));
      std::vector<double> offsets;
      if (u.contains("offsets"))
        for (const auto& c : u["offsets"]) {
          if (!c.is_number()) throw ValidationError("u.offsets must be numbers");
          offsets.push_back(c.get<double>());
        }
      return SemiconcaveFn::min_of_planes(normals, offsets);
    }
    if (form == "neg_distance_to_set") {
      if (!u.contains("points")) throw ValidationError("u.points is required for neg_distance_to_set");
      std::vector<Vector> points;
      for (const auto& p : u["points"]) points.push_back(check(vector_field(p, "u.points"), "u.points"));
      return SemiconcaveFn::neg_distance_to_set(points);
    }
    if (!u.contains("expression")) throw ValidationError("u.expression is required");
    return SemiconcaveFn::expression(dim, u["expression"], u.value("C", 0.0));
  }();
  if (u.contains("C")) fn.set_constant(u["C"].get<double>());
  return fn;
}

}  // namespace hjs
