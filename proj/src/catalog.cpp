#include "hjs/catalog.hpp"

namespace hjs {

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

Box cube(int dim, double half) { return Box{Vector::Constant(dim, -half), Vector::Constant(dim, half)}; }

std::vector<CatalogEntry> build() {
  std::vector<CatalogEntry> entries;

  {
    CatalogEntry e;
    e.name = "neg-abs-1d";
    e.description = "L = |v|^2/2, u = -|x|; stationary kink at 0";
    e.model = {{"form", "quadratic"}, {"dim", 1}};
    e.u = {{"form", "neg_abs"}, {"center", {0.0}}};
    e.region = cube(1, 1.0);
    e.anchor = vec({0.0});
    e.level = 0.5;
    e.kinks = {vec({0.0})};
    entries.push_back(e);
  }
  {
    CatalogEntry e;
    e.name = "drift-2d";
    e.description = "L = |v-b|^2/2 with b = (0,1), u = -|x1|; kink line carried by the drift";
    e.model = {{"form", "mechanical"}, {"dim", 2}, {"potential", "0"}, {"drift", {0.0, 1.0}}};
    e.u = {{"form", "neg_abs"}, {"center", {0.0, 0.0}}, {"axes", {0}}};
    e.region = cube(2, 1.0);
    e.anchor = vec({0.0, 0.0});
    e.level = 0.5;
    e.kinks = {vec({0.0, 0.0}), vec({0.0, 0.5}), vec({0.0, -0.5})};
    entries.push_back(e);
  }
  {
    CatalogEntry e;
    e.name = "kink-planes-2d";
    e.description = "L = |v|^2/2, u = min of two planes with |a| = |b|; moving singular line";
    e.model = {{"form", "quadratic"}, {"dim", 2}};
    e.u = {{"form", "min_of_planes"}, {"normals", {{1.0, 0.5}, {-0.5, 1.0}}}, {"offsets", {0.0, 0.0}}};
    e.region = cube(2, 1.0);
    e.anchor = vec({0.0, 0.0});
    e.level = 0.625;
    e.kinks = {vec({0.0, 0.0}), vec({0.3, 0.9}), vec({-0.3, -0.9})};
    entries.push_back(e);
  }
  {
    CatalogEntry e;
    e.name = "concave-quadratic-1d";
    e.description = "L = |v|^2/2, u = -x^2 (C = 2); smooth, single critical point";
    e.model = {{"form", "quadratic"}, {"dim", 1}};
    e.u = {{"form", "expression"}, {"expression", "-x1^2"}, {"C", 2.0}};
    e.region = cube(1, 1.0);
    e.anchor = vec({0.0});
    entries.push_back(e);
  }
  {
    CatalogEntry e;
    e.name = "mech-harmonic-1d";
    e.description = "L = v^2/2 - x^2/2, u = -|x|; numerical fundamental solution";
    e.model = {{"form", "mechanical"}, {"dim", 1}, {"potential", "0.5*x1^2"}};
    e.u = {{"form", "neg_abs"}, {"center", {0.0}}};
    e.region = cube(1, 1.0);
    e.anchor = vec({0.0});
    e.kinks = {vec({0.0})};
    entries.push_back(e);
  }
  return entries;
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = build();
  return entries;
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> names;
  for (const auto& e : catalog()) names.push_back(e.name);
  return names;
}

const CatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  std::string known;
  for (const auto& n : catalog_names()) known += (known.empty() ? "" : ", ") + n;
  throw ValidationError("unknown catalog entry '" + name + "' (known: " + known + ")");
}

}  // namespace hjs
