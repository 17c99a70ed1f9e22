#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "hjs/scfun.hpp"
#include "support.hpp"

using namespace hjs;

TEST_CASE("superdifferential of -|x| at the kink is [-1, 1]") {
  const auto u = SemiconcaveFn::neg_abs(vec({0.0}));
  const Superdifferential sd = estimate_superdifferential(u, vec({0.0}));
  REQUIRE(sd.hull_vertices.size() == 2);
  std::vector<double> ends{sd.hull_vertices[0](0), sd.hull_vertices[1](0)};
  std::sort(ends.begin(), ends.end());
  CHECK(ends[0] == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(ends[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sd.diameter == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(sd.stable);
  CHECK(is_singular(u, vec({0.0})));
  CHECK_FALSE(is_singular(u, vec({0.3})));
}

TEST_CASE("superdifferential of a min of planes is the segment of normals") {
  const auto u = SemiconcaveFn::min_of_planes({vec({1.0, 0.5}), vec({-0.5, 1.0})}, {0.0, 0.0});
  const Superdifferential sd = estimate_superdifferential(u, vec({0.0, 0.0}));
  CHECK(sd.hull_vertices.size() == 2);
  CHECK(sd.diameter == doctest::Approx(std::sqrt(2.5)).epsilon(1e-6));
}

TEST_CASE("three planes meeting at a point give a triangle") {
  const auto u = SemiconcaveFn::min_of_planes({vec({1, 0}), vec({-1, 0}), vec({0, 1})}, {0, 0, 0});
  const Superdifferential sd = estimate_superdifferential(u, vec({0.0, 0.0}));
  CHECK(sd.hull_vertices.size() == 3);
}

TEST_CASE("semiconcavity constants are checked on both inequalities") {
  const Box region = cube(2, 1.0);
  CHECK(semiconcavity_check(SemiconcaveFn::expression(2, "x1^2 + x2^2", 2.0), region, 2.0, 300).pass);
  CHECK_FALSE(semiconcavity_check(SemiconcaveFn::expression(2, "x1^2 + x2^2", 2.0), region, 1.0, 300).pass);
  CHECK(semiconcavity_check(SemiconcaveFn::neg_abs(vec({0, 0})), region, 0.0, 300).pass);
  CHECK(semiconcavity_check(SemiconcaveFn::neg_distance_to_set({vec({0.5, 0}), vec({-0.5, 0})}),
                            Box{vec({0.1, -1}), vec({1, 1})}, 0.0, 300)
            .pass);
}

TEST_CASE("complete linkage groups points within the tolerance") {
  const std::vector<Vector> pts{vec({0.0}), vec({1e-4}), vec({1.0}), vec({1.0 + 2e-4}), vec({-1.0})};
  const auto labels = complete_linkage(pts, 1e-3);
  CHECK(labels[0] == labels[1]);
  CHECK(labels[2] == labels[3]);
  CHECK(labels[0] != labels[2]);
  CHECK(labels[4] != labels[0]);
}

TEST_CASE("minimal-energy covector is the metric projection of the origin") {
  const HamiltonianView hv(LagrangianModel::quadratic(Matrix::Identity(2, 2)));
  const auto u = SemiconcaveFn::min_of_planes({vec({1.0, 0.5}), vec({-0.5, 1.0})}, {0.0, 0.0});
  const MinimalEnergy me = minimal_energy_covector(hv, estimate_superdifferential(u, vec({0, 0})));
  CHECK((me.p0 - vec({0.25, 0.75})).norm() < 1e-8);
  CHECK(me.energy == doctest::Approx(0.3125).epsilon(1e-8));

  Matrix A = Matrix::Zero(1, 1);
  A(0, 0) = 4.0;
  const HamiltonianView hv1(LagrangianModel::quadratic(A));
  const auto kink = SemiconcaveFn::min_of_planes({vec({2.0}), vec({-1.0})}, {0.0, 0.0});
  CHECK(std::abs(minimal_energy_covector(hv1, estimate_superdifferential(kink, vec({0.0}))).p0(0)) < 1e-8);
}

TEST_CASE("viscosity check: -|x| solves |p|^2/2 = 1/2, |x| does not") {
  const HamiltonianView hv(LagrangianModel::quadratic(Matrix::Identity(1, 1)));
  const Box region = cube(1, 1.0);
  CHECK(viscosity_check(SemiconcaveFn::neg_abs(vec({0.0})), hv, region, 100, 0.5, 0, {vec({0.0})}).pass);
  const auto convex_kink = SemiconcaveFn::callable(
      1, [](const Vector& x) { return std::abs(x(0)); }, std::nullopt, 0.0, "abs");
  CHECK_FALSE(viscosity_check(convex_kink, hv, region, 100, 0.5, 0, {vec({0.0})}).pass);
  CHECK_FALSE(viscosity_check(SemiconcaveFn::neg_abs(vec({0.0})), hv, region, 100, 1.0, 0, {}).pass);
}
