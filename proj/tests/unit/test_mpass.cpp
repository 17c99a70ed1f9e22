#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "hjs/mpass.hpp"
#include "support.hpp"

using namespace hjs;

TEST_CASE("barrier function of the 1D kink") {
  const ActionKernel kernel(LagrangianModel::quadratic(Matrix::Identity(1, 1)));
  const auto u = SemiconcaveFn::neg_abs(vec({0.0}));
  const auto problem = make_barrier_problem(u, kernel, vec({0.0}), 0.5);
  CHECK(problem.covectors.size() == 2);
  // phi(y) = -|y| + y^2/(2t)
  CHECK(barrier_eval(problem, vec({0.3})) == doctest::Approx(-0.3 + 0.09).epsilon(1e-12));
  CHECK(barrier_gradient(problem, vec({0.3}))(0) == doctest::Approx(-1.0 + 0.6).epsilon(1e-8));
  const auto mins = global_minimizers(problem);
  REQUIRE(mins.size() == 2);
  for (const auto& m : mins) {
    CHECK(std::abs(m.point(0)) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(m.value == doctest::Approx(-0.25).epsilon(1e-9));
  }
  const auto pass = mountain_pass(problem, mins, 0, 1);
  CHECK(pass.certified);
  CHECK(std::abs(pass.b) < 1e-6);
  CHECK(std::abs(pass.critical_point(0)) < 1e-6);
  CHECK(pass.b >= std::max(mins[0].value, mins[1].value));
  CHECK(classify_dichotomy(pass, problem).kind == "singular");
}

TEST_CASE("kink of planes: minimizers are backward-flow feet") {
  const ActionKernel kernel(LagrangianModel::quadratic(Matrix::Identity(2, 2)));
  const Vector a = vec({1.0, 0.5}), b = vec({-0.5, 1.0});
  const auto u = SemiconcaveFn::min_of_planes({a, b}, {0.0, 0.0});
  const auto problem = make_barrier_problem(u, kernel, vec({0, 0}), 0.5);
  const auto mins = global_minimizers(problem);
  REQUIRE(mins.size() == 2);
  for (const auto& m : mins) {
    const bool at_a = (m.point + 0.5 * a).norm() < 1e-6;
    const bool at_b = (m.point + 0.5 * b).norm() < 1e-6;
    CHECK((at_a || at_b));
  }
  const auto pass = mountain_pass(problem, mins, 0, 1);
  CHECK(pass.certified);
  CHECK(pass.b >= pass.min_value);
}

TEST_CASE("regular critical point: juxtaposed curve is checked for calibration") {
  const ActionKernel kernel(LagrangianModel::mechanical(Matrix::Identity(2, 2), "-2", Vector::Zero(2)));
  const auto u = SemiconcaveFn::expression(2, "-x1^2 + x1 + x2", 2.0);
  BarrierProblem problem{u, kernel, vec({0, 0}), 1.0, {}, 1e-2};
  MountainPassResult r;
  r.critical_point = vec({1.0, -1.0});
  const Classification c = classify_dichotomy(r, problem);
  CHECK(c.kind == "regular");
  CHECK(c.junction_mismatch < 1e-6);
  CHECK(!c.curve.empty());
}
