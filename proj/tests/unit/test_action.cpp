#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "hjs/action.hpp"
#include "support.hpp"

using namespace hjs;

namespace {
// A_t(x,y) for L = v^2/2 - x^2/2
double harmonic_action(double x, double y, double t) {
  return ((x * x + y * y) * std::cos(t) - 2.0 * x * y) / (2.0 * std::sin(t));
}
}  // namespace

TEST_CASE("harmonic oscillator action and derivatives") {
  const auto model = LagrangianModel::mechanical(Matrix::Identity(1, 1), "0.5*x1^2", Vector::Zero(1));
  const double x = 0.3, y = -0.4, t = 0.8;
  const ActionResult r = minimize_action(model, vec({x}), vec({y}), t);
  CHECK(r.value == doctest::Approx(harmonic_action(x, y, t)).epsilon(1e-9));
  CHECK(r.el_residual <= 1e-8);
  CHECK_FALSE(r.multimodal);
  // closed-form partial derivatives
  const double s = std::sin(t), c = std::cos(t);
  CHECK(r.grad_x(0) == doctest::Approx((x * c - y) / s).epsilon(1e-7));
  CHECK(r.grad_y(0) == doctest::Approx((y * c - x) / s).epsilon(1e-7));
  const double dt = -((x * x + y * y) - 2.0 * x * y * c) / (2.0 * s * s);
  CHECK(r.grad_t == doctest::Approx(dt).epsilon(1e-7));
  CHECK(r.energy_stddev <= 1e-8);
  const DerivativeCheck check = action_derivatives(model, r);
  CHECK(check.pass);
}

TEST_CASE("minimizer endpoints are pinned and the curve is sampled uniformly") {
  const auto model = LagrangianModel::quadratic(Matrix::Identity(2, 2));
  ActionOptions opt;
  opt.nodes = 16;
  const ActionResult r = minimize_action(model, vec({0, 0}), vec({1, -1}), 0.5, opt);
  const Curve& c = r.minimizer;
  CHECK((c.nodes.front() - vec({0, 0})).norm() == 0.0);
  CHECK((c.nodes.back() - vec({1, -1})).norm() == 0.0);
  CHECK(c.time(c.segments()) == doctest::Approx(0.5));
  for (const auto& v : c.velocities) CHECK((v - vec({2, -2})).norm() < 1e-8);
}

TEST_CASE("invalid horizons are rejected") {
  const auto model = LagrangianModel::quadratic(Matrix::Identity(1, 1));
  CHECK_THROWS_AS(minimize_action(model, vec({0}), vec({1}), -1.0), ValidationError);
  CHECK_THROWS_AS(minimize_action(model, vec({0}), vec({1, 2}), 1.0), ValidationError);
  CHECK_THROWS_AS(localization_radius(vec({0}), 1.5), ValidationError);
}

TEST_CASE("kernel closed form and numeric path agree") {
  Matrix A = Matrix::Zero(2, 2);
  A.diagonal() << 2.0, 1.0;
  const ActionKernel kernel(LagrangianModel::quadratic(A));
  CHECK(kernel.closed_form());
  const Vector x = vec({0.1, 0.2}), y = vec({-0.3, 0.5});
  const KernelValue k = kernel(x, y, 0.4);
  const ActionResult numeric = minimize_action(kernel.model(), x, y, 0.4);
  CHECK(k.value == doctest::Approx(numeric.value).epsilon(1e-9));
  CHECK((k.grad_from - numeric.grad_x).norm() < 1e-7);
  CHECK((k.grad_to - numeric.grad_y).norm() < 1e-7);
  CHECK(k.grad_t == doctest::Approx(numeric.grad_t).epsilon(1e-7));
}

TEST_CASE("a-priori bound dominates the actual minimizer speed") {
  const auto model = LagrangianModel::mechanical(Matrix::Identity(1, 1), "0.5*x1^2", Vector::Zero(1));
  const double t = 0.1, R = 0.5;
  const AprioriBound bound = apriori_velocity_bound(model, vec({0.0}), R, t);
  CHECK(bound.delta >= bound.speed);
  const ActionResult r = minimize_action(model, vec({0.0}), vec({R}), t);
  double speed = 0.0;
  for (const auto& v : r.minimizer.velocities) speed = std::max(speed, v.norm());
  CHECK(speed <= bound.speed);
  // the default witness for an unbounded potential cannot close the fixed point on long horizons
  CHECK_THROWS_AS(apriori_velocity_bound(model, vec({0.0}), 1.0, 1.0), NumericalError);
}

TEST_CASE("convexity sampling and t0") {
  const ActionKernel quadratic(LagrangianModel::quadratic(Matrix::Identity(1, 1)));
  CHECK(determine_t0(quadratic, vec({0.0})) == doctest::Approx(1.0));
  const ConvexityReport r = verify_convexity(quadratic, vec({0.0}), 0.5, 90, 3);
  CHECK(r.violations == 0);
  // curvature in y of |y-x|^2/(2t) is 1/t
  CHECK(r.curvature_hat == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("equi-Lipschitz check flags velocities that blow up") {
  const auto model = LagrangianModel::quadratic(Matrix::Identity(1, 1));
  std::vector<Curve> straight;
  for (double t : {0.4, 0.2, 0.1}) straight.push_back(minimize_action(model, vec({0}), vec({0.1}), t).minimizer);
  CHECK_FALSE(equi_lipschitz_check(straight).flagged);
  const auto energies = energy_profile(model, straight.front());
  for (double e : energies) CHECK(e == doctest::Approx(energies.front()).epsilon(1e-9));
}
