#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hjs/operators.hpp"
#include "support.hpp"

using namespace hjs;

namespace {
const ActionKernel& free_kernel_1d() {
  static const ActionKernel k(LagrangianModel::quadratic(Matrix::Identity(1, 1)));
  return k;
}
}  // namespace

TEST_CASE("sup-convolution of -|x| with the free kernel") {
  const auto u = SemiconcaveFn::neg_abs(vec({0.0}));
  // sup_y -|y| - (y-x)^2/(2t): y = x - t sign(x) when |x| >= t
  const auto far = sup_convolve(u, free_kernel_1d(), vec({0.6}), 0.2);
  CHECK(far.value == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(far.extremizer(0) == doctest::Approx(0.4).epsilon(1e-9));
  REQUIRE(far.gradient);
  CHECK((*far.gradient)(0) == doctest::Approx(-1.0).epsilon(1e-8));
  // |x| < t: y = 0, value -x^2/(2t)
  const auto near = sup_convolve(u, free_kernel_1d(), vec({0.05}), 0.2);
  CHECK(near.value == doctest::Approx(-0.05 * 0.05 / 0.4).epsilon(1e-10));
  CHECK(std::abs(near.extremizer(0)) < 1e-9);
  CHECK(near.localized);
  CHECK(near.unique);
}

TEST_CASE("inf-convolution of -|x| splits at the origin") {
  const auto u = SemiconcaveFn::neg_abs(vec({0.0}));
  // inf_y -|y| + (y-x)^2/(2t): y = x + t sign(x)
  const auto r = inf_convolve(u, free_kernel_1d(), vec({0.5}), 0.2);
  CHECK(r.value == doctest::Approx(-0.6).epsilon(1e-7));
  CHECK(r.extremizer(0) == doctest::Approx(0.7).epsilon(1e-5));
  const auto at_kink = inf_convolve(u, free_kernel_1d(), vec({0.0}), 0.2);
  CHECK(at_kink.value == doctest::Approx(-0.1).epsilon(1e-7));
  CHECK(at_kink.alternatives.size() == 1);
}

TEST_CASE("sup-convolution with a position-dependent kernel") {
  const ActionKernel harmonic(LagrangianModel::mechanical(Matrix::Identity(1, 1), "0.5*x1^2", Vector::Zero(1)));
  const auto u = SemiconcaveFn::expression(1, "-x1^2", 2.0);
  // sup_y -y^2 - ((x^2+y^2)cos t - 2xy)/(2 sin t)
  const double x = 0.3, t = 0.2, s = std::sin(t), c = std::cos(t);
  const double y = x / (2.0 * s + c);
  const double exact = -y * y - ((x * x + y * y) * c - 2.0 * x * y) / (2.0 * s);
  const auto r = sup_convolve(u, harmonic, vec({x}), t);
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-7));
  CHECK(r.extremizer(0) == doctest::Approx(y).epsilon(1e-5));
}

TEST_CASE("monotonicity in t is skipped when the rest Lagrangian is positive") {
  const ActionKernel drift(LagrangianModel::mechanical(Matrix::Identity(1, 1), "0", vec({1.0})));
  const auto u = SemiconcaveFn::neg_abs(vec({0.0}));
  CHECK(verify_P3(u, drift, vec({0.0}), {0.1, 0.2}).skipped);
  const auto r = verify_P3(u, free_kernel_1d(), vec({0.7}), {0.05, 0.1, 0.2});
  CHECK(r.monotone);
  CHECK(r.values[0] <= r.values[1]);
}

TEST_CASE("critical points of a concave quadratic survive at t = kappa / C") {
  const auto u = SemiconcaveFn::expression(1, "-x1^2", 2.0);
  const auto r = verify_P5(u, Matrix::Identity(1, 1), 2.0, 0.5, cube(1, 1.0), 4);
  CHECK(r.guaranteed);
  CHECK(r.pass);
  CHECK_FALSE(verify_P5(u, Matrix::Identity(1, 1), 2.0, 0.8, cube(1, 1.0), 4).guaranteed);
}

TEST_CASE("gradient limit on the symmetric kink is zero") {
  const auto u = SemiconcaveFn::neg_abs(vec({0.0}));
  const auto r = gradient_limit_p0(u, free_kernel_1d(), vec({0.0}), {0.2, 0.1, 0.05});
  CHECK(r.pass);
  CHECK(std::abs(r.p0(0)) < 1e-8);
}

TEST_CASE("regularized field is C11 with one-sided bounds") {
  const ActionKernel kernel(LagrangianModel::quadratic(Matrix::Identity(2, 2)));
  const auto u = SemiconcaveFn::min_of_planes({vec({1.0, 0.5}), vec({-0.5, 1.0})}, {0.0, 0.0});
  const GridSpec grid{cube(2, 0.5), {7, 5}};
  const auto field = lasry_lions_field(u, kernel, 0.2, grid, {}, 2);
  CHECK(field.points.size() == 35);
  CHECK(field.violations == 0);
  CHECK(field.max_second_difference <= 1e-8);
  // interior nodes: central differences agree with the extremal gradients
  for (std::size_t i = 0; i < field.points.size(); ++i)
    if (std::isfinite(field.fd_gradients[i](0))) CHECK(std::abs(field.fd_gradients[i](0) - field.gradients[i](0)) < 0.2);
}

TEST_CASE("convolution inputs are validated") {
  const auto u = SemiconcaveFn::neg_abs(vec({0.0}));
  CHECK_THROWS_AS(sup_convolve(u, free_kernel_1d(), vec({0.0}), 0.0), ValidationError);
  CHECK_THROWS_AS(sup_convolve(u, free_kernel_1d(), vec({0.0, 1.0}), 0.1), ValidationError);
}
