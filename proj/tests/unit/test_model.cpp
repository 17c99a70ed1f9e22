#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "hjs/expr.hpp"
#include "hjs/hull.hpp"
#include "hjs/model.hpp"
#include "support.hpp"

using namespace hjs;

TEST_CASE("expression evaluation and jets") {
  const auto e = Expression::parse("0.5*x1^2 + sin(x2)*x1 - exp(-x2)", {"x1", "x2"});
  const std::vector<double> args{0.7, -0.3};
  const double exact = 0.5 * 0.49 + std::sin(-0.3) * 0.7 - std::exp(0.3);
  CHECK(e.eval(args) == doctest::Approx(exact).epsilon(1e-14));
  const Jet j = e.eval_jet(args);
  CHECK(j.grad[0] == doctest::Approx(0.7 + std::sin(-0.3)));
  CHECK(j.grad[1] == doctest::Approx(std::cos(-0.3) * 0.7 + std::exp(0.3)));
  CHECK(j.h(0, 0) == doctest::Approx(1.0));
  CHECK(j.h(0, 1) == doctest::Approx(std::cos(-0.3)));
  CHECK(j.h(1, 1) == doctest::Approx(-std::sin(-0.3) * 0.7 - std::exp(0.3)));
}

TEST_CASE("expression rejects unknown identifiers and bad syntax") {
  CHECK_THROWS_AS(Expression::parse("x1 + y", {"x1"}), ValidationError);
  CHECK_THROWS_AS(Expression::parse("x1 +", {"x1"}), ValidationError);
  CHECK_THROWS_AS(Expression::parse("(x1", {"x1"}), ValidationError);
}

TEST_CASE("quadratic Hamiltonian is the dual quadratic form") {
  Matrix A = Matrix::Zero(2, 2);
  A.diagonal() << 2.0, 1.0;
  const auto model = LagrangianModel::quadratic(A);
  const HamiltonianView hv(model);
  const Vector p = vec({0.6, -0.4});
  CHECK(hv.H(Vector::Zero(2), p) == doctest::Approx(0.5 * p.dot(A.inverse() * p)).epsilon(1e-13));
  CHECK((hv.H_p(Vector::Zero(2), p) - A.inverse() * p).norm() < 1e-13);
  CHECK((hv.H_pp(Vector::Zero(2), p) - A.inverse()).norm() < 1e-10);
}

TEST_CASE("mechanical Hamiltonian with drift and potential") {
  const auto model = LagrangianModel::mechanical(Matrix::Identity(2, 2), "x1^2 + 0.5*x2", vec({0.0, 1.0}));
  const HamiltonianView hv(model);
  const Vector x = vec({0.3, -0.2}), p = vec({1.0, 2.0});
  // H = |p|^2/2 + <b,p> + V
  const double exact = 0.5 * p.squaredNorm() + 2.0 + 0.09 - 0.1;
  CHECK(hv.H(x, p) == doctest::Approx(exact).epsilon(1e-13));
  CHECK((hv.H_x(x, p) - vec({0.6, 0.5})).norm() < 1e-6);
}

TEST_CASE("custom Lagrangian Legendre transform matches the closed form") {
  const auto custom = LagrangianModel::custom(1, "0.5*v1^2 - 0.5*x1^2");
  const auto mech = LagrangianModel::mechanical(Matrix::Identity(1, 1), "0.5*x1^2", Vector::Zero(1));
  const Vector x = vec({0.4}), p = vec({-1.3});
  CHECK(legendre(custom, x, p).H == doctest::Approx(legendre(mech, x, p).H).epsilon(1e-10));
  CHECK(custom.L_v(x, vec({0.2}))(0) == doctest::Approx(0.2));
}

TEST_CASE("Tonelli sampling accepts convex models and rejects concave ones") {
  const auto good = LagrangianModel::custom(1, "exp(v1) + exp(-v1) + 0.1*x1^2*v1^2");
  CHECK(check_tonelli(good, cube(1, 1.0), 300).pass);
  const auto bad = LagrangianModel::custom(1, "0.5*v1^2 - 0.2*v1^4");
  const auto report = check_tonelli(bad, cube(1, 1.0), 300);
  CHECK_FALSE(report.pass);
  CHECK(report.violation_count > 0);
}

TEST_CASE("model constructors validate dimensions") {
  CHECK_THROWS_AS(LagrangianModel::quadratic(Matrix::Identity(4, 4)), ValidationError);
  CHECK_THROWS_AS(LagrangianModel::mechanical(Matrix::Identity(2, 2), "0", vec({1.0})), ValidationError);
  Matrix indefinite = Matrix::Identity(2, 2);
  indefinite(1, 1) = -1.0;
  CHECK_THROWS_AS(LagrangianModel::quadratic(indefinite), ValidationError);
}

TEST_CASE("nearest point in a hull and extreme points") {
  const std::vector<Vector> square{vec({1, 1}), vec({-1, 1}), vec({-1, -1}), vec({1, -1}), vec({0, 0.5})};
  const auto inside = nearest_point_in_hull(square, vec({0.2, 0.1}));
  CHECK(inside.distance == doctest::Approx(0.0).epsilon(1e-12));
  const auto outside = nearest_point_in_hull(square, vec({3.0, 0.0}));
  CHECK(outside.distance == doctest::Approx(2.0).epsilon(1e-12));
  CHECK((outside.point - vec({1.0, 0.0})).norm() < 1e-12);
  const auto ext = extreme_points(square, 1e-9);
  CHECK(ext.size() == 4);
  CHECK(diameter(square) == doctest::Approx(std::sqrt(8.0)));
  const std::vector<Vector> segment{vec({1.0, 0.5}), vec({-0.5, 1.0})};
  CHECK((nearest_point_in_hull(segment, Vector::Zero(2)).point - vec({0.25, 0.75})).norm() < 1e-12);
}
