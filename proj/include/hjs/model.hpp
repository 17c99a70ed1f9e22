#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hjs/expr.hpp"
#include "hjs/types.hpp"

namespace hjs {

/// L(x,v) = ½⟨Av,v⟩.
struct QuadraticKinetic {
  Matrix A;
};

/// L(x,v) = ½⟨A(v−b),(v−b)⟩ − V(x).
struct Mechanical {
  Matrix A;
  Expression potential;  // over x1..xn
  Vector drift;
};

/// L given by an expression over x1..xn, v1..vn; derivatives by forward-mode jets.
struct Custom {
  Expression lagrangian;
};

/// Value and first/second derivatives of L at one (x, v).
struct LagrangianJet {
  double value = 0.0;
  Vector Lx, Lv;
  Matrix Lxx, Lxv, Lvv;  // Lxv(i,k) = ∂²L/∂x_i∂v_k
};

/// User-declared witnesses for the growth conditions; absent fields fall back
/// to per-form defaults (none exist for Custom).
struct TonelliWitness {
  std::optional<Expression> theta;  // over r
  std::optional<double> c0;
  std::optional<Expression> c1;  // over x1..xn, R
};

/// A Tonelli Lagrangian on R^n, 1 <= n <= 3.
class LagrangianModel {
 public:
  using Form = std::variant<QuadraticKinetic, Mechanical, Custom>;

  static LagrangianModel quadratic(Matrix A);
  static LagrangianModel mechanical(Matrix A, const std::string& potential, Vector drift);
  static LagrangianModel custom(int dim, const std::string& lagrangian);

  int dim() const { return dim_; }
  const Form& form() const { return form_; }
  std::string form_name() const;

  double eval(const Vector& x, const Vector& v) const;
  Vector L_v(const Vector& x, const Vector& v) const;
  LagrangianJet jet(const Vector& x, const Vector& v) const;

  /// True when L does not depend on x; then A_t(x,y) = t·L((y−x)/t).
  bool position_independent() const { return position_independent_; }

  /// The kinetic matrix A for the Quadratic and Mechanical forms.
  std::optional<Matrix> kinetic_matrix() const;
  /// The drift b of the Mechanical form, zero otherwise.
  Vector drift() const;

  /// V(x), ∇V(x), ∇²V(x) for the Mechanical form.
  LagrangianJet potential_jet(const Vector& x) const;

  TonelliWitness& witness() { return witness_; }
  const TonelliWitness& witness() const { return witness_; }

  /// θ(r): declared, or the form default. Empty for an undeclared Custom model.
  std::optional<double> theta(double r) const;
  /// c0 valid on B̄(x,R).
  std::optional<double> c0(const Vector& x, double R) const;
  /// c1(x,R).
  std::optional<double> c1(const Vector& x, double R) const;
  bool has_declared_c1() const { return witness_.c1.has_value(); }

 private:
  LagrangianModel(int dim, Form form);

  int dim_ = 1;
  Form form_;
  bool position_independent_ = false;
  TonelliWitness witness_;
};

struct LegendreResult {
  double H = 0.0;
  Vector v_star;
};

/// Legendre dual H(x,p) = sup_v ⟨p,v⟩ − L(x,v) of a model.
class HamiltonianView {
 public:
  explicit HamiltonianView(LagrangianModel model, double tol = 1e-12, int max_iter = 100);

  const LagrangianModel& model() const { return model_; }

  LegendreResult legendre(const Vector& x, const Vector& p) const;
  double H(const Vector& x, const Vector& p) const { return legendre(x, p).H; }
  Vector H_p(const Vector& x, const Vector& p) const { return legendre(x, p).v_star; }
  Vector H_x(const Vector& x, const Vector& p) const;
  Matrix H_pp(const Vector& x, const Vector& p) const;

 private:
  LagrangianModel model_;
  double tol_;
  int max_iter_;
};

/// (H, v*) with L_v(x, v*) = p; closed form for Quadratic and Mechanical,
/// damped Newton on v ↦ L(x,v) − ⟨p,v⟩ otherwise.
LegendreResult legendre(const LagrangianModel& model, const Vector& x, const Vector& p, double tol = 1e-12,
                        int max_iter = 100);

struct TonelliViolation {
  std::string condition;  // "convexity", "growth", "derivative-growth", "theta-monotone"
  Vector x;
  Vector v;
  double amount = 0.0;
};

struct TonelliReport {
  bool pass = true;
  int samples = 0;
  double min_hessian_eigenvalue = 0.0;
  bool growth_checked = false;
  bool derivative_checked = false;
  double worst_growth_gap = 0.0;      // max of θ(|v|) − c0 − L
  double worst_derivative_gap = 0.0;  // max of |L_x|+|L_v| − c1θ
  int violation_count = 0;
  std::vector<TonelliViolation> violations;  // first few only
};

/// Samples positive-definite L_vv, growth above theta and the derivative bound
/// on region × {|v| <= max_speed}.
TonelliReport check_tonelli(const LagrangianModel& model, const Box& region, int nsamples = 1000,
                            std::uint64_t seed = 0, double max_speed = 10.0);

}  // namespace hjs
