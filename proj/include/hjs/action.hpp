#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hjs/model.hpp"
#include "hjs/types.hpp"

namespace hjs {

struct ActionOptions {
  int nodes = 64;              // N; the curve has N+1 nodes
  int restarts = 5;            // K randomized restarts of the discrete phase
  int substeps = 4;            // RK4 steps per node interval in the shooting phase
  double el_tolerance = 1e-8;  // target for ActionResult::el_residual
  int max_newton = 60;
  std::uint64_t seed = 0;
};

/// Arc ξ on the uniform grid s_i = i·t/N with velocities and dual arc p = L_v(ξ, ξ̇).
struct Curve {
  double t_end = 0.0;
  std::vector<Vector> nodes;
  std::vector<Vector> velocities;
  std::vector<Vector> dual_arc;

  std::size_t segments() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  double time(std::size_t i) const { return t_end * static_cast<double>(i) / static_cast<double>(segments()); }
};

struct ActionResult {
  Vector x, y;
  double t = 0.0;
  double value = 0.0;  // A_t(x,y)
  Curve minimizer;
  Vector grad_x;  // D_xA_t
  Vector grad_y;  // D_yA_t
  double grad_t = 0.0;
  double energy = 0.0;
  double energy_stddev = 0.0;
  double el_residual = 0.0;
  bool multimodal = false;
};

/// Fundamental solution A_t(x,y): discrete trapezoidal action minimized by
/// Newton from the straight segment (plus randomized restarts), then refined
/// by Newton shooting on the Euler–Lagrange equation.
ActionResult minimize_action(const LagrangianModel& model, const Vector& x, const Vector& y, double t,
                             const ActionOptions& options = {});

struct ActionDerivatives {
  Vector grad_x;
  Vector grad_y;
  double grad_t = 0.0;
};

/// D_yA = L_v(ξ(t), ξ̇(t)), D_xA = −L_v(ξ(0), ξ̇(0)), D_tA = −E on a refined curve.
ActionDerivatives derivative_formulas(const LagrangianModel& model, const Curve& curve);

struct DerivativeCheck {
  ActionDerivatives analytic;
  ActionDerivatives finite_difference;
  double max_relative_error = 0.0;  // |a − f| / (1 + |a|), worst component
  bool pass = false;
};

/// Analytic derivatives of `result` cross-checked against central finite
/// differences of minimize_action. Throws NumericalError when el_residual is
/// above tolerance or the check fails.
DerivativeCheck action_derivatives(const LagrangianModel& model, const ActionResult& result,
                                   const ActionOptions& options = {}, double tolerance = 1e-4,
                                   double fd_step = 1e-4);

/// Kernel value and its three partial derivatives.
struct KernelValue {
  double value = 0.0;
  Vector grad_from;
  Vector grad_to;
  double grad_t = 0.0;
};

/// (from, to, t) ↦ A_t(from, to). Uses t·L((to−from)/t) when L is
/// position independent, minimize_action otherwise.
class ActionKernel {
 public:
  explicit ActionKernel(LagrangianModel model, ActionOptions options = inner_options());

  static ActionOptions inner_options() {
    ActionOptions o;
    o.restarts = 1;
    o.nodes = 32;
    return o;
  }

  const LagrangianModel& model() const { return model_; }
  const ActionOptions& options() const { return options_; }
  bool closed_form() const { return model_.position_independent(); }

  KernelValue operator()(const Vector& from, const Vector& to, double t) const;
  double value(const Vector& from, const Vector& to, double t) const { return (*this)(from, to, t).value; }

  /// Full result including the minimizing curve.
  ActionResult solve(const Vector& from, const Vector& to, double t) const;

 private:
  LagrangianModel model_;
  ActionOptions options_;
};

struct AprioriBound {
  double delta = 0.0;       // Δ = max of the three bounds below
  double speed = 0.0;       // sup |ξ̇|
  double momentum = 0.0;    // sup |p|
  double position = 0.0;    // sup |ξ − x|
  double mean_speed = 0.0;  // (1/t)∫|ξ̇|
};

/// Constructive a-priori bound for minimizers from x to y ∈ B̄(x,R) in time t.
AprioriBound apriori_velocity_bound(const LagrangianModel& model, const Vector& x, double R, double t);

/// R(x,t) = t/2.
double localization_radius(const Vector& x, double t);

/// Q = A_{t+h}(x,y+z) + A_{t−h}(x,y−z) − 2A_t(x,y).
double convexity_second_difference(const ActionKernel& kernel, const Vector& x, const Vector& y, double t,
                                   double h, const Vector& z);

struct ConvexityReport {
  double t = 0.0;
  int samples = 0;
  int violations = 0;
  double min_q = 0.0;
  double c1_hat = 0.0;         // min Q·t³/h² over z = 0 samples
  double c2_hat = 0.0;         // min Q·t/|z|² over h = 0 samples
  double curvature_hat = 0.0;  // min Q/|z|² over h = 0 samples
  double noise_tolerance = 1e-8;
};

ConvexityReport verify_convexity(const ActionKernel& kernel, const Vector& x, double t, int nsamples = 200,
                                 std::uint64_t seed = 0, double noise_tolerance = 1e-8);

/// Largest t = 2^-k <= 1 at which nsamples second differences are all >= -1e-8.
/// Sampling stops at the first violation of each candidate.
double determine_t0(const ActionKernel& kernel, const Vector& x, int nsamples = 400, std::uint64_t seed = 0,
                    int max_halvings = 10);

struct EquiLipschitzReport {
  std::vector<double> constants;  // per curve
  double max_constant = 0.0;
  double growth_slope = 0.0;  // d log(constant) / d log(1/t)
  bool flagged = false;
};

EquiLipschitzReport equi_lipschitz_check(std::span<const Curve> curves);

/// H(ξ_i, p_i) along a curve.
std::vector<double> energy_profile(const LagrangianModel& model, const Curve& curve);

}  // namespace hjs
