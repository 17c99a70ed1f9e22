#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hjs/action.hpp"
#include "hjs/scfun.hpp"

namespace hjs {

/// φ_t(y) = u(y) + A_t(y, x) around an anchor x.
struct BarrierProblem {
  SemiconcaveFn u;
  ActionKernel kernel;
  Vector x;
  double t = 0.0;
  std::vector<Vector> covectors;  // estimated D*u(x)
  double sing_tol = 0.0;
};

/// Estimates D*u(x); throws NumericalError when the cluster count is unstable.
BarrierProblem make_barrier_problem(const SemiconcaveFn& u, const ActionKernel& kernel, const Vector& x, double t,
                                    const SuperdiffOptions& options = {});

double barrier_eval(const BarrierProblem& problem, const Vector& y);
Vector barrier_gradient(const BarrierProblem& problem, const Vector& y);

/// φ_t as a semiconcave function with analytic gradient (for certificates).
SemiconcaveFn barrier_function(const BarrierProblem& problem);

struct GlobalMinimizer {
  Vector point;     // z_t^i
  Vector covector;  // p_i
  double value = 0.0;
  double fixed_point_gap = 0.0;  // |φ_t(z) − u(x)|
};

/// Feet of backward calibrated curves: RK4 on (ẋ, ṗ) = (H_p, −H_x) from
/// (x, p_i) backward over [0, t]. Each foot must pass a local-minimum test.
std::vector<GlobalMinimizer> global_minimizers(const BarrierProblem& problem, int steps = 256);

struct Classification {
  std::string kind;  // "singular" or "regular"
  double diameter = 0.0;
  double calibration_defect = 0.0;
  double junction_mismatch = 0.0;
  std::vector<Vector> curve;  // juxtaposed curve on [−T_back, t] (regular case)
  std::vector<double> curve_times;
};

struct MountainPassResult {
  int i = 0, j = 0;
  Vector start, end;
  std::vector<Vector> path;
  double b = 0.0;  // minimax value
  Vector critical_point;
  double critical_value = 0.0;
  double min_value = 0.0;        // min φ_t over the two minimizers
  double certificate = 0.0;      // dist(0, co D⁺φ_t(critical_point))
  bool certified = false;        // certificate <= certificate_tol
  bool collapsed = false;        // critical point fell into an endpoint basin
  int iterations = 0;
  std::optional<Classification> classification;
};

struct MountainPassOptions {
  int path_nodes = 33;
  int iters = 500;
  double certificate_tol = 1e-3;
  SuperdiffOptions superdiff;
};

MountainPassResult mountain_pass(const BarrierProblem& problem, const std::vector<GlobalMinimizer>& minimizers, int i,
                                 int j, const MountainPassOptions& options = {});

/// Singular when x_t ∈ Σ_u; otherwise builds the juxtaposed curve and its
/// calibration defect. Throws NumericalError on a junction velocity mismatch.
Classification classify_dichotomy(const MountainPassResult& result, const BarrierProblem& problem,
                                  const SuperdiffOptions& options = {}, int steps = 256);

}  // namespace hjs
