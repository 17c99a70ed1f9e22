#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hjs/action.hpp"
#include "hjs/scfun.hpp"

namespace hjs {

struct ConvolveOptions {
  bool localized = true;        // sup_convolve only: search B̄(x, R(x,t)) first
  int restarts = 3;
  double search_radius = 0.0;   // global ball radius; <= 0 uses the a-priori bound
  double outer_radius = 1.0;    // R in the a-priori ball B̄(x, Δ·t + R)
  int certificate_samples = 16;
  std::uint64_t seed = 0;
};

struct ConvolutionResult {
  Vector x;
  double t = 0.0;
  double value = 0.0;
  Vector extremizer;  // y_t
  ActionResult extremal;
  std::optional<Vector> gradient;     // DT̆_tu(x) = −D_xA_t(x, y_t)
  double concavity_certificate = 0.0;  // min sampled 8·gap/|a−b|² of ψ_t near y_t
  bool localized = false;              // extremizer found inside B̄(x, R(x,t))
  bool unique = true;                  // restarts agreed
  double search_radius = 0.0;
  std::vector<Vector> alternatives;  // inf_convolve: other minimizers with the same value
};

/// Radius of the global search ball B̄(x, Δ(x,R/t)·t + R).
double global_search_radius(const LagrangianModel& model, const Vector& x, double t, const ConvolveOptions& options);

/// T̆_tu(x) = max_y u(y) − A_t(x,y).
ConvolutionResult sup_convolve(const SemiconcaveFn& u, const ActionKernel& kernel, const Vector& x, double t,
                               const ConvolveOptions& options = {});

/// T_tu(x) = min_y u(y) + A_t(y,x).
ConvolutionResult inf_convolve(const SemiconcaveFn& u, const ActionKernel& kernel, const Vector& x, double t,
                               const ConvolveOptions& options = {});

struct P3Report {
  bool skipped = false;  // L(x,0) > 0
  std::string note;
  std::vector<double> times;
  std::vector<double> values;
  bool monotone = true;
  double worst_decrease = 0.0;
  double gap = 0.0;               // |T̆_{t_min}u(x) − u(x)|
  double extrapolated_gap = 0.0;  // linear extrapolation of the gap to t = 0
};

P3Report verify_P3(const SemiconcaveFn& u, const ActionKernel& kernel, const Vector& x,
                   const std::vector<double>& t_grid, const ConvolveOptions& options = {});

struct P5Check {
  Vector point;
  Vector extremizer;
  double u_value = 0.0;
  double convolved_value = 0.0;
  bool preserved = false;
};

struct P5Report {
  double kappa = 0.0;
  bool guaranteed = false;  // t <= κ/C
  std::string note;
  std::vector<P5Check> critical_points;  // critical points of u
  std::vector<Vector> converse_points;   // critical points of T̆_tu
  int converse_failures = 0;
  bool pass = true;
  double tolerance = 1e-6;
};

/// Critical points of u vs. those of T̆_tu for L = ½⟨Av,v⟩.
P5Report verify_P5(const SemiconcaveFn& u, const Matrix& A, double C, double t, const Box& region, int nsamples,
                   std::uint64_t seed = 0, const std::vector<Vector>& explicit_points = {});

struct P4Report {
  std::vector<double> times;
  std::vector<Vector> gradients;
  std::vector<bool> localized;
  Vector limit;  // linear extrapolation to t = 0 from the three smallest t
  Vector p0;     // minimal-energy covector of D⁺u(x)
  double gap = 0.0;  // |DT̆_{t_min}u(x) − p0|
  bool pass = false;
};

/// lim DT̆_tu(x) as t → 0 compared to the minimal-energy covector.
P4Report gradient_limit_p0(const SemiconcaveFn& u, const ActionKernel& kernel, const Vector& x,
                           const std::vector<double>& t_sequence, const ConvolveOptions& options = {},
                           double tolerance = 1e-2);

struct GridSpec {
  Box box;
  std::vector<int> resolution;  // nodes per axis (>= 1)
};

struct LasryLionsField {
  double t = 0.0;
  std::vector<Vector> points;
  std::vector<double> values;
  std::vector<Vector> gradients;     // from the extremal curves
  std::vector<Vector> fd_gradients;  // central differences on the grid (NaN on the border)
  double upper_bound = 0.0;          // C of u
  double lower_bound = 0.0;          // −Ĉ/t, Ĉ fitted from the kernel
  double max_second_difference = 0.0;
  double min_second_difference = 0.0;
  int violations = 0;
  int localized_count = 0;
};

LasryLionsField lasry_lions_field(const SemiconcaveFn& u, const ActionKernel& kernel, double t, const GridSpec& grid,
                                  const ConvolveOptions& options = {}, int jobs = 1);

/// Ĉ with D²_x A_t(·,y) <= Ĉ/t, sampled near x.
double fit_kernel_curvature(const ActionKernel& kernel, const Vector& x, double t, int nsamples = 32,
                            std::uint64_t seed = 0);

}  // namespace hjs
