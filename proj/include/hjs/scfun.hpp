#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hjs/expr.hpp"
#include "hjs/model.hpp"
#include "hjs/types.hpp"

namespace hjs {

/// A semiconcave function u with declared constant C >= 0.
class SemiconcaveFn {
 public:
  using Evaluator = std::function<double(const Vector&)>;
  using Gradient = std::function<Vector(const Vector&)>;

  /// u(x) = −weight·|P(x − center)| where P keeps the listed axes (all when empty).
  static SemiconcaveFn neg_abs(Vector center, std::vector<int> axes = {}, double weight = 1.0);
  /// u(x) = min_i ⟨a_i, x⟩ + c_i.
  static SemiconcaveFn min_of_planes(std::vector<Vector> normals, std::vector<double> offsets);
  /// u(x) = −min_i |x − s_i|.
  static SemiconcaveFn neg_distance_to_set(std::vector<Vector> points);
  /// u given by an expression over x1..xn; gradient from jets.
  static SemiconcaveFn expression(int dim, const std::string& text, double constant);
  /// Arbitrary evaluator; gradient by central differences unless given.
  static SemiconcaveFn callable(int dim, Evaluator value, std::optional<Gradient> gradient, double constant,
                                std::string name = "callable");

  int dim() const { return dim_; }
  const std::string& kind() const { return kind_; }
  double constant() const { return constant_; }
  void set_constant(double c) { constant_ = c; }
  bool has_analytic_gradient() const { return static_cast<bool>(gradient_); }

  double operator()(const Vector& x) const;
  /// Du(x) where u is differentiable; at kinks returns one one-sided selection.
  /// Central differences with step min(1e-5(1+|x|), max_step) when no analytic gradient.
  Vector gradient(const Vector& x, double max_step = 1e-5) const;

 private:
  SemiconcaveFn(int dim, std::string kind, Evaluator value, std::optional<Gradient> gradient, double constant);

  int dim_;
  std::string kind_;
  Evaluator value_;
  std::optional<Gradient> gradient_;
  double constant_;
};

struct SuperdiffOptions {
  double radius = 1e-3;
  int nsamples = 32;
  double cluster_tol = 0.0;  // <= 0: 1e-3·(1 + max sampled |Du|)
  std::uint64_t seed = 0;
};

/// D*u(x) estimate (limiting) and its hull D⁺u(x).
struct Superdifferential {
  Vector x;
  std::vector<Vector> limiting;
  std::vector<Vector> hull_vertices;
  double diameter = 0.0;
  double cluster_tol = 0.0;
  double lipschitz = 0.0;           // max sampled |Du|
  std::vector<int> cluster_counts;  // one per radius, largest radius first
  bool stable = false;              // count unchanged over the last three radii
};

Superdifferential estimate_superdifferential(const SemiconcaveFn& u, const Vector& x,
                                             const SuperdiffOptions& options = {});

/// Agglomerative complete-linkage clustering; returns cluster labels 0..k-1.
std::vector<int> complete_linkage(const std::vector<Vector>& points, double tol);

double default_sing_tol(const Superdifferential& sd);

/// diameter(D⁺u(x)) > sing_tol; sing_tol <= 0 picks default_sing_tol.
bool is_singular(const SemiconcaveFn& u, const Vector& x, double sing_tol = 0.0,
                 const SuperdiffOptions& options = {});

struct SemiconcavityReport {
  bool pass = true;
  int triples = 0;
  double worst_midpoint = 0.0;  // max of λu(x)+(1−λ)u(y)−u(λx+(1−λ)y) − (C/2)λ(1−λ)|x−y|²
  double worst_proximal = 0.0;  // max of u(y) − u(x) − ⟨p,y−x⟩ − (C/2)|y−x|²
  double tolerance = 0.0;
};

SemiconcavityReport semiconcavity_check(const SemiconcaveFn& u, const Box& region, double C, int ntriples = 500,
                                        std::uint64_t seed = 0);

struct MinimalEnergy {
  Vector p0;
  double energy = 0.0;
  std::vector<double> weights;  // over sd.hull_vertices
};

/// argmin of H(x,·) over D⁺u(x); two starts must agree within 1e-8.
MinimalEnergy minimal_energy_covector(const HamiltonianView& hamiltonian, const Superdifferential& sd);

struct ViscosityReport {
  bool pass = true;
  int samples = 0;
  double subsolution_defect = -std::numeric_limits<double>::infinity();
  double supersolution_defect = -std::numeric_limits<double>::infinity();
  Vector worst_sub_point;
  Vector worst_super_point;
  double tolerance = 1e-6;
};

/// Sub/supersolution defects of H(x,Du) = level on random points of region
/// plus `extra_points`.
ViscosityReport viscosity_check(const SemiconcaveFn& u, const HamiltonianView& hamiltonian, const Box& region,
                                int nsamples, double level, std::uint64_t seed = 0,
                                const std::vector<Vector>& extra_points = {}, double tolerance = 1e-6);

}  // namespace hjs
