#pragma once

#include <vector>

#include "hjs/operators.hpp"
#include "hjs/scfun.hpp"

namespace hjs {

struct TraceOptions {
  ConvolveOptions convolve;
  SuperdiffOptions superdiff;
  double sing_tol = 0.0;  // <= 0: default_sing_tol per point
  int jobs = 1;
};

/// Maximizer arc t ↦ y(t) of T̆_tu(x0) on a uniform grid of [0, t1].
struct CharacteristicTrace {
  Vector x0;
  std::vector<double> times;
  std::vector<Vector> points;
  std::vector<double> diameters;
  std::vector<bool> singular;
  std::vector<bool> localized;  // index 0 is trivially true
  std::vector<Vector> covectors;  // index 0: minimal-energy covector; i >= 1: −D_xA_{t_i}(x0, y_i)
  std::vector<double> energies;   // H(y_i, p_i)
  std::vector<Vector> velocities;
  std::vector<double> defects;
  double lipschitz = 0.0;
  double noncriticality = 0.0;  // dist(0, co H_p(x0, D⁺u(x0)))
  bool initially_singular = false;
  int first_regular = -1;  // first index that lost singularity, -1 if none
  double singular_fraction = 0.0;
};

CharacteristicTrace propagate_singularity(const SemiconcaveFn& u, const ActionKernel& kernel, const Vector& x0,
                                          double t1, int nsteps, const TraceOptions& options = {});

/// dist(velocity, co {H_p(y,p) : p ∈ hull vertices of D⁺u(y)}).
double inclusion_defect(const Vector& y, const Vector& velocity, const SemiconcaveFn& u,
                        const HamiltonianView& hamiltonian, const SuperdiffOptions& options = {});

struct InitialVelocityReport {
  Vector estimate;  // extrapolated (y(t_k) − x0)/t_k, k = 1..4
  Vector expected;  // H_p(x0, p0)
  double gap = 0.0;
  double relative_gap = 0.0;  // gap / max(|expected|, 1e-12)
};

InitialVelocityReport initial_velocity_check(const CharacteristicTrace& trace, const HamiltonianView& hamiltonian,
                                             const Superdifferential& sd);

struct NoncriticalityReport {
  double distance = 0.0;  // dist(0, co H_p(x0, D⁺u(x0)))
  bool injectivity_checked = false;
  bool injective = true;
  double min_pair_distance = 0.0;
  double required_separation = 0.0;  // per unit of index gap
};

NoncriticalityReport noncriticality_check(const SemiconcaveFn& u, const HamiltonianView& hamiltonian, const Vector& x0,
                                          const CharacteristicTrace* trace = nullptr,
                                          const SuperdiffOptions& options = {});

}  // namespace hjs
