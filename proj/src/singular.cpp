#include "hjs/singular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hjs/hull.hpp"
#include "hjs/parallel.hpp"

namespace hjs {

namespace {

std::vector<Vector> velocity_images(const Vector& y, const Superdifferential& sd, const HamiltonianView& hv) {
  std::vector<Vector> images;
  for (const Vector& p : sd.hull_vertices) images.push_back(hv.H_p(y, p));
  return images;
}

}  // namespace

double inclusion_defect(const Vector& y, const Vector& velocity, const SemiconcaveFn& u,
                        const HamiltonianView& hamiltonian, const SuperdiffOptions& options) {
  const Superdifferential sd = estimate_superdifferential(u, y, options);
  if (sd.hull_vertices.empty()) throw NumericalError("inclusion_defect: empty superdifferential estimate");
  return distance_to_hull(velocity_images(y, sd, hamiltonian), velocity);
}

CharacteristicTrace propagate_singularity(const SemiconcaveFn& u, const ActionKernel& kernel, const Vector& x0,
                                          double t1, int nsteps, const TraceOptions& options) {
  require_dim(x0, u.dim(), "propagate_singularity");
  if (!(t1 > 0.0)) throw ValidationError("propagate_singularity: t1 must be positive");
  if (nsteps < 2) throw ValidationError("propagate_singularity: need at least 2 steps");
  const HamiltonianView hv(kernel.model());
  const std::size_t count = static_cast<std::size_t>(nsteps) + 1;
  const double dt = t1 / nsteps;

  CharacteristicTrace tr;
  tr.x0 = x0;
  tr.times.resize(count);
  tr.points.resize(count);
  tr.covectors.resize(count);
  std::vector<char> localized(count, 1);
  for (std::size_t i = 0; i < count; ++i) tr.times[i] = dt * static_cast<double>(i);
  tr.points[0] = x0;

  const Superdifferential sd0 = estimate_superdifferential(u, x0, options.superdiff);
  tr.covectors[0] = minimal_energy_covector(hv, sd0).p0;
  tr.noncriticality = distance_to_hull(velocity_images(x0, sd0, hv), Vector::Zero(x0.size()));

  parallel_for(count - 1, options.jobs, [&](std::size_t k) {
    const std::size_t i = k + 1;
    ConvolveOptions co = options.convolve;
    co.seed = options.convolve.seed + i;
    const ConvolutionResult r = sup_convolve(u, kernel, x0, tr.times[i], co);
    tr.points[i] = r.extremizer;
    tr.covectors[i] = *r.gradient;
    localized[i] = r.localized ? 1 : 0;
  });
  for (char c : localized) tr.localized.push_back(c != 0);

  tr.velocities.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (i == 0)
      tr.velocities[i] = (tr.points[1] - tr.points[0]) / dt;
    else if (i + 1 == count)
      tr.velocities[i] = (tr.points[i] - tr.points[i - 1]) / dt;
    else
      tr.velocities[i] = (tr.points[i + 1] - tr.points[i - 1]) / (2.0 * dt);
  }

  tr.diameters.resize(count);
  tr.defects.resize(count);
  tr.energies.resize(count);
  std::vector<char> singular(count, 0);
  parallel_for(count, options.jobs, [&](std::size_t i) {
    const Superdifferential sd = estimate_superdifferential(u, tr.points[i], options.superdiff);
    tr.diameters[i] = sd.diameter;
    const double tol = options.sing_tol > 0.0 ? options.sing_tol : default_sing_tol(sd);
    singular[i] = sd.diameter > tol ? 1 : 0;
    tr.defects[i] = distance_to_hull(velocity_images(tr.points[i], sd, hv), tr.velocities[i]);
    tr.energies[i] = hv.H(tr.points[i], tr.covectors[i]);
  });
  int singular_count = 0;
  for (std::size_t i = 0; i < count; ++i) {
    tr.singular.push_back(singular[i] != 0);
    singular_count += singular[i];
    if (!singular[i] && tr.first_regular < 0 && singular[0]) tr.first_regular = static_cast<int>(i);
  }
  tr.initially_singular = singular[0] != 0;
  tr.singular_fraction = static_cast<double>(singular_count) / static_cast<double>(count);
  for (std::size_t i = 0; i + 1 < count; ++i)
    tr.lipschitz = std::max(tr.lipschitz, (tr.points[i + 1] - tr.points[i]).norm() / dt);
  return tr;
}

InitialVelocityReport initial_velocity_check(const CharacteristicTrace& trace, const HamiltonianView& hamiltonian,
                                             const Superdifferential& sd) {
  if (trace.points.size() < 5) throw ValidationError("initial_velocity_check: trace needs at least 4 steps");
  InitialVelocityReport rep;
  // Least-squares line through (t_k, (y_k − x0)/t_k), evaluated at t = 0.
  const int k = 4;
  double mt = 0.0;
  Vector mq = Vector::Zero(trace.x0.size());
  std::vector<Vector> quotients;
  for (int i = 1; i <= k; ++i) {
    quotients.push_back((trace.points[i] - trace.x0) / trace.times[i]);
    mt += trace.times[i];
    mq += quotients.back();
  }
  mt /= k;
  mq /= k;
  double stt = 0.0;
  Vector stq = Vector::Zero(trace.x0.size());
  for (int i = 1; i <= k; ++i) {
    stt += (trace.times[i] - mt) * (trace.times[i] - mt);
    stq += (trace.times[i] - mt) * (quotients[i - 1] - mq);
  }
  rep.estimate = mq - mt * stq / stt;
  const Vector p0 = minimal_energy_covector(hamiltonian, sd).p0;
  rep.expected = hamiltonian.H_p(trace.x0, p0);
  rep.gap = (rep.estimate - rep.expected).norm();
  rep.relative_gap = rep.gap / std::max(rep.expected.norm(), 1e-12);
  return rep;
}

NoncriticalityReport noncriticality_check(const SemiconcaveFn& u, const HamiltonianView& hamiltonian, const Vector& x0,
                                          const CharacteristicTrace* trace, const SuperdiffOptions& options) {
  NoncriticalityReport rep;
  const Superdifferential sd = estimate_superdifferential(u, x0, options);
  rep.distance = distance_to_hull(velocity_images(x0, sd, hamiltonian), Vector::Zero(x0.size()));
  if (trace && rep.distance > 1e-6 && trace->points.size() >= 2) {
    rep.injectivity_checked = true;
    const double step = trace->times[1] - trace->times[0];
    rep.required_separation = 0.5 * rep.distance * step;
    rep.min_pair_distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < trace->points.size(); ++i)
      for (std::size_t j = i + 1; j < trace->points.size(); ++j) {
        const double d = (trace->points[i] - trace->points[j]).norm();
        rep.min_pair_distance = std::min(rep.min_pair_distance, d);
        if (d < rep.required_separation * static_cast<double>(j - i)) rep.injective = false;
      }
  }
  return rep;
}

}  // namespace hjs
