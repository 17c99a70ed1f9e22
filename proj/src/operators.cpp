#include "hjs/operators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "hjs/hull.hpp"
#include "hjs/parallel.hpp"
#include "hjs/sampling.hpp"

namespace hjs {

namespace {

using ScalarField = std::function<double(const Vector&)>;
using VectorField = std::function<Vector(const Vector&)>;

struct BallMax {
  Vector point;
  double value = -std::numeric_limits<double>::infinity();
};

// Maximizes a concave f over B̄(center, radius) from supergradients: bisection
// on the derivative sign in 1D, central-cut ellipsoid method otherwise.
BallMax maximize_on_ball(const ScalarField& f, const VectorField& supergradient, const Vector& center, double radius,
                         const Vector& start) {
  const auto n = center.size();
  const double tol = 1e-12 * (1.0 + center.norm() + radius);
  BallMax best;
  auto consider = [&](const Vector& y) {
    const double v = f(y);
    if (v > best.value) {
      best.value = v;
      best.point = y;
    }
  };
  if (n == 1) {
    double lo = center(0) - radius, hi = center(0) + radius;
    auto slope = [&](double y) { return supergradient(Vector::Constant(1, y))(0); };
    if (slope(lo) <= 0.0) {
      consider(Vector::Constant(1, lo));
    } else if (slope(hi) >= 0.0) {
      consider(Vector::Constant(1, hi));
    } else {
      double mid = std::clamp(start(0), lo, hi);
      for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double s = slope(mid);
        consider(Vector::Constant(1, mid));
        if (s == 0.0) break;
        (s > 0.0 ? lo : hi) = mid;
        mid = 0.5 * (lo + hi);
      }
      const Vector final_point = Vector::Constant(1, mid);
      const double final_value = f(final_point);
      if (final_value >= best.value - 1e-12 * (1.0 + std::abs(best.value))) {
        best.point = final_point;
        best.value = final_value;
      }
    }
    return best;
  }
  // Ellipsoid {e + L w : |w| <= 1}; the factored update keeps L Lᵀ positive
  // semidefinite when the ellipsoid becomes thin across a kink.
  const double dn = static_cast<double>(n);
  const double expand = std::sqrt(dn * dn / (dn * dn - 1.0));
  const double shrink = 1.0 - std::sqrt(1.0 - 2.0 / (dn + 1.0));
  Vector e = start;
  Matrix L = (radius + (start - center).norm()) * Matrix::Identity(n, n);
  const int max_iter = 1500 * static_cast<int>(n);
  for (int it = 0; it < max_iter; ++it) {
    Vector g;
    const Vector offset = e - center;
    if (offset.norm() > radius) {
      g = offset / offset.norm();
    } else {
      consider(e);
      const Vector s = supergradient(e);
      if (s.norm() == 0.0) break;
      g = -s;
    }
    const Vector w = L.transpose() * g;
    const double wn = w.norm();
    if (!(wn > 0.0) || !std::isfinite(wn)) break;
    const Vector unit = w / wn;
    const Vector step = L * unit;
    e -= step / (dn + 1.0);
    L = expand * (L - shrink * step * unit.transpose());
    if (L.norm() < tol) break;
  }
  Vector offset = e - center;
  if (offset.norm() > radius) offset *= radius / offset.norm();
  const Vector final_point = center + offset;
  const double final_value = f(final_point);
  // Values near the top are flat to O(|dy|²); prefer the converged center.
  if (final_value >= best.value - 1e-12 * (1.0 + std::abs(best.value))) {
    best.point = final_point;
    best.value = final_value;
  }
  return best;
}

Vector restart_start(const Vector& x, double radius, int k, Rng& rng) {
  if (k == 0) return x;
  return random_in_ball(x, 0.9 * radius, rng);
}

void certify_concavity(ConvolutionResult& res, const ScalarField& psi, double radius, int samples, Rng& rng) {
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const Vector a = random_in_ball(res.extremizer, radius, rng);
    const Vector b = random_in_ball(res.extremizer, radius, rng);
    const double d2 = (a - b).squaredNorm();
    if (d2 < 1e-16) continue;
    const double gap = psi(0.5 * (a + b)) - 0.5 * (psi(a) + psi(b));
    worst = std::min(worst, 8.0 * gap / d2);
  }
  res.concavity_certificate = std::isfinite(worst) ? worst : 0.0;
}

}  // namespace

double global_search_radius(const LagrangianModel& model, const Vector& x, double t, const ConvolveOptions& options) {
  if (options.search_radius > 0.0) return options.search_radius;
  if (!model.theta(1.0) || !model.c0(x, options.outer_radius) || !model.c1(x, options.outer_radius))
    throw ValidationError("global search: model declares no growth witnesses; set a search radius");
  const double t_bound = std::min(t, 1.0);
  const AprioriBound b = apriori_velocity_bound(model, x, options.outer_radius, t_bound);
  return b.delta * t + options.outer_radius;
}

ConvolutionResult sup_convolve(const SemiconcaveFn& u, const ActionKernel& kernel, const Vector& x, double t,
                               const ConvolveOptions& options) {
  require_dim(x, u.dim(), "sup_convolve");
  require_dim(x, kernel.model().dim(), "sup_convolve");
  if (!(t > 0.0)) throw ValidationError("sup_convolve: t must be positive");
  if (options.restarts < 1) throw ValidationError("sup_convolve: restarts must be >= 1");

  const ScalarField psi = [&](const Vector& y) { return u(y) - kernel.value(x, y, t); };
  const VectorField supergradient = [&](const Vector& y) -> Vector {
    return u.gradient(y) - kernel(x, y, t).grad_to;
  };
  Rng rng(options.seed);

  ConvolutionResult res;
  res.x = x;
  res.t = t;
  bool done = false;
  if (options.localized && t <= 1.0) {
    const double radius = localization_radius(x, t);
    std::vector<BallMax> runs;
    for (int k = 0; k < options.restarts; ++k)
      runs.push_back(maximize_on_ball(psi, supergradient, x, radius, restart_start(x, radius, k, rng)));
    const auto best = std::max_element(runs.begin(), runs.end(),
                                       [](const BallMax& a, const BallMax& b) { return a.value < b.value; });
    const bool on_boundary = (best->point - x).norm() >= radius * (1.0 - 1e-7);
    if (!on_boundary) {
      for (const BallMax& r : runs)
        if ((r.point - best->point).norm() > 1e-6 * (1.0 + radius))
          throw NumericalError("sup_convolve: localized restarts disagree (t above the effective t0)");
      res.value = best->value;
      res.extremizer = best->point;
      res.localized = true;
      res.search_radius = radius;
      done = true;
    }
  }
  if (!done) {
    const double radius = global_search_radius(kernel.model(), x, t, options);
    BallMax best;
    std::vector<BallMax> runs;
    for (int k = 0; k < options.restarts; ++k) {
      runs.push_back(maximize_on_ball(psi, supergradient, x, radius, restart_start(x, radius, k, rng)));
      if (runs.back().value > best.value) best = runs.back();
    }
    for (const BallMax& r : runs)
      if ((r.point - best.point).norm() > 1e-6 * (1.0 + radius) && std::abs(r.value - best.value) < 1e-9)
        res.unique = false;
    if ((best.point - x).norm() >= radius * (1.0 - 1e-6))
      throw NumericalError("sup_convolve: maximizer on the boundary of the search ball");
    res.value = best.value;
    res.extremizer = best.point;
    res.localized = false;
    res.search_radius = radius;
  }
  res.extremal = kernel.solve(x, res.extremizer, t);
  res.gradient = -res.extremal.grad_x;
  certify_concavity(res, psi, std::min(0.5 * t, res.search_radius), options.certificate_samples, rng);
  return res;
}

ConvolutionResult inf_convolve(const SemiconcaveFn& u, const ActionKernel& kernel, const Vector& x, double t,
                               const ConvolveOptions& options) {
  require_dim(x, u.dim(), "inf_convolve");
  require_dim(x, kernel.model().dim(), "inf_convolve");
  if (!(t > 0.0)) throw ValidationError("inf_convolve: t must be positive");
  const auto n = x.size();
  const double radius = global_search_radius(kernel.model(), x, t, options);
  const ScalarField phi = [&](const Vector& y) { return u(y) + kernel.value(y, x, t); };
  const VectorField grad = [&](const Vector& y) -> Vector { return u.gradient(y) + kernel(y, x, t).grad_from; };
  auto project = [&](const Vector& y) -> Vector {
    const Vector d = y - x;
    return d.norm() > radius ? Vector(x + d * (radius / d.norm())) : y;
  };

  std::vector<Vector> starts{x};
  const double spread = 0.5 * std::min(radius, std::max(t, 1e-3));
  for (Eigen::Index i = 0; i < n; ++i) {
    starts.push_back(x + spread * Vector::Unit(n, i));
    starts.push_back(x - spread * Vector::Unit(n, i));
  }
  Rng rng(options.seed);
  while (static_cast<int>(starts.size()) < std::max(8, options.restarts)) starts.push_back(random_in_ball(x, radius, rng));

  struct Local {
    Vector y;
    double value;
  };
  std::vector<Local> minima;
  for (const Vector& s : starts) {
    Vector y = s;
    double value = phi(y);
    double step = 1.0;
    for (int it = 0; it < 400; ++it) {
      const Vector g = grad(y);
      if (g.norm() < 1e-10) break;
      bool moved = false;
      step = std::min(1.0, 4.0 * step);
      for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
        const Vector trial = project(y - step * g);
        const double tv = phi(trial);
        if (tv <= value - 1e-4 * g.dot(y - trial)) {
          moved = (trial - y).norm() > 1e-15 * (1.0 + y.norm());
          y = trial;
          value = tv;
          break;
        }
      }
      if (!moved) break;
    }
    // Newton polish with a central-difference Hessian.
    for (int it = 0; it < 20; ++it) {
      const Vector g = grad(y);
      if (g.norm() < 1e-13) break;
      Matrix hess(n, n);
      const double h = 1e-6 * (1.0 + y.norm());
      for (Eigen::Index j = 0; j < n; ++j)
        hess.col(j) = (grad(y + h * Vector::Unit(n, j)) - grad(y - h * Vector::Unit(n, j))) / (2.0 * h);
      hess = 0.5 * (hess + hess.transpose());
      Eigen::LDLT<Matrix> ldlt(hess);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) break;
      const Vector trial = project(y - ldlt.solve(g));
      const double tv = phi(trial);
      if (!(tv <= value)) break;
      const double moved = (trial - y).norm();
      y = trial;
      value = tv;
      if (moved < 1e-15 * (1.0 + y.norm())) break;
    }
    minima.push_back({y, value});
  }
  const auto best = *std::min_element(minima.begin(), minima.end(),
                                      [](const Local& a, const Local& b) { return a.value < b.value; });
  if ((best.y - x).norm() >= radius * (1.0 - 1e-6))
    throw NumericalError("inf_convolve: minimizer on the boundary of the search ball");

  ConvolutionResult res;
  res.x = x;
  res.t = t;
  res.value = best.value;
  res.extremizer = best.y;
  res.search_radius = radius;
  for (const Local& m : minima) {
    if (std::abs(m.value - best.value) > 1e-8 * (1.0 + std::abs(best.value))) continue;
    if ((m.y - best.y).norm() < 1e-4) continue;
    bool seen = false;
    for (const Vector& a : res.alternatives) seen = seen || (a - m.y).norm() < 1e-4;
    if (!seen) res.alternatives.push_back(m.y);
  }
  res.unique = res.alternatives.empty();
  res.extremal = kernel.solve(best.y, x, t);
  res.gradient = res.extremal.grad_y;
  return res;
}

P3Report verify_P3(const SemiconcaveFn& u, const ActionKernel& kernel, const Vector& x,
                   const std::vector<double>& t_grid, const ConvolveOptions& options) {
  P3Report rep;
  const Vector zero = Vector::Zero(x.size());
  if (kernel.model().eval(x, zero) > 0.0) {
    rep.skipped = true;
    rep.note = "L(x,0) > 0: monotonicity not expected";
    return rep;
  }
  std::vector<double> times = t_grid;
  std::sort(times.begin(), times.end());
  rep.times = times;
  for (double t : times) rep.values.push_back(sup_convolve(u, kernel, x, t, options).value);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double drop = rep.values[i - 1] - rep.values[i];
    rep.worst_decrease = std::max(rep.worst_decrease, drop);
    if (drop > 1e-6 * (1.0 + std::abs(rep.values[i]))) rep.monotone = false;
  }
  if (!times.empty()) {
    const double ux = u(x);
    rep.gap = std::abs(rep.values.front() - ux);
    rep.extrapolated_gap = rep.gap;
    if (times.size() >= 2 && times[1] > times[0]) {
      const double g0 = rep.values[0] - ux, g1 = rep.values[1] - ux;
      rep.extrapolated_gap = std::abs(g0 - times[0] * (g1 - g0) / (times[1] - times[0]));
    }
  }
  return rep;
}

P5Report verify_P5(const SemiconcaveFn& u, const Matrix& A, double C, double t, const Box& region, int nsamples,
                   std::uint64_t seed, const std::vector<Vector>& explicit_points) {
  P5Report rep;
  const ActionKernel kernel(LagrangianModel::quadratic(A));
  rep.kappa = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (A + A.transpose())).eigenvalues().minCoeff();
  rep.guaranteed = C <= 0.0 || t <= rep.kappa / C * (1.0 + 1e-12);
  if (!rep.guaranteed) rep.note = "t above kappa/C: the bound is sufficient, not necessary; nothing asserted";

  auto zero_in_superdiff = [&](const Vector& y) {
    SuperdiffOptions so;
    so.seed = seed;
    const Superdifferential sd = estimate_superdifferential(u, y, so);
    return distance_to_hull(sd.hull_vertices, Vector::Zero(y.size())) <= sd.cluster_tol;
  };
  auto ascend = [&](Vector y, const ScalarField& f, const VectorField& g) {
    double value = f(y);
    double step = 1.0;
    for (int it = 0; it < 500; ++it) {
      const Vector d = g(y);
      if (d.norm() < 1e-12) break;
      bool moved = false;
      step = std::min(1.0, 4.0 * step);
      for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
        Vector trial = y + step * d;
        for (Eigen::Index i = 0; i < y.size(); ++i) trial(i) = std::clamp(trial(i), region.lower(i), region.upper(i));
        const double tv = f(trial);
        if (tv > value) {
          moved = true;
          y = trial;
          value = tv;
          break;
        }
      }
      if (!moved) break;
    }
    return y;
  };

  Rng rng(seed);
  std::vector<Vector> candidates = explicit_points;
  const ScalarField uf = [&](const Vector& y) { return u(y); };
  const VectorField ug = [&](const Vector& y) { return u.gradient(y); };
  for (int k = 0; k < nsamples; ++k) candidates.push_back(ascend(random_in_box(region, rng), uf, ug));
  std::vector<Vector> critical;
  for (const Vector& c : candidates) {
    bool seen = false;
    for (const Vector& s : critical) seen = seen || (s - c).norm() < 1e-4;
    if (!seen && zero_in_superdiff(c)) critical.push_back(c);
  }

  ConvolveOptions co;
  co.seed = seed;
  co.search_radius = std::max(1.0, (region.upper - region.lower).norm());
  for (const Vector& c : critical) {
    const ConvolutionResult r = sup_convolve(u, kernel, c, t, co);
    P5Check check{c, r.extremizer, u(c), r.value, false};
    check.preserved = (r.extremizer - c).norm() <= rep.tolerance && std::abs(r.value - check.u_value) <= rep.tolerance;
    rep.critical_points.push_back(check);
  }

  // Converse: ascend x ↦ T̆_tu(x) and test 0 ∈ D⁺u at its critical points.
  const ScalarField tf = [&](const Vector& y) { return sup_convolve(u, kernel, y, t, co).value; };
  const VectorField tg = [&](const Vector& y) { return *sup_convolve(u, kernel, y, t, co).gradient; };
  std::vector<Vector> converse_starts;
  for (const P5Check& c : rep.critical_points) converse_starts.push_back(c.point + 0.05 * Vector::Ones(c.point.size()));
  for (int k = 0; k < 2; ++k) converse_starts.push_back(random_in_box(region, rng));
  for (const Vector& s : converse_starts) {
    const Vector y = ascend(s, tf, tg);
    if (tg(y).norm() > 1e-6) continue;
    rep.converse_points.push_back(y);
    if (!zero_in_superdiff(y)) ++rep.converse_failures;
  }

  if (rep.guaranteed) {
    for (const P5Check& c : rep.critical_points) rep.pass = rep.pass && c.preserved;
    rep.pass = rep.pass && rep.converse_failures == 0;
  }
  return rep;
}

P4Report gradient_limit_p0(const SemiconcaveFn& u, const ActionKernel& kernel, const Vector& x,
                           const std::vector<double>& t_sequence, const ConvolveOptions& options, double tolerance) {
  if (t_sequence.empty()) throw ValidationError("gradient_limit_p0: empty time sequence");
  P4Report rep;
  rep.times = t_sequence;
  std::sort(rep.times.begin(), rep.times.end(), std::greater<>());
  for (double t : rep.times) {
    const ConvolutionResult r = sup_convolve(u, kernel, x, t, options);
    rep.gradients.push_back(*r.gradient);
    rep.localized.push_back(r.localized);
  }
  const std::size_t m = rep.gradients.size();
  if (m >= 3) {
    const double first = (rep.gradients[1] - rep.gradients[0]).norm();
    const double last = (rep.gradients[m - 1] - rep.gradients[m - 2]).norm();
    if (last > 1e-6 && last > 1.5 * first + 1e-6) throw NumericalError("gradient_limit_p0: sequence does not converge");
  }
  // Least-squares line through the (up to) three smallest t.
  const std::size_t k = std::min<std::size_t>(3, m);
  if (k == 1) {
    rep.limit = rep.gradients.back();
  } else {
    double mt = 0.0;
    Vector mg = Vector::Zero(x.size());
    for (std::size_t i = m - k; i < m; ++i) {
      mt += rep.times[i];
      mg += rep.gradients[i];
    }
    mt /= static_cast<double>(k);
    mg /= static_cast<double>(k);
    double stt = 0.0;
    Vector stg = Vector::Zero(x.size());
    for (std::size_t i = m - k; i < m; ++i) {
      stt += (rep.times[i] - mt) * (rep.times[i] - mt);
      stg += (rep.times[i] - mt) * (rep.gradients[i] - mg);
    }
    rep.limit = stt > 0.0 ? Vector(mg - mt * stg / stt) : mg;
  }
  SuperdiffOptions so;
  so.seed = options.seed;
  const Superdifferential sd = estimate_superdifferential(u, x, so);
  rep.p0 = minimal_energy_covector(HamiltonianView(kernel.model()), sd).p0;
  rep.gap = (rep.gradients.back() - rep.p0).norm();
  rep.pass = rep.gap <= tolerance;
  return rep;
}

double fit_kernel_curvature(const ActionKernel& kernel, const Vector& x, double t, int nsamples, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < nsamples; ++k) {
    const Vector from = random_in_ball(x, 1.0, rng);
    const Vector to = random_in_ball(from, 0.5 * t, rng);
    const Vector z = (t / 20.0) * random_unit(x.size(), rng);
    const double q = kernel.value(from + z, to, t) + kernel.value(from - z, to, t) - 2.0 * kernel.value(from, to, t);
    worst = std::max(worst, q * t / z.squaredNorm());
  }
  return worst;
}

LasryLionsField lasry_lions_field(const SemiconcaveFn& u, const ActionKernel& kernel, double t, const GridSpec& grid,
                                  const ConvolveOptions& options, int jobs) {
  const auto n = grid.box.dim();
  require_dim(grid.box.lower, u.dim(), "lasry_lions_field grid");
  if (static_cast<Eigen::Index>(grid.resolution.size()) != n)
    throw ValidationError("lasry_lions_field: one resolution per axis");
  std::vector<double> spacing(n);
  std::size_t total = 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (grid.resolution[i] < 1) throw ValidationError("lasry_lions_field: resolution must be >= 1");
    spacing[i] = grid.resolution[i] > 1 ? (grid.box.upper(i) - grid.box.lower(i)) / (grid.resolution[i] - 1) : 0.0;
    total *= static_cast<std::size_t>(grid.resolution[i]);
  }
  auto index_of = [&](std::size_t flat) {
    std::vector<int> idx(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      idx[i] = static_cast<int>(flat % grid.resolution[i]);
      flat /= grid.resolution[i];
    }
    return idx;
  };
  auto flat_of = [&](const std::vector<int>& idx) {
    std::size_t flat = 0;
    for (Eigen::Index i = n; i-- > 0;) flat = flat * grid.resolution[i] + idx[i];
    return flat;
  };

  LasryLionsField field;
  field.t = t;
  field.points.resize(total);
  field.values.resize(total);
  field.gradients.resize(total);
  field.fd_gradients.assign(total, Vector::Constant(n, std::numeric_limits<double>::quiet_NaN()));
  std::vector<char> localized(total, 0);
  for (std::size_t k = 0; k < total; ++k) {
    const auto idx = index_of(k);
    Vector p(n);
    for (Eigen::Index i = 0; i < n; ++i) p(i) = grid.box.lower(i) + idx[i] * spacing[i];
    field.points[k] = p;
  }
  parallel_for(total, jobs, [&](std::size_t k) {
    ConvolveOptions o = options;
    o.seed = options.seed + k;
    const ConvolutionResult r = sup_convolve(u, kernel, field.points[k], t, o);
    field.values[k] = r.value;
    field.gradients[k] = *r.gradient;
    localized[k] = r.localized ? 1 : 0;
  });
  field.localized_count = static_cast<int>(std::count(localized.begin(), localized.end(), 1));

  field.upper_bound = u.constant();
  field.lower_bound = -fit_kernel_curvature(kernel, grid.box.center(), t, 32, options.seed) / t;
  field.max_second_difference = -std::numeric_limits<double>::infinity();
  field.min_second_difference = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < total; ++k) {
    const auto idx = index_of(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (idx[i] == 0 || idx[i] + 1 >= grid.resolution[i]) continue;
      auto up = idx, down = idx;
      ++up[i];
      --down[i];
      const double fu = field.values[flat_of(up)], fd = field.values[flat_of(down)];
      const double h = spacing[i];
      field.fd_gradients[k](i) = (fu - fd) / (2.0 * h);
      const double second = (fu + fd - 2.0 * field.values[k]) / (h * h);
      field.max_second_difference = std::max(field.max_second_difference, second);
      field.min_second_difference = std::min(field.min_second_difference, second);
      const double slack = 1e-6 * (1.0 + std::abs(field.lower_bound)) + 1e-9 / (h * h);
      if (second > field.upper_bound + slack || second < field.lower_bound - slack) ++field.violations;
    }
  }
  if (!std::isfinite(field.max_second_difference)) field.max_second_difference = field.min_second_difference = 0.0;
  return field;
}

}  // namespace hjs
