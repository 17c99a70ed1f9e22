#include "hjs/mpass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hjs/hull.hpp"
#include "hjs/sampling.hpp"

namespace hjs {

namespace {

struct FlowPoint {
  Vector q, p;
  double action = 0.0;  // ∫ L(q, H_p) over the elapsed |time|
};

// RK4 for ẋ = H_p, ṗ = −H_x over signed duration `duration`.
std::vector<FlowPoint> hamiltonian_flow(const HamiltonianView& hv, const Vector& q0, const Vector& p0, double duration,
                                        int steps) {
  const double dt = duration / steps;
  const LagrangianModel& model = hv.model();
  auto rhs = [&](const Vector& q, const Vector& p, Vector& dq, Vector& dp, double& lag) {
    const LegendreResult lr = hv.legendre(q, p);
    dq = lr.v_star;
    dp = -hv.H_x(q, p);
    lag = model.eval(q, lr.v_star);
  };
  std::vector<FlowPoint> out{{q0, p0, 0.0}};
  Vector q = q0, p = p0;
  double action = 0.0;
  Vector k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p;
  double l1, l2, l3, l4;
  for (int s = 0; s < steps; ++s) {
    rhs(q, p, k1q, k1p, l1);
    rhs(q + 0.5 * dt * k1q, p + 0.5 * dt * k1p, k2q, k2p, l2);
    rhs(q + 0.5 * dt * k2q, p + 0.5 * dt * k2p, k3q, k3p, l3);
    rhs(q + dt * k3q, p + dt * k3p, k4q, k4p, l4);
    q += dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    action += std::abs(dt) / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
    if (!q.allFinite() || !p.allFinite()) throw NumericalError("Hamiltonian flow diverged");
    out.push_back({q, p, action});
  }
  return out;
}

}  // namespace

BarrierProblem make_barrier_problem(const SemiconcaveFn& u, const ActionKernel& kernel, const Vector& x, double t,
                                    const SuperdiffOptions& options) {
  require_dim(x, u.dim(), "barrier problem anchor");
  require_dim(x, kernel.model().dim(), "barrier problem anchor");
  if (!(t > 0.0)) throw ValidationError("barrier problem: t must be positive");
  const Superdifferential sd = estimate_superdifferential(u, x, options);
  if (!sd.stable) throw NumericalError("barrier problem: limiting-gradient count is not stable");
  return BarrierProblem{u, kernel, x, t, sd.limiting, default_sing_tol(sd)};
}

double barrier_eval(const BarrierProblem& problem, const Vector& y) {
  return problem.u(y) + problem.kernel.value(y, problem.x, problem.t);
}

Vector barrier_gradient(const BarrierProblem& problem, const Vector& y) {
  return problem.u.gradient(y) + problem.kernel(y, problem.x, problem.t).grad_from;
}

SemiconcaveFn barrier_function(const BarrierProblem& problem) {
  return SemiconcaveFn::callable(
      problem.u.dim(), [problem](const Vector& y) { return barrier_eval(problem, y); },
      [problem](const Vector& y) { return barrier_gradient(problem, y); }, problem.u.constant(), "barrier");
}

std::vector<GlobalMinimizer> global_minimizers(const BarrierProblem& problem, int steps) {
  if (problem.covectors.empty()) throw ValidationError("global_minimizers: no limiting covectors");
  const HamiltonianView hv(problem.kernel.model());
  const double ux = problem.u(problem.x);
  std::vector<GlobalMinimizer> out;
  for (const Vector& p : problem.covectors) {
    const auto flow = hamiltonian_flow(hv, problem.x, p, -problem.t, steps);
    GlobalMinimizer m;
    m.point = flow.back().q;
    m.covector = p;
    m.value = barrier_eval(problem, m.point);
    m.fixed_point_gap = std::abs(m.value - ux);
    const double r = 1e-4 * (1.0 + m.point.norm());
    const double tol = 1e-8 * (1.0 + std::abs(m.value));
    for (const Vector& d : fixed_directions(m.point.size()))
      if (barrier_eval(problem, m.point + r * d) < m.value - tol)
        throw NumericalError("global_minimizers: backward foot is not a local minimum of the barrier");
    out.push_back(m);
  }
  return out;
}

MountainPassResult mountain_pass(const BarrierProblem& problem, const std::vector<GlobalMinimizer>& minimizers, int i,
                                 int j, const MountainPassOptions& options) {
  const int k = static_cast<int>(minimizers.size());
  if (i == j || i < 0 || j < 0 || i >= k || j >= k) throw ValidationError("mountain_pass: need two distinct minimizers");
  if (options.path_nodes < 1 || options.iters < 1) throw ValidationError("mountain_pass: bad path size or iterations");
  MountainPassResult res;
  res.i = i;
  res.j = j;
  res.start = minimizers[i].point;
  res.end = minimizers[j].point;
  if ((res.start - res.end).norm() <= 10.0 * problem.sing_tol)
    throw ValidationError("mountain_pass: minimizers are not separated");

  const int total = options.path_nodes + 2;
  std::vector<Vector> path(total);
  for (int n = 0; n < total; ++n) {
    const double s = static_cast<double>(n) / (total - 1);
    path[n] = (1.0 - s) * res.start + s * res.end;
  }
  auto phi = [&](const Vector& y) { return barrier_eval(problem, y); };
  std::vector<double> steps(total, 0.1 * problem.t);

  auto reparametrize = [&] {
    std::vector<double> arc(total, 0.0);
    for (int n = 1; n < total; ++n) arc[n] = arc[n - 1] + (path[n] - path[n - 1]).norm();
    if (arc.back() <= 0.0) return;
    std::vector<Vector> fresh(total);
    fresh.front() = path.front();
    fresh.back() = path.back();
    int seg = 0;
    for (int n = 1; n + 1 < total; ++n) {
      const double target = arc.back() * n / (total - 1);
      while (seg + 1 < total - 1 && arc[seg + 1] < target) ++seg;
      const double len = arc[seg + 1] - arc[seg];
      const double w = len > 0.0 ? (target - arc[seg]) / len : 0.0;
      fresh[n] = (1.0 - w) * path[seg] + w * path[seg + 1];
    }
    path = fresh;
  };
  auto argmax = [&](const std::vector<double>& values) {
    const double top = *std::max_element(values.begin() + 1, values.end() - 1);
    for (int n = 1; n + 1 < total; ++n)
      if (values[n] >= top - 1e-9) return n;
    return 1;
  };
  auto normal_descent = [&](int n) {
    const Vector g = barrier_gradient(problem, path[n]);
    Vector tangent = path[n + 1] - path[n - 1];
    if (tangent.norm() > 0.0) tangent.normalize();
    const Vector gn = g - g.dot(tangent) * tangent;
    if (gn.norm() < 1e-14) return;
    const double current = phi(path[n]);
    for (int attempt = 0; attempt < 6; ++attempt) {
      const Vector trial = path[n] - steps[n] * gn;
      if (phi(trial) < current) {
        path[n] = trial;
        steps[n] = std::min(steps[n] * 1.2, problem.t);
        return;
      }
      steps[n] *= 0.5;
    }
  };
  // Golden-section maximization of φ along the polyline path[n-1] → path[n] → path[n+1].
  auto climb = [&](int n) {
    const Vector a = path[n - 1], m = path[n], c = path[n + 1];
    const double la = (m - a).norm(), lc = (c - m).norm();
    if (la + lc <= 0.0) return;
    auto point = [&](double s) -> Vector {
      const double d = s * (la + lc);
      if (d <= la) return la > 0.0 ? Vector(a + (d / la) * (m - a)) : m;
      return lc > 0.0 ? Vector(m + ((d - la) / lc) * (c - m)) : m;
    };
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = 0.0, hi = 1.0;
    double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
    double f1 = phi(point(x1)), f2 = phi(point(x2));
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + golden * (hi - lo);
        f2 = phi(point(x2));
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - golden * (hi - lo);
        f1 = phi(point(x1));
      }
    }
    const Vector best = point(0.5 * (lo + hi));
    if (phi(best) >= phi(m)) path[n] = best;
  };

  double previous = std::numeric_limits<double>::infinity();
  int quiet = 0;
  int top = 1;
  for (int it = 0; it < options.iters; ++it) {
    reparametrize();
    std::vector<double> values(total);
    for (int n = 0; n < total; ++n) values[n] = phi(path[n]);
    top = argmax(values);
    for (int n = 1; n + 1 < total; ++n)
      if (n != top) normal_descent(n);
    normal_descent(top);
    climb(top);
    res.iterations = it + 1;
    const double current = phi(path[top]);
    quiet = std::abs(current - previous) <= 1e-13 * (1.0 + std::abs(current)) ? quiet + 1 : 0;
    previous = current;
    if (quiet >= 5) break;
  }
  std::vector<double> values(total);
  for (int n = 0; n < total; ++n) values[n] = phi(path[n]);
  top = argmax(values);
  res.path = path;
  res.critical_point = path[top];
  res.critical_value = values[top];
  res.b = *std::max_element(values.begin(), values.end());
  res.min_value = std::min(minimizers[i].value, minimizers[j].value);
  res.collapsed = (res.critical_point - res.start).norm() <= 10.0 * problem.sing_tol ||
                  (res.critical_point - res.end).norm() <= 10.0 * problem.sing_tol;
  const Superdifferential sd = estimate_superdifferential(barrier_function(problem), res.critical_point, options.superdiff);
  res.certificate = distance_to_hull(sd.hull_vertices, Vector::Zero(res.critical_point.size()));
  res.certified = res.certificate <= options.certificate_tol;
  return res;
}

Classification classify_dichotomy(const MountainPassResult& result, const BarrierProblem& problem,
                                  const SuperdiffOptions& options, int steps) {
  Classification c;
  const Vector& xt = result.critical_point;
  const Superdifferential sd = estimate_superdifferential(problem.u, xt, options);
  c.diameter = sd.diameter;
  if (sd.diameter > default_sing_tol(sd)) {
    c.kind = "singular";
    return c;
  }
  c.kind = "regular";
  const HamiltonianView hv(problem.kernel.model());
  const Vector p = problem.u.gradient(xt);
  const double window = problem.t;
  const auto backward = hamiltonian_flow(hv, xt, p, -window, steps);
  const ActionResult forward = problem.kernel.solve(xt, problem.x, problem.t);
  const Vector left_velocity = hv.H_p(xt, p);
  const Vector right_velocity = forward.minimizer.velocities.front();
  c.junction_mismatch = (left_velocity - right_velocity).norm();
  if (c.junction_mismatch > 1e-3 * (1.0 + right_velocity.norm()))
    throw NumericalError("classify_dichotomy: junction velocity mismatch; critical point miscomputed");
  const Vector& foot = backward.back().q;
  c.calibration_defect = backward.back().action + forward.value - (problem.u(problem.x) - problem.u(foot));
  for (std::size_t s = backward.size(); s-- > 0;) {
    c.curve.push_back(backward[s].q);
    c.curve_times.push_back(-window * static_cast<double>(s) / steps);
  }
  const Curve& fc = forward.minimizer;
  for (std::size_t s = 1; s < fc.nodes.size(); ++s) {
    c.curve.push_back(fc.nodes[s]);
    c.curve_times.push_back(fc.time(s));
  }
  return c;
}

}  // namespace hjs
