#include "hjs/action.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hjs/sampling.hpp"

namespace hjs {

namespace {

void require_time(double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError(std::string(what) + ": time must be positive");
}

// Trapezoidal discretization: unknowns are the interior nodes q_1..q_{N-1}.
class DiscreteAction {
 public:
  DiscreteAction(const LagrangianModel& model, const Vector& x, const Vector& y, double t, int segments)
      : model_(model), x_(x), y_(y), t_(t), segments_(segments), dim_(model.dim()), h_(t / segments) {}

  Eigen::Index unknowns() const { return static_cast<Eigen::Index>(segments_ - 1) * dim_; }

  Vector node(const Vector& z, int i) const {
    if (i == 0) return x_;
    if (i == segments_) return y_;
    return z.segment(static_cast<Eigen::Index>(i - 1) * dim_, dim_);
  }

  Vector straight_line() const {
    Vector z(unknowns());
    for (int i = 1; i < segments_; ++i) {
      const double s = static_cast<double>(i) / segments_;
      z.segment(static_cast<Eigen::Index>(i - 1) * dim_, dim_) = (1.0 - s) * x_ + s * y_;
    }
    return z;
  }

  double value(const Vector& z) const {
    double total = 0.0;
    for (int i = 0; i < segments_; ++i) {
      const Vector a = node(z, i), b = node(z, i + 1);
      const Vector v = (b - a) / h_;
      total += 0.5 * h_ * (model_.eval(a, v) + model_.eval(b, v));
    }
    return total;
  }

  double derivatives(const Vector& z, Vector& grad, Matrix& hess) const {
    const Eigen::Index m = unknowns();
    grad.setZero(m);
    hess.setZero(m, m);
    double total = 0.0;
    const double w = 0.5 * h_;
    for (int i = 0; i < segments_; ++i) {
      const Vector a = node(z, i), b = node(z, i + 1);
      const Vector v = (b - a) / h_;
      const LagrangianJet ja = model_.jet(a, v);
      const LagrangianJet jb = model_.jet(b, v);
      total += w * (ja.value + jb.value);
      const Vector lv = ja.Lv + jb.Lv;
      const Matrix vv = (ja.Lvv + jb.Lvv) / (h_ * h_);
      const Vector ga = w * (ja.Lx - lv / h_);
      const Vector gb = w * (jb.Lx + lv / h_);
      const Matrix haa = w * (ja.Lxx - (ja.Lxv + ja.Lxv.transpose()) / h_ + vv);
      const Matrix hbb = w * (jb.Lxx + (jb.Lxv + jb.Lxv.transpose()) / h_ + vv);
      const Matrix hab = w * ((ja.Lxv - jb.Lxv.transpose()) / h_ - vv);
      const Eigen::Index ia = static_cast<Eigen::Index>(i - 1) * dim_;
      const Eigen::Index ib = static_cast<Eigen::Index>(i) * dim_;
      const bool has_a = i > 0, has_b = i + 1 < segments_;
      if (has_a) {
        grad.segment(ia, dim_) += ga;
        hess.block(ia, ia, dim_, dim_) += haa;
      }
      if (has_b) {
        grad.segment(ib, dim_) += gb;
        hess.block(ib, ib, dim_, dim_) += hbb;
      }
      if (has_a && has_b) {
        hess.block(ia, ib, dim_, dim_) += hab;
        hess.block(ib, ia, dim_, dim_) += hab.transpose();
      }
    }
    return total;
  }

  // Damped Newton; returns the final action value.
  double minimize(Vector& z, int max_iter) const {
    Vector grad;
    Matrix hess;
    double value = derivatives(z, grad, hess);
    const Eigen::Index m = unknowns();
    if (m == 0) return value;
    for (int it = 0; it < max_iter; ++it) {
      if (grad.lpNorm<Eigen::Infinity>() < 1e-13 * (1.0 + std::abs(value))) break;
      Vector step;
      double shift = 0.0;
      const double scale = 1e-10 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
      for (int attempt = 0; attempt < 40; ++attempt) {
        Eigen::LDLT<Matrix> ldlt(hess + shift * Matrix::Identity(m, m));
        if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
          step = ldlt.solve(-grad);
          if (step.allFinite() && step.dot(grad) < 0.0) break;
        }
        step.resize(0);
        shift = shift == 0.0 ? scale : 4.0 * shift;
      }
      if (step.size() == 0) step = -grad;
      const double slope = step.dot(grad);
      double alpha = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 50; ++ls, alpha *= 0.5) {
        const double trial = this->value(z + alpha * step);
        if (std::isfinite(trial) && trial <= value + 1e-4 * alpha * slope) {
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
      z += alpha * step;
      const double previous = value;
      value = derivatives(z, grad, hess);
      if ((alpha * step).lpNorm<Eigen::Infinity>() < 1e-15 * (1.0 + z.lpNorm<Eigen::Infinity>()) ||
          std::abs(previous - value) < 1e-16 * (1.0 + std::abs(value)))
        break;
    }
    return value;
  }

  double max_node_distance(const Vector& a, const Vector& b) const {
    double worst = 0.0;
    for (int i = 1; i < segments_; ++i) worst = std::max(worst, (node(a, i) - node(b, i)).norm());
    return worst;
  }

 private:
  const LagrangianModel& model_;
  Vector x_, y_;
  double t_;
  int segments_;
  int dim_;
  double h_;
};

// Euler–Lagrange flow on (q, q̇) with the running action as an extra state.
struct FlowState {
  Vector q, v;
  double action = 0.0;
};

class EulerLagrangeFlow {
 public:
  explicit EulerLagrangeFlow(const LagrangianModel& model) : model_(model) {}

  void rhs(const Vector& q, const Vector& v, Vector& accel, double& lagrangian) const {
    const LagrangianJet j = model_.jet(q, v);
    Eigen::LDLT<Matrix> ldlt(j.Lvv);
    accel = ldlt.solve(j.Lx - j.Lxv.transpose() * v);
    lagrangian = j.value;
  }

  // RK4 over [0,t] with `steps` steps; records every `record_every` steps when nodes != nullptr.
  FlowState integrate(const Vector& x, const Vector& v0, double t, int steps, int record_every = 0,
                      std::vector<FlowState>* nodes = nullptr) const {
    FlowState s{x, v0, 0.0};
    const double dt = t / steps;
    if (nodes) nodes->push_back(s);
    Vector a1, a2, a3, a4;
    double l1, l2, l3, l4;
    for (int k = 0; k < steps; ++k) {
      rhs(s.q, s.v, a1, l1);
      const Vector q2 = s.q + 0.5 * dt * s.v, v2 = s.v + 0.5 * dt * a1;
      rhs(q2, v2, a2, l2);
      const Vector q3 = s.q + 0.5 * dt * v2, v3 = s.v + 0.5 * dt * a2;
      rhs(q3, v3, a3, l3);
      const Vector q4 = s.q + dt * v3, v4 = s.v + dt * a3;
      rhs(q4, v4, a4, l4);
      s.q += dt / 6.0 * (s.v + 2.0 * v2 + 2.0 * v3 + v4);
      s.v += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
      s.action += dt / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
      if (!s.q.allFinite() || !s.v.allFinite()) throw NumericalError("Euler-Lagrange flow diverged");
      if (nodes && record_every > 0 && (k + 1) % record_every == 0) nodes->push_back(s);
    }
    return s;
  }

 private:
  const LagrangianModel& model_;
};

// Newton on the initial velocity so that the flow lands on y.
Vector shoot(const EulerLagrangeFlow& flow, const Vector& x, const Vector& y, double t, Vector v0, int steps,
             double tol, double& miss) {
  const Eigen::Index n = x.size();
  Vector miss_vec = flow.integrate(x, v0, t, steps).q - y;
  miss = miss_vec.norm();
  for (int it = 0; it < 60 && miss > tol; ++it) {
    Matrix jac(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = 1e-6 * (1.0 + std::abs(v0(j)));
      Vector plus = v0, minus = v0;
      plus(j) += d;
      minus(j) -= d;
      jac.col(j) = (flow.integrate(x, plus, t, steps).q - flow.integrate(x, minus, t, steps).q) / (2.0 * d);
    }
    const Vector step = jac.colPivHouseholderQr().solve(-miss_vec);
    if (!step.allFinite()) break;
    double lambda = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls, lambda *= 0.5) {
      Vector trial_vec;
      try {
        trial_vec = flow.integrate(x, v0 + lambda * step, t, steps).q - y;
      } catch (const NumericalError&) {
        continue;
      }
      if (trial_vec.norm() < (1.0 - 1e-4 * lambda) * miss) {
        v0 += lambda * step;
        miss_vec = trial_vec;
        miss = trial_vec.norm();
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return v0;
}

double mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev(const std::vector<double>& xs) {
  const double mu = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

}  // namespace

ActionResult minimize_action(const LagrangianModel& model, const Vector& x, const Vector& y, double t,
                             const ActionOptions& options) {
  const int n = model.dim();
  require_dim(x, n, "minimize_action x");
  require_dim(y, n, "minimize_action y");
  require_time(t, "minimize_action");
  if (options.nodes < 4) throw ValidationError("minimize_action: need at least 4 nodes");
  if (options.restarts < 1) throw ValidationError("minimize_action: restarts must be >= 1");
  if (options.substeps < 1) throw ValidationError("minimize_action: substeps must be >= 1");

  // Discrete phase.
  const DiscreteAction discrete(model, x, y, t, options.nodes);
  Rng rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double amplitude = 0.25 * ((y - x).norm() + t);
  Vector best;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, Vector>> runs;
  for (int r = 0; r < options.restarts; ++r) {
    Vector z = discrete.straight_line();
    if (r > 0) {
      for (int mode = 1; mode <= 3; ++mode) {
        Vector coeff(n);
        for (int k = 0; k < n; ++k) coeff(k) = amplitude * gauss(rng) / mode;
        for (int i = 1; i < options.nodes; ++i) {
          const double s = static_cast<double>(i) / options.nodes;
          z.segment(static_cast<Eigen::Index>(i - 1) * n, n) += std::sin(mode * M_PI * s) * coeff;
        }
      }
    }
    const double value = discrete.minimize(z, options.max_newton);
    if (!std::isfinite(value)) continue;
    runs.emplace_back(value, z);
    if (value < best_value) {
      best_value = value;
      best = z;
    }
  }
  if (runs.empty()) throw NumericalError("minimize_action: discrete phase produced no finite action");
  bool multimodal = false;
  for (std::size_t a = 0; a < runs.size(); ++a)
    for (std::size_t b = a + 1; b < runs.size(); ++b)
      if (discrete.max_node_distance(runs[a].second, runs[b].second) > 1e-2) multimodal = true;

  // Shooting phase.
  const EulerLagrangeFlow flow(model);
  const double h = t / options.nodes;
  Vector v0 = (discrete.node(best, 1) - x) / h;
  {
    // Second-order start: v(0) ≈ (−3q0 + 4q1 − q2)/(2h).
    if (options.nodes >= 2) v0 = (-3.0 * x + 4.0 * discrete.node(best, 1) - discrete.node(best, 2)) / (2.0 * h);
  }
  const double miss_tol = std::max(1e-13 * (1.0 + y.norm()), 1e-3 * options.el_tolerance);
  int substeps = options.substeps;
  double residual = std::numeric_limits<double>::infinity();
  FlowState fine_end;
  std::vector<FlowState> recorded;
  double miss = 0.0;
  while (true) {
    const int steps = options.nodes * substeps;
    v0 = shoot(flow, x, y, t, v0, steps, miss_tol, miss);
    const FlowState coarse = flow.integrate(x, v0, t, steps);
    recorded.clear();
    fine_end = flow.integrate(x, v0, t, 2 * steps, 2 * substeps, &recorded);
    const double doubling = std::max((coarse.q - fine_end.q).norm(),
                                     std::abs(coarse.action - fine_end.action) / (1.0 + std::abs(fine_end.action)));
    residual = std::max({miss, (fine_end.q - y).norm(), doubling});
    if (residual <= options.el_tolerance || substeps >= 64) break;
    substeps *= 2;
  }
  if (!(residual <= options.el_tolerance))
    throw NumericalError("minimize_action: Euler-Lagrange residual " + std::to_string(residual) +
                         " above tolerance");

  ActionResult out;
  out.x = x;
  out.y = y;
  out.t = t;
  out.value = fine_end.action;
  out.el_residual = residual;
  out.multimodal = multimodal;
  Curve& c = out.minimizer;
  c.t_end = t;
  for (const FlowState& s : recorded) {
    c.nodes.push_back(s.q);
    c.velocities.push_back(s.v);
    c.dual_arc.push_back(model.L_v(s.q, s.v));
  }
  // Pin the endpoints exactly; the flow misses y by at most `residual`.
  c.nodes.front() = x;
  c.nodes.back() = y;
  std::vector<double> energies;
  for (std::size_t i = 0; i < c.nodes.size(); ++i)
    energies.push_back(c.dual_arc[i].dot(c.velocities[i]) - model.eval(c.nodes[i], c.velocities[i]));
  out.energy = mean(energies);
  out.energy_stddev = stddev(energies);
  const ActionDerivatives d = derivative_formulas(model, c);
  out.grad_x = d.grad_x;
  out.grad_y = d.grad_y;
  out.grad_t = d.grad_t;
  return out;
}

ActionDerivatives derivative_formulas(const LagrangianModel& model, const Curve& curve) {
  if (curve.nodes.size() < 2) throw ValidationError("derivative_formulas: empty curve");
  ActionDerivatives d;
  d.grad_y = curve.dual_arc.back();
  d.grad_x = -curve.dual_arc.front();
  std::vector<double> energies;
  for (std::size_t i = 0; i < curve.nodes.size(); ++i)
    energies.push_back(curve.dual_arc[i].dot(curve.velocities[i]) -
                       model.eval(curve.nodes[i], curve.velocities[i]));
  d.grad_t = -mean(energies);
  return d;
}

DerivativeCheck action_derivatives(const LagrangianModel& model, const ActionResult& result,
                                   const ActionOptions& options, double tolerance, double fd_step) {
  if (result.el_residual > options.el_tolerance)
    throw NumericalError("action_derivatives: minimizer not refined to tolerance");
  ActionOptions inner = options;
  inner.restarts = 1;
  const int n = model.dim();
  auto value_at = [&](const Vector& x, const Vector& y, double t) {
    return minimize_action(model, x, y, t, inner).value;
  };
  DerivativeCheck check;
  check.analytic = derivative_formulas(model, result.minimizer);
  check.finite_difference.grad_x = Vector::Zero(n);
  check.finite_difference.grad_y = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double hx = fd_step * (1.0 + std::abs(result.x(i)));
    Vector xp = result.x, xm = result.x;
    xp(i) += hx;
    xm(i) -= hx;
    check.finite_difference.grad_x(i) = (value_at(xp, result.y, result.t) - value_at(xm, result.y, result.t)) / (2 * hx);
    const double hy = fd_step * (1.0 + std::abs(result.y(i)));
    Vector yp = result.y, ym = result.y;
    yp(i) += hy;
    ym(i) -= hy;
    check.finite_difference.grad_y(i) = (value_at(result.x, yp, result.t) - value_at(result.x, ym, result.t)) / (2 * hy);
  }
  const double ht = fd_step * result.t;
  check.finite_difference.grad_t =
      (value_at(result.x, result.y, result.t + ht) - value_at(result.x, result.y, result.t - ht)) / (2 * ht);

  auto rel = [](double a, double f) { return std::abs(a - f) / (1.0 + std::abs(a)); };
  double worst = rel(check.analytic.grad_t, check.finite_difference.grad_t);
  for (int i = 0; i < n; ++i) {
    worst = std::max(worst, rel(check.analytic.grad_x(i), check.finite_difference.grad_x(i)));
    worst = std::max(worst, rel(check.analytic.grad_y(i), check.finite_difference.grad_y(i)));
  }
  check.max_relative_error = worst;
  check.pass = worst <= tolerance;
  if (!check.pass)
    throw NumericalError("action_derivatives: finite-difference cross-check failed (relative error " +
                         std::to_string(worst) + ")");
  return check;
}

ActionKernel::ActionKernel(LagrangianModel model, ActionOptions options)
    : model_(std::move(model)), options_(options) {}

KernelValue ActionKernel::operator()(const Vector& from, const Vector& to, double t) const {
  require_time(t, "action kernel");
  if (closed_form()) {
    const Vector w = (to - from) / t;
    const double l = model_.eval(from, w);
    const Vector lv = model_.L_v(from, w);
    return KernelValue{t * l, -lv, lv, l - lv.dot(w)};
  }
  const ActionResult r = minimize_action(model_, from, to, t, options_);
  return KernelValue{r.value, r.grad_x, r.grad_y, r.grad_t};
}

ActionResult ActionKernel::solve(const Vector& from, const Vector& to, double t) const {
  if (!closed_form()) return minimize_action(model_, from, to, t, options_);
  require_time(t, "action kernel");
  ActionResult r;
  r.x = from;
  r.y = to;
  r.t = t;
  const Vector w = (to - from) / t;
  const Vector lv = model_.L_v(from, w);
  const double l = model_.eval(from, w);
  r.value = t * l;
  r.energy = lv.dot(w) - l;
  r.grad_x = -lv;
  r.grad_y = lv;
  r.grad_t = -r.energy;
  Curve& c = r.minimizer;
  c.t_end = t;
  const int segments = options_.nodes;
  for (int i = 0; i <= segments; ++i) {
    const double s = static_cast<double>(i) / segments;
    c.nodes.push_back((1.0 - s) * from + s * to);
    c.velocities.push_back(w);
    c.dual_arc.push_back(lv);
  }
  return r;
}

AprioriBound apriori_velocity_bound(const LagrangianModel& model, const Vector& x, double R, double t) {
  require_dim(x, model.dim(), "apriori_velocity_bound");
  if (!(t > 0.0 && t <= 1.0)) throw ValidationError("apriori_velocity_bound: t must lie in (0,1]");
  if (!(R > 0.0)) throw ValidationError("apriori_velocity_bound: R must be positive");
  if (!model.theta(1.0)) throw ValidationError("apriori_velocity_bound: no growth witness theta declared");

  const Vector origin = Vector::Zero(model.dim());
  const double endpoint_speed = R / t;
  // Straight segment cost bound: t·sup L over B̄(x,R) × B̄(0, R/t).
  double sup_l = -std::numeric_limits<double>::infinity();
  for (const Vector& z : dyadic_ball_points(x, R))
    for (const Vector& v : dyadic_ball_points(origin, endpoint_speed)) sup_l = std::max(sup_l, model.eval(z, v));
  sup_l += 0.1 * std::abs(sup_l);

  // r0 candidates on a geometric grid; θ(r)/r must be nondecreasing from r0 on.
  std::vector<double> grid, ratio;
  for (double r = 1e-3; r <= 1e5; r *= std::pow(2.0, 0.25)) {
    grid.push_back(r);
    ratio.push_back(*model.theta(r) / r);
  }
  std::vector<double> suffix_min(ratio.size());
  double running = std::numeric_limits<double>::infinity();
  for (std::size_t i = ratio.size(); i-- > 0;) suffix_min[i] = running = std::min(running, ratio[i]);

  AprioriBound bound;
  double c0_radius = R;
  for (int round = 0; round < 40; ++round) {
    const auto c0 = model.c0(x, c0_radius);
    if (!c0) throw ValidationError("apriori_velocity_bound: no growth witness c0 declared");
    const double K = std::max(0.0, sup_l + *c0);
    if (!std::isfinite(K)) break;
    double rho = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double th = *model.theta(grid[i]);
      if (th <= 0.0 || ratio[i] > suffix_min[i] * (1.0 + 1e-12)) continue;
      rho = std::min(rho, grid[i] * (1.0 + K / th));
    }
    if (!std::isfinite(rho))
      throw NumericalError("apriori_velocity_bound: theta lacks superlinearity on the needed range");
    bound.mean_speed = rho;
    bound.position = t * rho;
    if (bound.position > c0_radius) {
      c0_radius = 1.05 * bound.position;
      continue;
    }
    const auto c1 = model.c1(x, bound.position);
    if (!c1) throw ValidationError("apriori_velocity_bound: no derivative witness c1 available");
    double sup_p = 0.0;
    const auto positions = dyadic_ball_points(x, bound.position);
    for (const Vector& z : positions)
      for (const Vector& v : dyadic_ball_points(origin, rho)) sup_p = std::max(sup_p, model.L_v(z, v).norm());
    bound.momentum = 1.1 * sup_p + *c1 * t * K;
    double sup_speed = 0.0;
    for (const Vector& z : positions)
      for (const Vector& q : dyadic_ball_points(origin, bound.momentum))
        sup_speed = std::max(sup_speed, legendre(model, z, q).v_star.norm());
    bound.speed = 1.1 * sup_speed;
    bound.delta = std::max({bound.speed, bound.momentum, bound.position});
    return bound;
  }
  throw NumericalError("apriori_velocity_bound: position bound did not stabilize");
}

double localization_radius(const Vector&, double t) {
  if (!(t > 0.0 && t <= 1.0)) throw ValidationError("localization_radius: t must lie in (0,1]");
  return 0.5 * t;
}

double convexity_second_difference(const ActionKernel& kernel, const Vector& x, const Vector& y, double t,
                                   double h, const Vector& z) {
  if (!(std::abs(h) < t)) throw ValidationError("convexity_second_difference: need |h| < t");
  return kernel.value(x, y + z, t + h) + kernel.value(x, y - z, t - h) - 2.0 * kernel.value(x, y, t);
}

namespace {

ConvexityReport sample_convexity(const ActionKernel& kernel, const Vector& x, double t, int nsamples,
                                 std::uint64_t seed, double noise_tolerance, bool stop_on_violation) {
  require_dim(x, kernel.model().dim(), "verify_convexity");
  if (nsamples < 3) throw ValidationError("verify_convexity: need at least 3 samples");
  const double radius = localization_radius(x, t);
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const Vector origin = Vector::Zero(x.size());
  ConvexityReport rep;
  rep.t = t;
  rep.noise_tolerance = noise_tolerance;
  rep.min_q = std::numeric_limits<double>::infinity();
  double c1 = std::numeric_limits<double>::infinity(), c2 = c1, curv = c1;
  for (int k = 0; k < nsamples; ++k) {
    const Vector y = random_in_ball(x, radius, rng);
    double h = 0.1 * t * unit(rng);
    Vector z = random_in_ball(origin, t / 20.0, rng);
    const int group = k % 3;
    if (group == 0) h = 0.0;
    if (group == 1) z.setZero();
    const double q = convexity_second_difference(kernel, x, y, t, h, z);
    ++rep.samples;
    rep.min_q = std::min(rep.min_q, q);
    if (q < -noise_tolerance) {
      ++rep.violations;
      if (stop_on_violation) break;
    }
    if (group == 0 && z.squaredNorm() > 0.0) {
      c2 = std::min(c2, q * t / z.squaredNorm());
      curv = std::min(curv, q / z.squaredNorm());
    }
    if (group == 1 && h != 0.0) c1 = std::min(c1, q * t * t * t / (h * h));
  }
  rep.c1_hat = std::isfinite(c1) ? c1 : 0.0;
  rep.c2_hat = std::isfinite(c2) ? c2 : 0.0;
  rep.curvature_hat = std::isfinite(curv) ? curv : 0.0;
  return rep;
}

}  // namespace

ConvexityReport verify_convexity(const ActionKernel& kernel, const Vector& x, double t, int nsamples,
                                 std::uint64_t seed, double noise_tolerance) {
  return sample_convexity(kernel, x, t, nsamples, seed, noise_tolerance, false);
}

double determine_t0(const ActionKernel& kernel, const Vector& x, int nsamples, std::uint64_t seed,
                    int max_halvings) {
  double t = 1.0;
  for (int k = 0; k <= max_halvings; ++k, t *= 0.5) {
    try {
      // seeds disjoint from the ones a later verify_convexity(seed) call draws
      const std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(k));
      if (sample_convexity(kernel, x, t, nsamples, s, 1e-8, true).violations == 0) return t;
    } catch (const NumericalError&) {
      // too long a horizon for the solver; try a shorter one
    }
  }
  throw NumericalError("determine_t0: no admissible horizon found");
}

EquiLipschitzReport equi_lipschitz_check(std::span<const Curve> curves) {
  EquiLipschitzReport rep;
  std::vector<std::pair<double, double>> samples;  // (log 1/t, log constant)
  for (const Curve& c : curves) {
    double lip = 0.0;
    for (std::size_t i = 0; i + 1 < c.velocities.size(); ++i) {
      const double ds = c.time(i + 1) - c.time(i);
      if (ds > 0.0) lip = std::max(lip, (c.velocities[i + 1] - c.velocities[i]).norm() / ds);
    }
    rep.constants.push_back(lip);
    rep.max_constant = std::max(rep.max_constant, lip);
    if (lip > 1e-12 && c.t_end > 0.0) samples.emplace_back(std::log(1.0 / c.t_end), std::log(lip));
  }
  if (samples.size() >= 2) {
    double mx = 0, my = 0;
    for (auto [a, b] : samples) {
      mx += a;
      my += b;
    }
    mx /= samples.size();
    my /= samples.size();
    double sxy = 0, sxx = 0;
    for (auto [a, b] : samples) {
      sxy += (a - mx) * (b - my);
      sxx += (a - mx) * (a - mx);
    }
    if (sxx > 1e-12) rep.growth_slope = sxy / sxx;
    rep.flagged = rep.growth_slope > 0.5;
  }
  return rep;
}

std::vector<double> energy_profile(const LagrangianModel& model, const Curve& curve) {
  std::vector<double> out;
  for (std::size_t i = 0; i < curve.nodes.size(); ++i)
    out.push_back(curve.dual_arc[i].dot(curve.velocities[i]) - model.eval(curve.nodes[i], curve.velocities[i]));
  return out;
}

}  // namespace hjs
